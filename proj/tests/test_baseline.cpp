#include "mga/baseline.hpp"
#include "mga/trajectory.hpp"
#include "mga/types.hpp"

#include <doctest.h>
#include "test_helpers.hpp"

#include <algorithm>
#include <cmath>

using namespace mga;

namespace
{

BoxProblem shifted_sphere(const std::vector<double> &c, double lo, double hi)
{
    BoxProblem p;
    p.lower.assign(c.size(), lo);
    p.upper.assign(c.size(), hi);
    p.objective = [c](std::span<const double> y) {
        double s = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i)
            s += (y[i] - c[i]) * (y[i] - c[i]);
        return s;
    };
    return p;
}

}  // namespace

TEST_CASE("latin hypercube with one sample")
{
    Rng rng(1);
    const std::vector<double> lo{-1.0, 2.0}, hi{1.0, 3.0};
    const auto pts = latin_hypercube(1, lo, hi, rng);
    REQUIRE(pts.size() == 1);
    for (std::size_t i = 0; i < 2; ++i)
    {
        CHECK(pts[0][i] >= lo[i]);
        CHECK(pts[0][i] <= hi[i]);
    }
    CHECK_THROWS_AS(latin_hypercube(0, lo, hi, rng), ValidationError);
}

TEST_CASE("latin hypercube strata are each used once")
{
    Rng rng(2);
    const std::vector<double> lo{0.0, -5.0, 10.0}, hi{1.0, 5.0, 30.0};
    for (int rep = 0; rep < 20; ++rep)
    {
        const auto pts = latin_hypercube(10, lo, hi, rng);
        for (std::size_t d = 0; d < 3; ++d)
        {
            std::vector<int> strata;
            for (const auto &p : pts)
                strata.push_back(static_cast<int>(std::floor((p[d] - lo[d]) / (hi[d] - lo[d]) * 10.0)));
            std::sort(strata.begin(), strata.end());
            for (int s = 0; s < 10; ++s)
                CHECK(strata[static_cast<std::size_t>(s)] == s);
        }
    }
}

TEST_CASE("latin hypercube mean on the unit square")
{
    Rng rng(3);
    const std::vector<double> lo{0.0, 0.0}, hi{1.0, 1.0};
    const auto pts = latin_hypercube(1000, lo, hi, rng);
    for (std::size_t d = 0; d < 2; ++d)
    {
        double mean = 0.0;
        for (const auto &p : pts)
            mean += p[d] / 1000.0;
        CHECK(mean >= 0.45);
        CHECK(mean <= 0.55);
    }
}

TEST_CASE("refinement from a strict minimum stays there")
{
    const std::vector<double> c{0.3, -0.2, 0.7};
    const BoxProblem p = shifted_sphere(c, -1.0, 1.0);
    const RefineResult r = local_refine(c, p);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(std::abs(r.y[i] - c[i]) <= 1e-6 * 2.0);
    CHECK(r.f == 0.0);
}

TEST_CASE("refinement converges on a convex bowl")
{
    const std::vector<double> c{0.31, -0.47, 0.12, 0.88};
    const BoxProblem p = shifted_sphere(c, -1.0, 1.0);
    Rng rng(4);
    const RefineOptions opts;
    for (int t = 0; t < 10; ++t)
    {
        std::vector<double> y0(4);
        for (double &v : y0)
            v = rng.uniform(-1.0, 1.0);
        const RefineResult r = local_refine(y0, p, opts);
        for (std::size_t i = 0; i < 4; ++i)
            CHECK(std::abs(r.y[i] - c[i]) < 10.0 * opts.tolerance * 2.0);
        CHECK(r.evals <= opts.max_evals);
    }
}

TEST_CASE("refinement freezes integer components and respects bounds")
{
    BoxProblem p;
    p.lower = {0.0, 0.0};
    p.upper = {4.0, 1.0};
    p.integer = {true, false};
    p.objective = [](std::span<const double> y) { return y[0] + (y[1] - 2.0) * (y[1] - 2.0); };
    const std::vector<double> y0{3.0, 0.2};
    const RefineResult r = local_refine(y0, p);
    CHECK(r.y[0] == 3.0);
    CHECK(r.y[1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("refinement never worsens Earth-Mars transfers")
{
    const auto &cat = testing_support::default_catalog();
    BoxProblem p;
    p.lower = {0.0, 100.0};
    p.upper = {1000.0, 400.0};
    p.objective = [&](std::span<const double> y) { return two_impulse_cost(Epoch{y[0]}, y[1], 3, 4, cat); };
    Rng rng(5);
    RefineOptions opts;
    opts.max_evals = 600;
    const auto lo = p.search_lower(), hi = p.search_upper();
    for (int t = 0; t < 100; ++t)
    {
        std::vector<double> y0(lo.size());
        for (std::size_t i = 0; i < y0.size(); ++i)
            y0[i] = rng.uniform(lo[i], hi[i]);
        const double f0 = p.objective(p.to_point(y0));
        const RefineResult r = local_refine(y0, p, opts);
        CHECK(r.f <= f0);
        CHECK(p.objective(r.y) == r.f);
    }
}

TEST_CASE("multistart counts")
{
    const BoxProblem p = shifted_sphere({0.1, 0.2}, -1.0, 1.0);
    MultistartOptions one;
    one.n_samples = 1;
    one.n_best = 1;
    one.n_runs = 1;
    one.refine.max_evals = 500;
    const auto r1 = multistart(p, one);
    CHECK(r1.minima.size() == 1);
    CHECK(r1.run_best.size() == 1);
    CHECK(r1.samples_drawn == 1);

    MultistartOptions many;
    many.n_samples = 20;
    many.n_best = 3;
    many.n_runs = 5;
    many.max_evals = 5 * 20 + 5 * 3 * 200;
    const auto r = multistart(p, many);
    CHECK(r.minima.size() <= many.n_best * many.n_runs);
    CHECK(r.evals <= many.max_evals);
    CHECK(r.samples_drawn == 100);
    for (std::size_t k = 1; k < r.minima.size(); ++k)
        CHECK(r.minima.entries()[k - 1].f <= r.minima.entries()[k].f);
    for (std::size_t a = 0; a < r.minima.size(); ++a)
        for (std::size_t b = a + 1; b < r.minima.size(); ++b)
            CHECK(normalized_distance(r.minima.entries()[a].y, r.minima.entries()[b].y, p.lower, p.upper) >
                  many.crowding_threshold);
}

TEST_CASE("multistart validation")
{
    const BoxProblem p = shifted_sphere({0.0}, -1.0, 1.0);
    MultistartOptions o;
    o.n_samples = 2;
    o.n_best = 3;
    CHECK_THROWS_AS(multistart(p, o), ValidationError);
    o.n_best = 1;
    o.n_runs = 0;
    CHECK_THROWS_AS(multistart(p, o), ValidationError);
    o.n_runs = 2;
    o.max_evals = 3;
    CHECK_THROWS_AS(multistart(p, o), ValidationError);
}
