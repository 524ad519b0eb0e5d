#include "mga/baseline.hpp"

#include "mga/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace mga
{

std::vector<std::vector<double>> latin_hypercube(std::size_t n_samples, std::span<const double> lower,
                                                 std::span<const double> upper, Rng &rng)
{
    if (n_samples == 0)
        throw ValidationError("latin hypercube needs at least one sample");
    const std::size_t n = lower.size();
    std::vector<std::vector<double>> pts(n_samples, std::vector<double>(n));
    std::vector<std::size_t> strata(n_samples);
    for (std::size_t d = 0; d < n; ++d)
    {
        std::iota(strata.begin(), strata.end(), std::size_t{0});
        // Fisher-Yates with the platform-independent index draw.
        for (std::size_t k = n_samples; k > 1; --k)
            std::swap(strata[k - 1], strata[rng.index(k)]);
        const double width = (upper[d] - lower[d]) / static_cast<double>(n_samples);
        for (std::size_t s = 0; s < n_samples; ++s)
            pts[s][d] = lower[d] + width * (static_cast<double>(strata[s]) + rng.uniform());
    }
    return pts;
}

namespace
{

// Works in unit coordinates over the free components only.
class UnitView
{
  public:
    UnitView(const BoxProblem &problem, std::span<const double> y, Evaluator &ev)
        : lo_(problem.search_lower()), hi_(problem.search_upper()), point_(y.begin(), y.end()), ev_(ev)
    {
        for (std::size_t i = 0; i < lo_.size(); ++i)
            if (!problem.is_integer(i) && hi_[i] > lo_[i])
                dims_.push_back(i);
    }

    std::size_t size() const { return dims_.size(); }

    std::vector<double> unit() const
    {
        std::vector<double> u(dims_.size());
        for (std::size_t k = 0; k < dims_.size(); ++k)
        {
            const std::size_t i = dims_[k];
            u[k] = (point_[i] - lo_[i]) / (hi_[i] - lo_[i]);
        }
        return u;
    }

    std::optional<double> eval(std::vector<double> &u)
    {
        for (double &v : u)
            v = std::clamp(v, 0.0, 1.0);
        return ev_.try_eval(point(u));
    }

    std::vector<double> point(std::span<const double> u) const
    {
        std::vector<double> y = point_;
        for (std::size_t k = 0; k < dims_.size(); ++k)
        {
            const std::size_t i = dims_[k];
            y[i] = std::clamp(lo_[i] + u[k] * (hi_[i] - lo_[i]), lo_[i], hi_[i]);
        }
        return y;
    }

  private:
    std::vector<double> lo_, hi_, point_;
    std::vector<std::size_t> dims_;
    Evaluator &ev_;
};

// One Nelder-Mead run from an axis simplex of edge `step`; returns the best vertex.
std::pair<std::vector<double>, double> simplex_descent(UnitView &view, std::vector<double> u0, double f0, double step,
                                                       double tolerance)
{
    const std::size_t n = view.size();
    std::vector<std::vector<double>> s(n + 1, u0);
    std::vector<double> f(n + 1, f0);
    for (std::size_t k = 0; k < n; ++k)
    {
        s[k + 1][k] += u0[k] + step <= 1.0 ? step : -step;
        const auto fk = view.eval(s[k + 1]);
        if (!fk)
            return {u0, f0};
        f[k + 1] = *fk;
    }

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n);
    auto along = [&](double t) {
        for (std::size_t j = 0; j < n; ++j)
            trial[j] = centroid[j] + t * (s.back()[j] - centroid[j]);
        return view.eval(trial);
    };
    for (;;)
    {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
        std::vector<std::vector<double>> s2(n + 1);
        std::vector<double> f2(n + 1);
        for (std::size_t k = 0; k <= n; ++k)
        {
            s2[k] = std::move(s[order[k]]);
            f2[k] = f[order[k]];
        }
        s = std::move(s2);
        f = std::move(f2);

        double size = 0.0;
        for (std::size_t k = 1; k <= n; ++k)
            for (std::size_t j = 0; j < n; ++j)
                size = std::max(size, std::abs(s[k][j] - s[0][j]));
        if (size < tolerance)
            break;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < n; ++j)
                centroid[j] += s[k][j] / static_cast<double>(n);

        const auto fr = along(-1.0);
        if (!fr)
            break;
        if (*fr < f[0])
        {
            const std::vector<double> reflected = trial;
            const auto fe = along(-2.0);
            if (!fe)
                break;
            if (*fe < *fr)
            {
                s[n] = trial;
                f[n] = *fe;
            }
            else
            {
                s[n] = reflected;
                f[n] = *fr;
            }
            continue;
        }
        if (*fr < f[n - 1])
        {
            s[n] = trial;
            f[n] = *fr;
            continue;
        }
        const bool outside = *fr < f[n];
        const std::vector<double> reflected = trial;
        const auto fc = along(outside ? -0.5 : 0.5);
        if (!fc)
            break;
        if (*fc < std::min(*fr, f[n]))
        {
            s[n] = trial;
            f[n] = *fc;
            continue;
        }
        if (outside)
        {
            s[n] = reflected;
            f[n] = *fr;
        }
        // Shrink toward the best vertex.
        bool exhausted = false;
        for (std::size_t k = 1; k <= n && !exhausted; ++k)
        {
            for (std::size_t j = 0; j < n; ++j)
                s[k][j] = s[0][j] + 0.5 * (s[k][j] - s[0][j]);
            const auto fk = view.eval(s[k]);
            if (!fk)
                exhausted = true;
            else
                f[k] = *fk;
        }
        if (exhausted)
            break;
    }
    const auto best = static_cast<std::size_t>(std::min_element(f.begin(), f.end()) - f.begin());
    return {s[best], f[best]};
}

}  // namespace

RefineResult local_refine(std::span<const double> y0, const BoxProblem &problem, const RefineOptions &options,
                          std::optional<double> f0)
{
    const std::size_t n = problem.dimension();
    const std::vector<double> lo = problem.search_lower();
    const std::vector<double> hi = problem.search_upper();
    RefineResult out;
    out.y.assign(y0.begin(), y0.end());
    for (std::size_t i = 0; i < n; ++i)
        out.y[i] = std::clamp(out.y[i], lo[i], hi[i]);
    // The caller's value only stands in for y0 when clamping left it untouched.
    const bool moved = !std::equal(out.y.begin(), out.y.end(), y0.begin());
    Evaluator ev(problem, options.max_evals);
    out.f = (f0 && !moved) ? *f0 : ev.eval(out.y);

    // Simplex restarts at the incumbent; the start edge halves whenever a restart fails.
    UnitView view(problem, out.y, ev);
    if (view.size() > 0)
    {
        std::vector<double> u = view.unit();
        double step = options.initial_step;
        while (step >= options.tolerance && !ev.exhausted())
        {
            auto [u_new, f_new] = simplex_descent(view, u, out.f, step, options.tolerance);
            if (f_new < out.f)
            {
                u = std::move(u_new);
                out.f = f_new;
            }
            else
                step *= options.contraction;
        }
        out.y = view.point(u);
    }

    // Compass poll down to the tolerance certifies the end point.
    std::vector<std::size_t> dims;
    for (std::size_t i = 0; i < n; ++i)
        if (!problem.is_integer(i) && hi[i] > lo[i])
            dims.push_back(i);
    double step = options.tolerance * 8.0;
    std::vector<double> trial = out.y;
    while (step >= options.tolerance && !ev.exhausted() && !dims.empty())
    {
        bool improved = false;
        for (std::size_t i : dims)
        {
            for (double sign : {1.0, -1.0})
            {
                const double width = hi[i] - lo[i];
                trial[i] = std::clamp(out.y[i] + sign * step * width, lo[i], hi[i]);
                if (trial[i] == out.y[i])
                    continue;
                const auto f = ev.try_eval(trial);
                if (!f)
                    break;
                if (*f < out.f)
                {
                    out.y[i] = trial[i];
                    out.f = *f;
                    improved = true;
                    break;
                }
                trial[i] = out.y[i];
            }
            trial[i] = out.y[i];
            if (ev.exhausted())
                break;
        }
        if (!improved)
            step *= options.contraction;
    }
    out.y = problem.to_point(out.y);
    out.evals = ev.count();
    return out;
}

MultistartReport multistart(const BoxProblem &problem, const MultistartOptions &options)
{
    problem.validate();
    if (options.n_samples == 0 || options.n_runs == 0 || options.n_best == 0)
        throw ValidationError("multistart needs positive samples, best and runs");
    if (options.n_best > options.n_samples)
        throw ValidationError("multistart: n_best exceeds n_samples");

    const std::vector<double> lo = problem.search_lower();
    const std::vector<double> hi = problem.search_upper();
    MultistartReport report;
    report.minima = SolutionArchive(problem.lower, problem.upper, options.crowding_threshold,
                                    options.n_best * options.n_runs);

    RefineOptions refine = options.refine;
    if (options.max_evals > 0)
    {
        const auto per_run = options.max_evals / static_cast<std::int64_t>(options.n_runs);
        const auto left = per_run - static_cast<std::int64_t>(options.n_samples);
        if (left < static_cast<std::int64_t>(options.n_best))
            throw ValidationError("multistart budget does not cover the samples");
        refine.max_evals = left / static_cast<std::int64_t>(options.n_best);
    }

    for (std::size_t run = 0; run < options.n_runs; ++run)
    {
        Rng rng = Rng::stream(options.seed, 0x6d73, run);
        const auto pts = latin_hypercube(options.n_samples, lo, hi, rng);
        Evaluator ev(problem, static_cast<std::int64_t>(options.n_samples));
        std::vector<std::pair<double, std::size_t>> ranked;
        for (std::size_t s = 0; s < pts.size(); ++s)
            ranked.emplace_back(ev.eval(pts[s]), s);
        report.samples_drawn += pts.size();
        report.evals += ev.count();
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const auto &a, const auto &b) { return a.first < b.first; });

        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < options.n_best; ++k)
        {
            const auto r = local_refine(pts[ranked[k].second], problem, refine, ranked[k].first);
            report.evals += r.evals;
            report.minima.insert(r.y, r.f);
            best = std::min(best, r.f);
        }
        report.run_best.push_back(best);
    }
    return report;
}

}  // namespace mga
