// Acceptance harness: one PASS/FAIL line per criterion.
//   acceptance                 all criteria
//   acceptance --criterion N   a single criterion; exit code 0 only when it passes

#include "mga/astro.hpp"
#include "mga/baseline.hpp"
#include "mga/optimizer.hpp"
#include "mga/trajectory.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace mga;
namespace fs = std::filesystem;

namespace
{

constexpr double kMuSun = 1.3271244004127942e11;

struct Outcome
{
    bool pass{false};
    std::string detail;
};

fs::path source_dir()
{
    return fs::path(MGA_SOURCE_DIR);
}

std::string fmt(const char *format, double a)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, format, a);
    return buf;
}

Vec3 random_unit(std::mt19937_64 &rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    return Vec3(n(rng), n(rng), n(rng)).normalized();
}

int launch_year(const Trajectory &tr)
{
    return to_calendar(tr.legs.front().departure.epoch).year;
}

struct CaseRuns
{
    MgaProblem problem;
    std::vector<SearchResult> runs;
    double best{0.0};
    std::size_t best_run{0};
};

CaseRuns run_case(const std::string &file, int seeds, const std::function<void(SearchParams &)> &adjust = {})
{
    const fs::path path = source_dir() / "problems" / file;
    CaseRuns c{load_problem_file(path), {}, 0.0, 0};
    const BoxProblem box = make_box_problem(c.problem);
    for (int s = 1; s <= seeds; ++s)
    {
        SearchParams p = load_search_params_file(path);
        p.seed = static_cast<std::uint64_t>(s);
        if (adjust)
            adjust(p);
        c.runs.push_back(run_search(box, p));
        const double f = c.runs.back().archive.best_f();
        std::printf("    %s seed %d: best %.4f km/s, %lld evaluations\n", file.c_str(), s, f,
                    static_cast<long long>(c.runs.back().evals));
        std::fflush(stdout);
        if (s == 1 || f < c.best)
        {
            c.best = f;
            c.best_run = c.runs.size() - 1;
        }
    }
    return c;
}

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Kernel identities.
Outcome criterion1()
{
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(20240101);
    std::uniform_real_distribution<double> radius(0.4, 6.0), tof(20.0, 2500.0), speed(0.2, 1.6),
        days(-2000.0, 2000.0), eta(0.0, kTwoPi), h(0.05, 5.0), vinf(0.5, 15.0);

    double lambert_worst = 0.0;
    int rejected = 0;
    for (int k = 0; k < 1000; ++k)
    {
        Vec3 u1 = random_unit(rng), u2 = random_unit(rng);
        u1.z() *= 0.2;
        u2.z() *= 0.2;
        const Vec3 r1 = u1.normalized() * radius(rng) * kAstronomicalUnitKm;
        const Vec3 r2 = u2.normalized() * radius(rng) * kAstronomicalUnitKm;
        const double t = tof(rng);
        try
        {
            const auto sol = lambert(r1, r2, t, kMuSun);
            const auto end = propagate_kepler({r1, sol.v1, {}}, kMuSun, t);
            lambert_worst = std::max(lambert_worst, (end.r - r2).norm() / r2.norm());
        }
        catch (const LambertError &)
        {
            ++rejected;
        }
    }

    double energy_worst = 0.0, momentum_worst = 0.0;
    for (int k = 0; k < 1000; ++k)
    {
        const Vec3 r = random_unit(rng) * radius(rng) * kAstronomicalUnitKm;
        const Vec3 v = random_unit(rng) * speed(rng) * std::sqrt(kMuSun / r.norm());
        const auto out = propagate_kepler({r, v, {}}, kMuSun, days(rng));
        const double e0 = 0.5 * v.squaredNorm() - kMuSun / r.norm();
        const double e1 = 0.5 * out.v.squaredNorm() - kMuSun / out.r.norm();
        energy_worst = std::max(energy_worst, std::abs(e1 - e0) / std::abs(e0));
        momentum_worst =
            std::max(momentum_worst, (out.r.cross(out.v) - r.cross(v)).norm() / r.cross(v).norm());
    }

    Body planet;
    planet.id = 3;
    planet.name = "Earth";
    planet.mu = 398600.4418;
    planet.radius = 6378.136;
    double norm_worst = 0.0, turn_worst = 0.0;
    for (int k = 0; k < 1000; ++k)
    {
        const Vec3 v_in = random_unit(rng) * vinf(rng);
        const double hn = h(rng);
        const auto g = flyby_outgoing(v_in, random_unit(rng) * 30.0, eta(rng), hn, planet);
        norm_worst = std::max(norm_worst, std::abs(g.v_out_rel.norm() - v_in.norm()) / v_in.norm());
        // Turn angle from the hyperbola eccentricity: sin(gamma / 2) = 1 / e.
        const double e_h = 1.0 + planet.radius * (1.0 + hn) * v_in.squaredNorm() / planet.mu;
        const double oracle = 2.0 * std::asin(1.0 / e_h);
        const double turn =
            std::atan2(v_in.cross(g.v_out_rel).norm(), v_in.dot(g.v_out_rel));
        turn_worst = std::max(turn_worst, std::abs(turn - oracle));
    }

    const double secs = seconds_since(start);
    const bool pass = rejected <= 1 && lambert_worst < 1e-6 && energy_worst < 1e-10 && momentum_worst < 1e-10 &&
                      norm_worst < 1e-12 && turn_worst < 1e-10 && secs < 10.0;
    std::ostringstream d;
    d << "lambert " << lambert_worst << " (" << rejected << " rejected), energy " << energy_worst << ", momentum "
      << momentum_worst << ", flyby norm " << norm_worst << ", turn " << turn_worst;
    return {pass, d.str()};
}

// Earth-Mars launch bands over 2020-2035.
Outcome criterion2()
{
    const auto start = std::chrono::steady_clock::now();
    const BodyCatalog catalog = load_catalog_file(source_dir() / "data" / "catalog.json");
    GridSpec g;
    g.p1 = 3;
    g.p2 = 4;
    g.t0_min = from_calendar(2020, 1, 1).mjd2000;
    g.t0_max = from_calendar(2035, 1, 1).mjd2000;
    g.tof_min = 100.0;
    g.tof_max = 500.0;
    g.n_t0 = 200;
    g.n_tof = 200;
    const GridResult grid = grid_scan(g, catalog);

    std::vector<double> best(grid.t0.size());
    for (std::size_t i = 0; i < grid.t0.size(); ++i)
    {
        best[i] = grid.at(i, 0);
        for (std::size_t j = 1; j < grid.tof.size(); ++j)
            best[i] = std::min(best[i], grid.at(i, j));
    }

    // Bands: maximal runs of launch dates with some flight time below 15 km/s,
    // kept only when both ends lie inside the scan.
    struct Band
    {
        std::size_t first, last, argmin;
    };
    std::vector<Band> bands;
    for (std::size_t i = 0; i < best.size();)
    {
        if (!(best[i] < 15.0))
        {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < best.size() && best[j + 1] < 15.0)
            ++j;
        if (i > 0 && j + 1 < best.size())
        {
            const auto k = static_cast<std::size_t>(std::min_element(best.begin() + static_cast<long>(i),
                                                                     best.begin() + static_cast<long>(j) + 1) -
                                                    best.begin());
            bands.push_back({i, j, k});
        }
        i = j + 1;
    }
    if (bands.size() < 3)
        return {false, std::to_string(bands.size()) + " complete bands"};

    bool spacing_ok = true;
    std::ostringstream d;
    d << bands.size() << " bands, centre spacing";
    std::vector<double> centres;
    for (const Band &b : bands)
        centres.push_back(0.5 * (grid.t0[b.first] + grid.t0[b.last]));
    for (std::size_t k = 1; k < centres.size(); ++k)
    {
        const double s = centres[k] - centres[k - 1];
        spacing_ok = spacing_ok && std::abs(s - 780.0) <= 40.0;
        d << ' ' << std::lround(s);
    }
    d << " (argmin spacing";
    for (std::size_t k = 1; k < bands.size(); ++k)
        d << ' ' << std::lround(grid.t0[bands[k].argmin] - grid.t0[bands[k - 1].argmin]);
    d << ")";

    // Finer oracle: ten times the density on both axes over each band.
    bool depth_ok = true;
    double worst = 0.0;
    const double dt0 = grid.t0[1] - grid.t0[0];
    for (const Band &b : bands)
    {
        GridSpec f = g;
        f.t0_min = grid.t0[b.first] - dt0;
        f.t0_max = grid.t0[b.last] + dt0;
        f.n_t0 = static_cast<int>(std::lround((f.t0_max - f.t0_min) / dt0 * 10.0)) + 1;
        f.n_tof = 10 * (g.n_tof - 1) + 1;
        const GridResult fine = grid_scan(f, catalog);
        const double fine_min = *std::min_element(fine.dv.begin(), fine.dv.end());
        const double rel = (best[b.argmin] - fine_min) / fine_min;
        worst = std::max(worst, rel);
        depth_ok = depth_ok && std::abs(rel) <= 0.15;
    }
    d << ", worst band minimum vs fine grid " << fmt("%.2f%%", 100.0 * worst);
    return {spacing_ok && depth_ok && seconds_since(start) < 120.0, d.str()};
}

Outcome criterion3()
{
    const CaseRuns c = run_case("cassini.json", 5);
    const Trajectory tr = decode(c.runs[c.best_run].archive.best().y, c.problem);
    const int year = launch_year(tr);
    std::ostringstream d;
    d << "best of 5 " << fmt("%.3f", c.best) << " km/s (target <= 10.7), launch "
      << format_ddmmyy(tr.legs.front().departure.epoch);
    return {c.best <= 10.7 && year == 1997, d.str()};
}

Outcome criterion4()
{
    const CaseRuns c = run_case("rosetta.json", 5);
    // Characterization: merged minima of all runs.
    const BoxProblem box = make_box_problem(c.problem);
    SolutionArchive merged(box.lower, box.upper, 1e-3, 5000);
    for (const auto &r : c.runs)
        merged.merge(r.archive);
    const double cutoff = 2.0 * merged.best_f();
    int near_1455 = 0, near_1730 = 0;
    for (const ArchiveEntry &e : merged.entries())
    {
        if (e.f > cutoff)
            continue;
        const double t0 = decode(e.y, c.problem).legs.front().departure.epoch.mjd2000;
        near_1455 += std::abs(t0 - 1455.0) <= 30.0;
        near_1730 += std::abs(t0 - 1730.0) <= 30.0;
    }
    const bool clusters = near_1455 > 0 && near_1730 > 0;
    std::ostringstream d;
    d << "best of 5 " << fmt("%.3f", c.best) << " km/s (target <= 2.2); minima within 2x best: " << near_1455
      << " near 1455, " << near_1730 << " near 1730";
    return {c.best <= 2.2 && clusters, d.str()};
}

Outcome criterion5()
{
    const CaseRuns c = run_case("eveej_2009.json", 5);
    int found = 0;
    double closest_dsm = 1e9;
    for (const auto &r : c.runs)
        for (const ArchiveEntry &e : r.archive.entries())
        {
            if (!(e.f < kPenaltyBase))
                continue;
            const Trajectory tr = decode(e.y, c.problem);
            const double v = tr.v_inf_launch.norm();
            const bool envelope = launch_year(tr) == 2009 && v >= 3.5 && v <= 4.3 && tr.tof_days >= 1950.0 &&
                                  tr.tof_days <= 2350.0;
            if (envelope)
                closest_dsm = std::min(closest_dsm, tr.dv_dsm_total);
            found += envelope && tr.dv_dsm_total <= 0.3;
        }
    std::ostringstream d;
    d << found << " archived solutions in the envelope with DSM <= 0.3 km/s; lowest DSM in the launch/TOF envelope "
      << (closest_dsm < 1e9 ? fmt("%.3f", closest_dsm) : std::string("n/a")) << " km/s; best total "
      << fmt("%.3f", c.best);
    return {found > 0, d.str()};
}

Outcome criterion6()
{
    // Evolutionary step only: no branching and no local polish.
    const CaseRuns c = run_case("asteroid_1989ml.json", 5, [](SearchParams &p) {
        p.branch_levels = 0;
        p.polish_fraction = 0.0;
        p.max_evals = 100000;
    });
    int seeds_ok = 0;
    double fastest = 0.0;
    for (const auto &r : c.runs)
    {
        bool ok = false;
        for (const ArchiveEntry &e : r.archive.entries())
        {
            if (!(e.f < kPenaltyBase))
                continue;
            const Trajectory tr = decode(e.y, c.problem);
            if (launch_year(tr) == 2011)
            {
                fastest = std::max(fastest, tr.dv_arrival);
                ok = ok || tr.dv_arrival >= 13.0;
            }
        }
        seeds_ok += ok;
    }
    std::ostringstream d;
    d << seeds_ok << "/5 seeds hold a feasible 2011 launch with impact v_inf >= 13 km/s; fastest "
      << fmt("%.2f", fastest) << " km/s";
    return {seeds_ok > 0, d.str()};
}

Outcome criterion7()
{
    const fs::path path = source_dir() / "problems" / "cassini.json";
    const MgaProblem problem = load_problem_file(path);
    const BoxProblem box = make_box_problem(problem);
    int wins = 0;
    std::ostringstream d;
    d << "EB vs multistart:";
    for (int s = 1; s <= 5; ++s)
    {
        MultistartOptions ms;
        ms.n_samples = 100;
        ms.n_best = 3;
        ms.n_runs = 30;
        ms.seed = static_cast<std::uint64_t>(s);
        ms.max_evals = 1600000;
        const MultistartReport m = multistart(box, ms);

        SearchParams p = load_search_params_file(path);
        p.seed = static_cast<std::uint64_t>(s);
        p.max_evals = m.evals;
        const SearchResult r = run_search(box, p);
        const double eb = r.archive.best_f(), base = m.minima.best_f();
        wins += eb <= base && r.evals <= m.evals;
        std::printf("    seed %d: EB %.4f (%lld evals), multistart %.4f (%lld evals)\n", s, eb,
                    static_cast<long long>(r.evals), base, static_cast<long long>(m.evals));
        std::fflush(stdout);
        d << ' ' << fmt("%.2f", eb) << '/' << fmt("%.2f", base);
    }
    d << "; EB better or equal in " << wins << "/5 (target >= 4)";
    return {wins >= 4, d.str()};
}

double box_volume(const Subdomain &s)
{
    double v = 1.0;
    for (std::size_t i = 0; i < s.lower.size(); ++i)
        v *= s.upper[i] - s.lower[i];
    return v;
}

BoxProblem sphere5()
{
    BoxProblem p;
    p.lower.assign(5, -5.0);
    p.upper.assign(5, 5.0);
    p.objective = [](std::span<const double> y) {
        double s = 0.0;
        for (double v : y)
            s += v * v;
        return s;
    };
    return p;
}

BoxProblem rastrigin5()
{
    BoxProblem p;
    p.lower.assign(5, -5.12);
    p.upper.assign(5, 5.12);
    p.objective = [](std::span<const double> y) {
        double s = 50.0;
        for (double v : y)
            s += v * v - 10.0 * std::cos(kTwoPi * v);
        return s;
    };
    return p;
}

Outcome criterion8()
{
    const SearchParams params;
    const bool doubling = std::abs(expanded_radius(0.1, 1, params) - 0.2) < 1e-15;

    Subdomain parent;
    parent.lower = {0.0, 0.0};
    parent.upper = {1.0, 1.0};
    EvolveResult r;
    r.dimension = 2;
    r.trace_y = {0.1, 0.2, 0.3, 0.4};
    r.trace_f = {1.0, 3.0};
    r.f_best = 1.0;
    r.f_worst = 3.0;
    const std::vector<double> lo{0.5, 0.0}, hi{1.0, 1.0}, full_lo{0.0, 0.0};
    const bool empty_phi = score_node(lo, hi, parent, r, 0.5).phi == 1.0;
    const NodeScore w = score_node(full_lo, hi, parent, r, 1.0), f = score_node(full_lo, hi, parent, r, 0.0);
    const bool endpoints = w.psi == w.omega && f.psi == f.phi;

    // Partition and determinism on a multi-level search.
    const BoxProblem p = rastrigin5();
    SearchParams sp;
    sp.n_pop = 20;
    sp.n_e = 10;
    sp.max_evals = 60000;
    sp.node_fraction = 0.05;
    sp.branch_levels = 20;
    sp.seed = 3;
    const SearchResult a = run_search(p, sp);
    const SearchResult b = run_search(p, sp);
    double worst_tiling = 0.0;
    int branched = 0;
    for (const Subdomain &n : a.nodes)
    {
        double kids = 0.0;
        int count = 0;
        for (const Subdomain &c : a.nodes)
            if (c.parent == n.id && c.id != n.id)
            {
                kids += box_volume(c);
                ++count;
            }
        if (count == 0)
            continue;
        ++branched;
        worst_tiling = std::max(worst_tiling, std::abs(kids - box_volume(n)) / box_volume(n));
    }
    bool same = a.archive.size() == b.archive.size() && a.evals == b.evals;
    for (std::size_t k = 0; same && k < a.archive.size(); ++k)
        same = a.archive.entries()[k].y == b.archive.entries()[k].y &&
               a.archive.entries()[k].f == b.archive.entries()[k].f;

    std::ostringstream d;
    d << "rho doubling " << (doubling ? "ok" : "bad") << ", empty phi " << (empty_phi ? "ok" : "bad")
      << ", psi endpoints " << (endpoints ? "ok" : "bad") << ", " << branched << " branchings tile within "
      << worst_tiling << ", rerun " << (same ? "bit-identical" : "differs");
    return {doubling && empty_phi && endpoints && branched > 0 && worst_tiling <= 1e-12 && same, d.str()};
}

Outcome criterion9()
{
    int sphere_ok = 0, rastrigin_ok = 0;
    double sphere_worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed)
    {
        SearchParams p;
        p.n_pop = 20;
        p.n_e = 10;
        p.seed = seed;
        const BoxProblem s = sphere5();
        Subdomain root;
        root.lower = s.lower;
        root.upper = s.upper;
        const EvolveResult rs = evolve(root, s, p, 20000 - p.n_pop, 1);
        sphere_worst = std::max(sphere_worst, rs.archive.best_f());
        sphere_ok += rs.archive.best_f() < 1e-4 && rs.evals <= 20000;

        p.stall_generations = 0;
        const BoxProblem q = rastrigin5();
        root.lower = q.lower;
        root.upper = q.upper;
        const EvolveResult rr = evolve(root, q, p, 100000 - p.n_pop, 1);
        rastrigin_ok += rr.archive.best_f() < 1.0 && rr.evals <= 100000;
    }
    std::ostringstream d;
    d << "sphere " << sphere_ok << "/10 (worst " << sphere_worst << "), rastrigin " << rastrigin_ok << "/10";
    return {sphere_ok == 10 && rastrigin_ok >= 8, d.str()};
}

}  // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Acceptance criteria"};
    int only = 0;
    app.add_option("--criterion", only, "Run a single criterion (1-9)")->check(CLI::Range(1, 9));
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3,
                                                         criterion4, criterion5, criterion6,
                                                         criterion7, criterion8, criterion9};
    int failed = 0;
    for (int k = 1; k <= 9; ++k)
    {
        if (only != 0 && k != only)
            continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try
        {
            o = criteria[static_cast<std::size_t>(k - 1)]();
        }
        catch (const std::exception &e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = seconds_since(start);
        std::printf("criterion %d: %s  %s  [%.1f s]\n", k, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
