#include "mga/baseline.hpp"
#include "mga/optimizer.hpp"
#include "mga/report.hpp"
#include "mga/trajectory.hpp"
#include "mga/types.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace mga;

namespace
{

struct Common
{
    std::string problem;
    std::string catalog;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> max_evals;
    std::optional<int> pop;
    std::optional<int> filter;
    std::optional<int> branch_levels;
    std::optional<double> sigma;
    std::string out_dir{"."};
};

void add_problem_flags(CLI::App *cmd, Common &c)
{
    cmd->add_option("--problem", c.problem, "Problem file (JSON)")->required();
    cmd->add_option("--catalog", c.catalog, "Body catalog replacing the problem's own");
    cmd->add_option("--seed", c.seed, "Random seed");
    cmd->add_option("--max-evals", c.max_evals, "Objective evaluation budget");
    cmd->add_option("--out-dir", c.out_dir, "Directory for the output files");
}

void add_search_flags(CLI::App *cmd, Common &c)
{
    cmd->add_option("--pop", c.pop, "Population size");
    cmd->add_option("--filter", c.filter, "Filter size (best individuals that perceive)");
    cmd->add_option("--branch-levels", c.branch_levels, "Branchings without improvement before stopping");
    cmd->add_option("--sigma", c.sigma, "Weight of density against fitness when ranking nodes");
}

std::shared_ptr<const BodyCatalog> catalog_override(const Common &c)
{
    if (c.catalog.empty())
        return nullptr;
    return std::make_shared<const BodyCatalog>(load_catalog_file(c.catalog));
}

SearchParams search_params(const Common &c)
{
    SearchParams p = load_search_params_file(c.problem);
    if (c.seed)
        p.seed = *c.seed;
    if (c.max_evals)
        p.max_evals = *c.max_evals;
    if (c.pop)
        p.n_pop = *c.pop;
    if (c.filter)
        p.n_e = *c.filter;
    if (c.branch_levels)
        p.branch_levels = *c.branch_levels;
    if (c.sigma)
        p.sigma = *c.sigma;
    p.validate();
    return p;
}

RunManifest manifest_for(const std::string &command, const Common &c, const SearchParams &p)
{
    RunManifest m;
    m.command = command;
    m.problem_path = c.problem;
    m.catalog_path = c.catalog;
    m.seed = p.seed;
    m.params = {{"n_pop", p.n_pop},
                {"n_e", p.n_e},
                {"sigma", p.sigma},
                {"max_evals", static_cast<double>(p.max_evals)},
                {"branch_levels", p.branch_levels},
                {"crowding_threshold", p.crowding_threshold},
                {"theta", p.theta},
                {"eps_radius", p.eps_radius}};
    m.started_utc = utc_timestamp();
    return m;
}

void write_archives(const fs::path &dir, const SolutionArchive &archive, const MgaProblem &problem,
                    RunManifest &m)
{
    write_archive_json(dir / "archive.json", archive, problem);
    write_archive_csv(dir / "archive.csv", archive, problem);
    m.artifacts.push_back((dir / "archive.json").string());
    m.artifacts.push_back((dir / "archive.csv").string());
}

void finish(const fs::path &dir, RunManifest &m)
{
    m.finished_utc = utc_timestamp();
    m.artifacts.push_back((dir / "manifest.json").string());
    write_manifest(dir / "manifest.json", m);
}

void print_best(const SolutionArchive &archive, const MgaProblem &problem, std::int64_t evals)
{
    if (archive.empty())
    {
        std::printf("no solutions, %lld evaluations\n", static_cast<long long>(evals));
        return;
    }
    const ArchiveEntry &best = archive.best();
    std::string launch = "-";
    try
    {
        launch = format_ddmmyy(decode(best.y, problem).legs.front().departure.epoch);
    }
    catch (const Error &)
    {
    }
    std::printf("best %.6f km/s  launch %s  entries %zu  evaluations %lld\n", best.f, launch.c_str(), archive.size(),
                static_cast<long long>(evals));
}

int cmd_search(const Common &c)
{
    const MgaProblem problem = load_problem_file(c.problem, catalog_override(c));
    const SearchParams p = search_params(c);
    RunManifest m = manifest_for("search", c, p);
    const SearchResult r = run_search(make_box_problem(problem), p);
    m.evals = r.evals;
    m.budget = p.max_evals;
    m.params["branchings"] = r.branchings;
    m.params["polish_evals"] = static_cast<double>(r.polish_evals);
    const fs::path dir = c.out_dir;
    write_archives(dir, r.archive, problem, m);
    finish(dir, m);
    print_best(r.archive, problem, r.evals);
    return 0;
}

int cmd_characterize(const Common &c, int runs)
{
    if (runs < 1)
        throw ValidationError("--runs must be at least 1");
    const MgaProblem problem = load_problem_file(c.problem, catalog_override(c));
    const BoxProblem box = make_box_problem(problem);
    SearchParams p = search_params(c);
    RunManifest m = manifest_for("characterize", c, p);
    m.params["runs"] = runs;
    SolutionArchive merged(box.lower, box.upper, p.crowding_threshold, p.archive_capacity * static_cast<std::size_t>(runs));
    const std::uint64_t first = p.seed;
    for (int k = 0; k < runs; ++k)
    {
        p.seed = first + static_cast<std::uint64_t>(k);
        const SearchResult r = run_search(box, p);
        merged.merge(r.archive);
        m.evals += r.evals;
        std::printf("run %d seed %llu best %.6f\n", k + 1, static_cast<unsigned long long>(p.seed),
                    r.archive.best_f());
    }
    m.budget = p.max_evals * runs;
    const fs::path dir = c.out_dir;
    write_archives(dir, merged, problem, m);
    write_scatter_csv(dir / "scatter.csv", merged, problem);
    m.artifacts.push_back((dir / "scatter.csv").string());
    finish(dir, m);
    print_best(merged, problem, m.evals);
    return 0;
}

int cmd_baseline(const Common &c, const MultistartOptions &base)
{
    const MgaProblem problem = load_problem_file(c.problem, catalog_override(c));
    MultistartOptions o = base;
    if (c.seed)
        o.seed = *c.seed;
    if (c.max_evals)
    {
        if (*c.max_evals <= 0)
            throw ValidationError("--max-evals must be positive");
        o.max_evals = *c.max_evals;
    }
    RunManifest m;
    m.started_utc = utc_timestamp();
    const MultistartReport r = multistart(make_box_problem(problem), o);

    m.command = "baseline";
    m.problem_path = c.problem;
    m.catalog_path = c.catalog;
    m.seed = o.seed;
    m.params = {{"samples", static_cast<double>(o.n_samples)},
                {"best", static_cast<double>(o.n_best)},
                {"runs", static_cast<double>(o.n_runs)},
                {"max_evals", static_cast<double>(o.max_evals)}};
    m.evals = r.evals;
    m.budget = o.max_evals;
    const fs::path dir = c.out_dir;
    write_archives(dir, r.minima, problem, m);
    finish(dir, m);
    print_best(r.minima, problem, r.evals);
    return 0;
}

struct GridFlags
{
    int p1{3};
    int p2{4};
    std::pair<double, double> t0{0.0, 0.0};
    std::pair<double, double> tof{0.0, 0.0};
    int resolution{100};
    std::string mode{"two-impulse"};
    std::string catalog;
    std::string out;
};

int cmd_grid(const GridFlags &g)
{
    if (g.resolution < 2)
        throw ValidationError("--resolution must be at least 2");
    GridSpec spec;
    spec.p1 = g.p1;
    spec.p2 = g.p2;
    spec.t0_min = g.t0.first;
    spec.t0_max = g.t0.second;
    spec.tof_min = g.tof.first;
    spec.tof_max = g.tof.second;
    spec.n_t0 = g.resolution;
    spec.n_tof = g.resolution;
    if (g.mode == "three-impulse")
        spec.mode = GridMode::three_impulse_best_eps;
    else if (g.mode != "two-impulse")
        throw ValidationError("--mode must be two-impulse or three-impulse");
    const BodyCatalog catalog = load_catalog_file(g.catalog);
    const GridResult grid = grid_scan(spec, catalog);
    write_grid_csv(g.out, grid);
    std::printf("wrote %zu rows to %s\n", grid.dv.size(), g.out.c_str());
    return 0;
}

}  // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Multiple gravity assist trajectory search"};
    app.require_subcommand(1);

    Common common;
    auto *search = app.add_subcommand("search", "Run the evolutionary-branching search on a problem");
    add_problem_flags(search, common);
    add_search_flags(search, common);

    int runs = 5;
    auto *characterize =
        app.add_subcommand("characterize", "Repeat the search over consecutive seeds and export the minima");
    add_problem_flags(characterize, common);
    add_search_flags(characterize, common);
    characterize->add_option("--runs", runs, "Number of seeded runs")->capture_default_str();

    MultistartOptions ms;
    auto *baseline = app.add_subcommand("baseline", "Latin hypercube multistart with local refinement");
    add_problem_flags(baseline, common);
    baseline->add_option("--samples", ms.n_samples, "Samples per run")->capture_default_str();
    baseline->add_option("--best", ms.n_best, "Samples refined per run")->capture_default_str();
    baseline->add_option("--runs", ms.n_runs, "Independent runs")->capture_default_str();

    GridFlags grid;
    auto *grid_cmd = app.add_subcommand("grid", "Two-body launch date / flight time cost grid");
    grid_cmd->add_option("--catalog", grid.catalog, "Body catalog")->required();
    grid_cmd->add_option("--p1", grid.p1, "Departure body id")->capture_default_str();
    grid_cmd->add_option("--p2", grid.p2, "Arrival body id")->capture_default_str();
    grid_cmd->add_option("--t0", grid.t0, "Launch window MIN MAX (MJD2000)")->required();
    grid_cmd->add_option("--tof", grid.tof, "Flight time range MIN MAX (days)")->required();
    grid_cmd->add_option("--resolution", grid.resolution, "Points per axis")->capture_default_str();
    grid_cmd->add_option("--mode", grid.mode, "two-impulse or three-impulse")->capture_default_str();
    grid_cmd->add_option("--out", grid.out, "Output CSV")->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try
    {
        if (*search)
            return cmd_search(common);
        if (*characterize)
            return cmd_characterize(common, runs);
        if (*baseline)
            return cmd_baseline(common, ms);
        return cmd_grid(grid);
    }
    catch (const ValidationError &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
