#include "mga/optimizer.hpp"
#include "mga/report.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

#include <charconv>
#include <fstream>
#include <sstream>

using namespace mga;
using testing_support::source_path;

namespace
{

std::filesystem::path scratch(const std::string &name)
{
    const auto dir = std::filesystem::temp_directory_path() / "mga_report_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::vector<std::string> read_lines(const std::filesystem::path &path)
{
    std::ifstream in(path);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);)
        lines.push_back(line);
    return lines;
}

std::vector<std::string> split(const std::string &line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');)
        out.push_back(cell);
    return out;
}

double parse(const std::string &s)
{
    double v = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), v);
    return v;
}

SearchResult small_cassini_run(const MgaProblem &problem)
{
    SearchParams params;
    params.max_evals = 20000;
    return run_search(make_box_problem(problem), params);
}

}  // namespace

TEST_CASE("number formatting reads back exactly")
{
    for (double v : {0.1, -861.5420964452884, 1e-300, 12345678.9, 2.0 / 3.0})
        CHECK(parse(format_double(v)) == v);
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("archive files round-trip through re-evaluation")
{
    const MgaProblem problem = load_problem_file(source_path("problems/cassini.json"));
    const SearchResult r = small_cassini_run(problem);
    REQUIRE_FALSE(r.archive.empty());

    const auto json_path = scratch("archive.json");
    write_archive_json(json_path, r.archive, problem);
    const auto entries = read_archive_json(json_path);
    REQUIRE(entries.size() == r.archive.size());
    for (std::size_t k = 0; k < entries.size(); ++k)
    {
        CHECK(entries[k].y == r.archive.entries()[k].y);
        const double f = objective(entries[k].y, problem);
        CHECK(std::abs(f - entries[k].f) <= 1e-9 * std::max(1.0, std::abs(f)));
    }

    const auto csv_path = scratch("archive.csv");
    write_archive_csv(csv_path, r.archive, problem);
    const auto lines = read_lines(csv_path);
    REQUIRE(lines.size() == r.archive.size() + 1);
    const auto header = split(lines[0]);
    const std::size_t n = problem.dimension();
    for (std::size_t k = 1; k < lines.size(); ++k)
    {
        const auto cells = split(lines[k]);
        REQUIRE(cells.size() == header.size());
        std::vector<double> y;
        for (std::size_t i = cells.size() - n; i < cells.size(); ++i)
            y.push_back(parse(cells[i]));
        CHECK(std::abs(objective(y, problem) - parse(cells[1])) <= 1e-9 * std::max(1.0, parse(cells[1])));
    }
    // Launch date column in DD/MM/YY.
    CHECK(split(lines[1])[4].size() == 8);
    CHECK(split(lines[1])[4].substr(6) == "97");
}

TEST_CASE("grid csv matches the library grid exactly")
{
    GridSpec spec;
    spec.t0_min = 0.0;
    spec.t0_max = 500.0;
    spec.tof_min = 150.0;
    spec.tof_max = 350.0;
    spec.n_t0 = 2;
    spec.n_tof = 2;
    const GridResult grid = grid_scan(spec, testing_support::default_catalog());
    const auto path = scratch("grid.csv");
    write_grid_csv(path, grid);
    const auto lines = read_lines(path);
    REQUIRE(lines.size() == 5);
    CHECK(lines[0] == "t0_mjd2000,tof_days,dv_total_kms");
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
        {
            const auto cells = split(lines[1 + i * 2 + j]);
            CHECK(parse(cells[0]) == grid.t0[i]);
            CHECK(parse(cells[1]) == grid.tof[j]);
            CHECK(parse(cells[2]) == grid.at(i, j));
        }
}

TEST_CASE("scatter rows collapse duplicate minima")
{
    const MgaProblem problem = load_problem(R"({
  "catalog": "data/catalog.json",
  "sequence": [3, 4],
  "bounds": {"v_inf": [0, 5], "t0": [0, 800], "T": [[100, 400]], "h": []}
})",
                                            MGA_SOURCE_DIR);
    const BoxProblem box = make_box_problem(problem);
    SearchParams params;
    params.n_pop = 10;
    params.n_e = 5;
    params.max_evals = 3000;
    const SearchResult r = run_search(box, params);

    const auto once = scratch("scatter_once.csv");
    write_scatter_csv(once, r.archive, problem);
    SolutionArchive twice = r.archive;
    twice.merge(r.archive);
    const auto doubled = scratch("scatter_twice.csv");
    write_scatter_csv(doubled, twice, problem);

    const auto a = read_lines(once), b = read_lines(doubled);
    CHECK(a.size() >= 2);
    CHECK(a == b);
    CHECK(a[0] == "t0_mjd2000,dv_total_kms,sequence,tof1_days");
}

TEST_CASE("manifest is written in one piece")
{
    RunManifest m;
    m.command = "search";
    m.seed = 3;
    m.evals = 10;
    m.budget = 12;
    m.params["sigma"] = 0.5;
    const auto path = scratch("manifest.json");
    write_manifest(path, m);
    auto tmp = path;
    tmp += ".tmp";
    CHECK(std::filesystem::exists(path));
    CHECK_FALSE(std::filesystem::exists(tmp));
    const auto lines = read_lines(path);
    REQUIRE_FALSE(lines.empty());
    CHECK(lines.front() == "{");
}
