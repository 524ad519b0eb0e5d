#pragma once

#include "mga/search_space.hpp"
#include "mga/trajectory.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace mga
{

/// Shortest decimal text that reads back to the same double; locale independent.
std::string format_double(double value);

/// archive.json: every entry with its full vector and, when it decodes, the per-leg
/// breakdown (dates as MJD2000 and DD/MM/YY).
void write_archive_json(const std::filesystem::path &path, const SolutionArchive &archive, const MgaProblem &problem);

/// Entries of an archive.json in file order. Throws ValidationError on malformed files.
std::vector<ArchiveEntry> read_archive_json(const std::filesystem::path &path);

/// archive.csv: one flat row per entry, summary columns then the raw vector.
void write_archive_csv(const std::filesystem::path &path, const SolutionArchive &archive, const MgaProblem &problem);

/// Header `t0_mjd2000,tof_days,dv_total_kms`, rows in the grid's row-major order.
void write_grid_csv(const std::filesystem::path &path, const GridResult &grid);

/// Launch date against total cost, one row per feasible entry, with the visited
/// sequence and the phase times of flight.
void write_scatter_csv(const std::filesystem::path &path, const SolutionArchive &archive, const MgaProblem &problem);

struct RunManifest
{
    std::string command;
    std::string problem_path;
    std::string catalog_path;
    std::uint64_t seed{0};
    std::map<std::string, double> params;
    std::string started_utc;
    std::string finished_utc;
    std::int64_t evals{0};
    std::int64_t budget{0};
    std::vector<std::string> artifacts;
};

/// Writes to a temporary sibling and renames it into place.
void write_manifest(const std::filesystem::path &path, const RunManifest &manifest);

/// Current time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp();

}  // namespace mga
