#include "mga/report.hpp"

#include "json_util.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>

namespace mga
{

namespace
{

// Keys keep insertion order so the files read like the tables they mirror.
using Json = nlohmann::ordered_json;

std::ofstream open_output(const std::filesystem::path &path)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + path.string());
    return out;
}

std::string body_name(const MgaProblem &problem, int id)
{
    return problem.catalog->body(id).name;
}

std::string sequence_text(const MgaProblem &problem, const std::vector<int> &ids)
{
    std::string s;
    for (int id : ids)
    {
        if (!s.empty())
            s += '-';
        s += body_name(problem, id);
    }
    return s;
}

Json date_json(Epoch e)
{
    return Json{{"mjd2000", e.mjd2000}, {"date", format_ddmmyy(e)}};
}

Json entry_json(const ArchiveEntry &entry, const MgaProblem &problem)
{
    Json j;
    j["f"] = entry.f;
    j["y"] = entry.y;
    j["feasible"] = entry.f < kPenaltyBase;
    try
    {
        const Trajectory tr = decode(entry.y, problem);
        j["sequence"] = sequence_text(problem, tr.sequence);
        j["launch"] = date_json(tr.legs.front().departure.epoch);
        j["v_inf_launch_kms"] = tr.v_inf_launch.norm();
        j["dv_launch_kms"] = tr.dv_launch;
        j["dv_dsm_total_kms"] = tr.dv_dsm_total;
        j["v_inf_arrival_kms"] = tr.dv_arrival;
        j["total_dv_kms"] = trajectory_cost(tr, problem);
        j["tof_days"] = tr.tof_days;
        j["arrival"] = date_json(tr.legs.back().arrival_epoch);
        Json legs = Json::array();
        for (const Leg &leg : tr.legs)
        {
            legs.push_back({{"from", body_name(problem, leg.from_id)},
                            {"to", body_name(problem, leg.to_id)},
                            {"departure", date_json(leg.departure.epoch)},
                            {"tof_days", leg.tof_days},
                            {"eps", leg.eps},
                            {"dsm", date_json(leg.dsm_epoch)},
                            {"dsm_kms", leg.dv_dsm.norm()},
                            {"arrival", date_json(leg.arrival_epoch)},
                            {"v_inf_arrival_kms", leg.v_inf_arrival.norm()}});
        }
        j["legs"] = std::move(legs);
        Json flybys = Json::array();
        for (std::size_t k = 0; k < tr.flybys.size(); ++k)
        {
            const FlybyGeometry &fb = tr.flybys[k];
            flybys.push_back({{"body", body_name(problem, tr.legs[k].to_id)},
                              {"eta_rad", fb.eta},
                              {"h_radii", fb.h_norm},
                              {"turn_deg", fb.gamma * 180.0 / kPi},
                              {"v_inf_kms", fb.v_in_rel.norm()}});
        }
        j["flybys"] = std::move(flybys);
    }
    catch (const Error &e)
    {
        j["decode_error"] = e.what();
    }
    return j;
}

}  // namespace

std::string format_double(double value)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

void write_archive_json(const std::filesystem::path &path, const SolutionArchive &archive, const MgaProblem &problem)
{
    Json root;
    root["problem"] = problem.name;
    root["variables"] = problem.layout.names;
    Json entries = Json::array();
    for (const ArchiveEntry &e : archive.entries())
        entries.push_back(entry_json(e, problem));
    root["entries"] = std::move(entries);
    open_output(path) << root.dump(2) << '\n';
}

std::vector<ArchiveEntry> read_archive_json(const std::filesystem::path &path)
{
    const std::string text = detail::read_text_file(path);
    const detail::Json root = detail::parse_json(text);
    std::vector<ArchiveEntry> out;
    try
    {
        for (const detail::Json &e : root.at("entries"))
            out.push_back({e.at("y").get<std::vector<double>>(), e.at("f").get<double>()});
    }
    catch (const detail::Json::exception &e)
    {
        throw ValidationError(path.string() + ": " + e.what());
    }
    return out;
}

void write_archive_csv(const std::filesystem::path &path, const SolutionArchive &archive, const MgaProblem &problem)
{
    std::ofstream out = open_output(path);
    out << "rank,f,feasible,t0_mjd2000,launch_date,tof_days,v_inf_launch_kms,dv_dsm_total_kms,v_inf_arrival_kms,"
           "sequence";
    for (const std::string &name : problem.layout.names)
        out << ',' << name;
    out << '\n';
    std::size_t rank = 0;
    for (const ArchiveEntry &e : archive.entries())
    {
        out << rank++ << ',' << format_double(e.f) << ',' << (e.f < kPenaltyBase ? 1 : 0);
        try
        {
            const Trajectory tr = decode(e.y, problem);
            const Epoch t0 = tr.legs.front().departure.epoch;
            out << ',' << format_double(t0.mjd2000) << ',' << format_ddmmyy(t0) << ',' << format_double(tr.tof_days)
                << ',' << format_double(tr.v_inf_launch.norm()) << ',' << format_double(tr.dv_dsm_total) << ','
                << format_double(tr.dv_arrival) << ',' << sequence_text(problem, tr.sequence);
        }
        catch (const Error &)
        {
            out << ",,,,,,,";
        }
        for (double v : e.y)
            out << ',' << format_double(v);
        out << '\n';
    }
}

void write_grid_csv(const std::filesystem::path &path, const GridResult &grid)
{
    std::ofstream out = open_output(path);
    out << "t0_mjd2000,tof_days,dv_total_kms\n";
    for (std::size_t i = 0; i < grid.t0.size(); ++i)
        for (std::size_t j = 0; j < grid.tof.size(); ++j)
            out << format_double(grid.t0[i]) << ',' << format_double(grid.tof[j]) << ','
                << format_double(grid.at(i, j)) << '\n';
}

void write_scatter_csv(const std::filesystem::path &path, const SolutionArchive &archive, const MgaProblem &problem)
{
    std::ofstream out = open_output(path);
    const int phases = problem.n_phases();
    out << "t0_mjd2000,dv_total_kms,sequence";
    for (int k = 1; k <= phases; ++k)
        out << ",tof" << k << "_days";
    out << '\n';
    for (const ArchiveEntry &e : archive.entries())
    {
        if (!(e.f < kPenaltyBase))
            continue;
        Trajectory tr;
        try
        {
            tr = decode(e.y, problem);
        }
        catch (const Error &)
        {
            continue;
        }
        out << format_double(tr.legs.front().departure.epoch.mjd2000) << ',' << format_double(e.f) << ','
            << sequence_text(problem, tr.sequence);
        for (int k = 0; k < phases; ++k)
        {
            out << ',';
            if (k < static_cast<int>(tr.legs.size()))
                out << format_double(tr.legs[static_cast<std::size_t>(k)].tof_days);
        }
        out << '\n';
    }
}

void write_manifest(const std::filesystem::path &path, const RunManifest &manifest)
{
    Json j;
    j["command"] = manifest.command;
    j["problem"] = manifest.problem_path;
    j["catalog"] = manifest.catalog_path;
    j["seed"] = manifest.seed;
    j["params"] = manifest.params;
    j["started_utc"] = manifest.started_utc;
    j["finished_utc"] = manifest.finished_utc;
    j["evals"] = manifest.evals;
    j["budget"] = manifest.budget;
    j["artifacts"] = manifest.artifacts;

    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out = open_output(tmp);
        out << j.dump(2) << '\n';
        if (!out.flush())
            throw Error("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace mga
