#include "mga/baseline.hpp"
#include "mga/epoch.hpp"
#include "mga/optimizer.hpp"
#include "mga/report.hpp"
#include "mga/trajectory.hpp"

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace mga;

namespace
{

py::dict trajectory_summary(const MgaProblem &problem, const std::vector<double> &y)
{
    const Trajectory tr = decode(y, problem);
    py::list sequence, legs, flybys;
    for (int id : tr.sequence)
        sequence.append(problem.catalog->body(id).name);
    for (const Leg &leg : tr.legs)
    {
        py::dict d;
        d["from"] = problem.catalog->body(leg.from_id).name;
        d["to"] = problem.catalog->body(leg.to_id).name;
        d["departure_mjd2000"] = leg.departure.epoch.mjd2000;
        d["tof_days"] = leg.tof_days;
        d["eps"] = leg.eps;
        d["dsm_kms"] = leg.dv_dsm.norm();
        d["arrival_mjd2000"] = leg.arrival_epoch.mjd2000;
        d["v_inf_arrival_kms"] = leg.v_inf_arrival.norm();
        legs.append(d);
    }
    for (std::size_t k = 0; k < tr.flybys.size(); ++k)
    {
        const FlybyGeometry &fb = tr.flybys[k];
        py::dict d;
        d["body"] = problem.catalog->body(tr.legs[k].to_id).name;
        d["eta_rad"] = fb.eta;
        d["h_radii"] = fb.h_norm;
        d["turn_deg"] = fb.gamma * 180.0 / kPi;
        d["v_inf_kms"] = fb.v_in_rel.norm();
        flybys.append(d);
    }
    const Epoch launch = tr.legs.front().departure.epoch;
    py::dict out;
    out["sequence"] = sequence;
    out["launch_mjd2000"] = launch.mjd2000;
    out["launch_date"] = format_ddmmyy(launch);
    out["v_inf_launch_kms"] = tr.v_inf_launch.norm();
    out["dv_launch_kms"] = tr.dv_launch;
    out["dv_dsm_total_kms"] = tr.dv_dsm_total;
    out["v_inf_arrival_kms"] = tr.dv_arrival;
    out["total_dv_kms"] = trajectory_cost(tr, problem);
    out["tof_days"] = tr.tof_days;
    out["legs"] = legs;
    out["flybys"] = flybys;
    return out;
}

py::list archive_list(const SolutionArchive &archive)
{
    py::list out;
    for (const ArchiveEntry &e : archive.entries())
        out.append(py::make_tuple(e.y, e.f));
    return out;
}

// Python callables need the GIL for every evaluation; the search itself runs without it.
BoxProblem callable_problem(py::function f, std::vector<double> lower, std::vector<double> upper)
{
    BoxProblem box;
    box.lower = std::move(lower);
    box.upper = std::move(upper);
    box.objective = [f = std::move(f)](std::span<const double> y) {
        py::gil_scoped_acquire gil;
        return f(std::vector<double>(y.begin(), y.end())).cast<double>();
    };
    return box;
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Multiple gravity assist trajectory models and global search";

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<LambertError>(m, "LambertError", error.ptr());
    py::register_exception<KeplerError>(m, "KeplerError", error.ptr());
    py::register_exception<FlybyError>(m, "FlybyError", error.ptr());

    m.attr("PENALTY") = kPenaltyBase;

    py::class_<BodyCatalog, std::shared_ptr<BodyCatalog>>(m, "Catalog")
        .def_static(
            "load", [](const std::filesystem::path &path) { return std::make_shared<BodyCatalog>(load_catalog_file(path)); },
            py::arg("path"))
        .def_property_readonly("central_mu", &BodyCatalog::central_mu)
        .def("__len__", &BodyCatalog::size)
        .def("__contains__", &BodyCatalog::contains)
        .def("name", [](const BodyCatalog &c, int id) { return c.body(id).name; }, py::arg("id"))
        .def("id", [](const BodyCatalog &c, const std::string &name) { return c.by_name(name).id; }, py::arg("name"))
        .def("orbital_period_days", &BodyCatalog::orbital_period_days, py::arg("id"))
        .def(
            "position",
            [](const BodyCatalog &c, int id, double mjd2000) {
                const Vec3 r = body_state(c, id, Epoch{mjd2000}).r;
                return std::vector<double>{r.x(), r.y(), r.z()};
            },
            py::arg("id"), py::arg("mjd2000"))
        .def(
            "velocity",
            [](const BodyCatalog &c, int id, double mjd2000) {
                const Vec3 v = body_state(c, id, Epoch{mjd2000}).v;
                return std::vector<double>{v.x(), v.y(), v.z()};
            },
            py::arg("id"), py::arg("mjd2000"));

    py::class_<MgaProblem>(m, "Problem")
        .def_static(
            "load",
            [](const std::filesystem::path &path, std::shared_ptr<BodyCatalog> catalog) {
                return load_problem_file(path, catalog);
            },
            py::arg("path"), py::arg("catalog") = nullptr)
        .def_readonly("name", &MgaProblem::name)
        .def_property_readonly("dimension", &MgaProblem::dimension)
        .def_property_readonly("n_phases", &MgaProblem::n_phases)
        .def_readonly("lower", &MgaProblem::lower)
        .def_readonly("upper", &MgaProblem::upper)
        .def_property_readonly("variables", [](const MgaProblem &p) { return p.layout.names; })
        .def(
            "objective", [](const MgaProblem &p, const std::vector<double> &y) { return objective(y, p); },
            py::arg("y"))
        .def("decode", &trajectory_summary, py::arg("y"),
             "Per-leg breakdown of y as a dict. Raises when the trajectory cannot be built.");

    py::class_<SearchParams>(m, "SearchParams")
        .def(py::init<>())
        .def_static(
            "from_problem_file", [](const std::filesystem::path &path) { return load_search_params_file(path); },
            py::arg("path"), "Defaults overridden by the file's optimizer block, if any.")
        .def_readwrite("n_pop", &SearchParams::n_pop)
        .def_readwrite("n_e", &SearchParams::n_e)
        .def_readwrite("sigma", &SearchParams::sigma)
        .def_readwrite("max_evals", &SearchParams::max_evals)
        .def_readwrite("node_fraction", &SearchParams::node_fraction)
        .def_readwrite("branch_levels", &SearchParams::branch_levels)
        .def_readwrite("crowding_threshold", &SearchParams::crowding_threshold)
        .def_readwrite("theta", &SearchParams::theta)
        .def_readwrite("eps_radius", &SearchParams::eps_radius)
        .def_readwrite("rho_initial", &SearchParams::rho_initial)
        .def_readwrite("stall_generations", &SearchParams::stall_generations)
        .def_readwrite("four_node_branching", &SearchParams::four_node_branching)
        .def_readwrite("polish_fraction", &SearchParams::polish_fraction)
        .def_readwrite("polish_starts", &SearchParams::polish_starts)
        .def_readwrite("archive_capacity", &SearchParams::archive_capacity)
        .def_readwrite("seed", &SearchParams::seed)
        .def("validate", &SearchParams::validate);

    py::class_<SearchResult>(m, "SearchResult")
        .def_property_readonly("entries", [](const SearchResult &r) { return archive_list(r.archive); },
                               "Archive as (y, f) pairs, best first.")
        .def_property_readonly("best_f", [](const SearchResult &r) { return r.archive.best_f(); })
        .def_property_readonly("best_y", [](const SearchResult &r) {
            return r.archive.empty() ? std::vector<double>{} : r.archive.best().y;
        })
        .def_readonly("evals", &SearchResult::evals)
        .def_readonly("polish_evals", &SearchResult::polish_evals)
        .def_readonly("branchings", &SearchResult::branchings)
        .def_readonly("best_history", &SearchResult::best_history)
        .def_property_readonly("n_nodes", [](const SearchResult &r) { return r.nodes.size(); })
        .def(
            "write",
            [](const SearchResult &r, const std::filesystem::path &dir, const MgaProblem &problem) {
                write_archive_json(dir / "archive.json", r.archive, problem);
                write_archive_csv(dir / "archive.csv", r.archive, problem);
            },
            py::arg("dir"), py::arg("problem"), "Writes archive.json and archive.csv into dir.");

    m.def(
        "search",
        [](const MgaProblem &problem, const SearchParams &params) {
            const BoxProblem box = make_box_problem(problem);
            py::gil_scoped_release release;
            return run_search(box, params);
        },
        py::arg("problem"), py::arg("params") = SearchParams{}, "Evolutionary-branching search on a trajectory problem.");

    m.def(
        "minimize",
        [](py::function f, std::vector<double> lower, std::vector<double> upper, const SearchParams &params) {
            const BoxProblem box = callable_problem(std::move(f), std::move(lower), std::move(upper));
            py::gil_scoped_release release;
            return run_search(box, params);
        },
        py::arg("f"), py::arg("lower"), py::arg("upper"), py::arg("params") = SearchParams{},
        "Same search on any Python objective f(list) -> float over a box.");

    py::class_<MultistartReport>(m, "MultistartReport")
        .def_property_readonly("entries", [](const MultistartReport &r) { return archive_list(r.minima); })
        .def_property_readonly("best_f", [](const MultistartReport &r) { return r.minima.best_f(); })
        .def_readonly("evals", &MultistartReport::evals)
        .def_readonly("samples_drawn", &MultistartReport::samples_drawn)
        .def_readonly("run_best", &MultistartReport::run_best);

    m.def(
        "multistart",
        [](const MgaProblem &problem, std::size_t samples, std::size_t best, std::size_t runs, std::uint64_t seed,
           std::int64_t max_evals) {
            MultistartOptions o;
            o.n_samples = samples;
            o.n_best = best;
            o.n_runs = runs;
            o.seed = seed;
            o.max_evals = max_evals;
            const BoxProblem box = make_box_problem(problem);
            py::gil_scoped_release release;
            return multistart(box, o);
        },
        py::arg("problem"), py::arg("samples") = 100, py::arg("best") = 3, py::arg("runs") = 30, py::arg("seed") = 1,
        py::arg("max_evals") = 0, "Latin hypercube sampling with local refinement of the best samples.");

    m.def(
        "grid",
        [](const BodyCatalog &catalog, int p1, int p2, std::pair<double, double> t0, std::pair<double, double> tof,
           int resolution, const std::string &mode) {
            GridSpec spec;
            spec.p1 = p1;
            spec.p2 = p2;
            spec.t0_min = t0.first;
            spec.t0_max = t0.second;
            spec.tof_min = tof.first;
            spec.tof_max = tof.second;
            spec.n_t0 = resolution;
            spec.n_tof = resolution;
            if (mode == "three-impulse")
                spec.mode = GridMode::three_impulse_best_eps;
            else if (mode != "two-impulse")
                throw ValidationError("mode must be two-impulse or three-impulse");
            GridResult g;
            {
                py::gil_scoped_release release;
                g = grid_scan(spec, catalog);
            }
            py::array_t<double> dv({g.t0.size(), g.tof.size()});
            std::copy(g.dv.begin(), g.dv.end(), dv.mutable_data());
            return py::make_tuple(py::array_t<double>(g.t0.size(), g.t0.data()),
                                  py::array_t<double>(g.tof.size(), g.tof.data()), dv);
        },
        py::arg("catalog"), py::arg("p1"), py::arg("p2"), py::arg("t0"), py::arg("tof"), py::arg("resolution") = 100,
        py::arg("mode") = "two-impulse", "Returns (t0, tof, dv) with dv[i, j] the cost at (t0[i], tof[j]).");

    m.def(
        "two_impulse_cost",
        [](const BodyCatalog &catalog, int p1, int p2, double t0, double tof_days) {
            return two_impulse_cost(Epoch{t0}, tof_days, p1, p2, catalog);
        },
        py::arg("catalog"), py::arg("p1"), py::arg("p2"), py::arg("t0"), py::arg("tof_days"));

    m.def(
        "mjd2000", [](int year, int month, int day) { return from_calendar(year, month, day).mjd2000; },
        py::arg("year"), py::arg("month"), py::arg("day"));
    m.def(
        "date", [](double mjd2000) { return format_iso_date(Epoch{mjd2000}); }, py::arg("mjd2000"));
}
