#include "mga/trajectory.hpp"

#include "json_util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mga
{

namespace
{

void check_range(const std::pair<double, double> &b, const std::string &what, bool allow_equal = false)
{
    if (!std::isfinite(b.first) || !std::isfinite(b.second))
        throw ValidationError("bounds for " + what + " must be finite");
    if (allow_equal ? b.first > b.second : b.first >= b.second)
        throw ValidationError("bounds for " + what + ": lower bound must be below upper bound");
}

std::string indexed(const char *base, std::size_t k)
{
    return std::string(base) + std::to_string(k + 1);
}

}  // namespace

std::vector<bool> MgaProblem::integer_mask() const
{
    std::vector<bool> mask(dimension(), false);
    for (int i = 0; i < layout.n_integer; ++i)
        mask[static_cast<std::size_t>(i)] = true;
    return mask;
}

std::vector<int> MgaProblem::resolve_sequence(std::span<const double> y) const
{
    if (!sequence.free)
        return sequence.fixed;
    std::vector<int> seq{sequence.departure};
    for (std::size_t s = 0; s < sequence.slot_bounds.size(); ++s)
    {
        const auto [lo, hi] = sequence.slot_bounds[s];
        const int id = std::clamp(static_cast<int>(std::lround(y[s])), lo, hi);
        seq.push_back(id);
        if (id == sequence.arrival)
            return seq;
    }
    seq.push_back(sequence.arrival);
    return seq;
}

MgaProblem make_problem(std::shared_ptr<const BodyCatalog> catalog, SequenceSpec sequence,
                        const ProblemBounds &bounds, const ProblemOptions &options)
{
    if (!catalog)
        throw ValidationError("problem has no body catalog");

    MgaProblem p;
    p.name = options.name;
    p.catalog = catalog;
    p.launch_mode = options.launch_mode;
    p.objective_mode = options.objective_mode;
    p.fixed_vinf_kms = options.fixed_vinf_kms;
    p.arrival_term = options.arrival_term;
    p.arrival_constraint = options.arrival_constraint;
    p.flyby_reference = options.flyby_reference;

    // Sequence.
    std::vector<std::vector<int>> flyby_candidates;  // per flyby slot, ids that may appear there
    if (sequence.free)
    {
        if (sequence.slot_bounds.empty())
            throw ValidationError("free sequence needs at least one slot");
        (void)catalog->body(sequence.departure);
        (void)catalog->body(sequence.arrival);
        for (std::size_t s = 0; s < sequence.slot_bounds.size(); ++s)
        {
            const auto [lo, hi] = sequence.slot_bounds[s];
            if (lo > hi)
                throw ValidationError("slot " + std::to_string(s + 1) + ": id bounds are reversed");
            std::vector<int> ids;
            for (int id = lo; id <= hi; ++id)
            {
                if (!catalog->contains(id))
                    throw ValidationError("slot " + std::to_string(s + 1) + ": catalog has no body with id " +
                                          std::to_string(id));
                if (id != sequence.arrival)
                    ids.push_back(id);
            }
            flyby_candidates.push_back(std::move(ids));
        }
    }
    else
    {
        if (sequence.fixed.size() < 2)
            throw ValidationError("sequence needs at least a departure and an arrival body");
        for (int id : sequence.fixed)
            if (!catalog->contains(id))
                throw ValidationError("sequence: catalog has no body with id " + std::to_string(id));
        for (std::size_t k = 1; k + 1 < sequence.fixed.size(); ++k)
            flyby_candidates.push_back({sequence.fixed[k]});
    }
    p.sequence = std::move(sequence);

    const auto n_phase = static_cast<std::size_t>(p.n_phases());
    const bool lambert_first = p.launch_mode == LaunchMode::lambert_first_leg;
    const bool fixed_launch = p.objective_mode == ObjectiveMode::fixed_launch;

    if (fixed_launch && lambert_first)
        throw ValidationError("fixed_launch objective needs the parameterized launch mode");
    if (fixed_launch && !(p.fixed_vinf_kms > 0.0 && std::isfinite(p.fixed_vinf_kms)))
        throw ValidationError("fixed_launch objective needs a positive fixed_vinf_kms");
    if (p.arrival_constraint.kind != ArrivalConstraint::Kind::none &&
        !(p.arrival_constraint.value_kms >= 0.0 && std::isfinite(p.arrival_constraint.value_kms)))
        throw ValidationError("arrival constraint value must be a non-negative number");

    const std::size_t n_eps = lambert_first ? n_phase - 1 : n_phase;
    if (bounds.T.size() != n_phase)
        throw ValidationError("expected " + std::to_string(n_phase) + " T bounds, got " +
                              std::to_string(bounds.T.size()));
    if (!bounds.eps.empty() && bounds.eps.size() != n_eps)
        throw ValidationError("expected " + std::to_string(n_eps) + " eps bounds, got " +
                              std::to_string(bounds.eps.size()));
    if (!bounds.eta.empty() && bounds.eta.size() != n_phase - 1)
        throw ValidationError("expected " + std::to_string(n_phase - 1) + " eta bounds, got " +
                              std::to_string(bounds.eta.size()));
    if (bounds.h.size() != n_phase - 1)
        throw ValidationError("expected " + std::to_string(n_phase - 1) + " h bounds, got " +
                              std::to_string(bounds.h.size()));

    VariableLayout &L = p.layout;
    auto add = [&](std::string name, std::pair<double, double> b, bool allow_equal = false) {
        check_range(b, name, allow_equal);
        L.names.push_back(std::move(name));
        p.lower.push_back(b.first);
        p.upper.push_back(b.second);
        return static_cast<int>(L.names.size()) - 1;
    };

    if (p.sequence.free)
    {
        for (std::size_t s = 0; s < p.sequence.slot_bounds.size(); ++s)
        {
            const auto [lo, hi] = p.sequence.slot_bounds[s];
            add(indexed("p", s), {static_cast<double>(lo), static_cast<double>(hi)}, true);
        }
        L.n_integer = static_cast<int>(p.sequence.slot_bounds.size());
    }

    if (!lambert_first)
    {
        if (!fixed_launch)
        {
            if (!bounds.v_inf)
                throw ValidationError("missing bounds for v_inf");
            if (bounds.v_inf->first < 0.0)
                throw ValidationError("v_inf bounds must be non-negative");
            L.v_inf = add("v_inf", *bounds.v_inf);
        }
        L.alpha = add("alpha", bounds.alpha);
        L.delta = add("delta", bounds.delta);
    }
    L.t0 = add("t0", bounds.t0);

    const std::pair<double, double> default_eps{0.01, 0.9};
    const std::pair<double, double> default_eta{0.0, kTwoPi};
    std::size_t eps_i = 0;
    for (std::size_t k = 0; k < n_phase; ++k)
    {
        if (bounds.T[k].first <= 0.0)
            throw ValidationError("T" + std::to_string(k + 1) + " bounds must be positive");
        L.T.push_back(add(indexed("T", k), bounds.T[k]));
        if (lambert_first && k == 0)
        {
            L.eps.push_back(-1);
        }
        else
        {
            const auto b = bounds.eps.empty() ? default_eps : bounds.eps[eps_i];
            ++eps_i;
            if (b.first < 0.0 || b.second >= 1.0)
                throw ValidationError(indexed("eps", k) + " bounds must lie in [0, 1)");
            L.eps.push_back(add(indexed("eps", k), b));
        }
        if (k + 1 < n_phase)
        {
            L.eta.push_back(add(indexed("eta", k), bounds.eta.empty() ? default_eta : bounds.eta[k]));
            const auto hb = bounds.h[k];
            for (int id : flyby_candidates[k])
            {
                const Body &b = catalog->body(id);
                if (b.radius <= 0.0)
                    throw ValidationError(indexed("h", k) + ": body '" + b.name + "' has no radius for a flyby");
                if (hb.first < b.min_altitude_ratio())
                    throw ValidationError(indexed("h", k) + " lower bound is below the minimum altitude of '" +
                                          b.name + "'");
            }
            L.h.push_back(add(indexed("h", k), hb));
        }
    }
    return p;
}

namespace
{

using detail::Json;

std::pair<double, double> read_pair(const Json &j, const std::string &key, std::string_view text)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ValidationError("bounds '" + key + "' must be a [lower, upper] pair", detail::line_of_key(text, key));
    return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<std::pair<double, double>> read_pairs(const Json &obj, const std::string &key, std::string_view text,
                                                  bool required)
{
    std::vector<std::pair<double, double>> out;
    const auto it = obj.find(key);
    if (it == obj.end())
    {
        if (required)
            throw ValidationError("missing bounds '" + key + "'", detail::line_of_key(text, "bounds"));
        return out;
    }
    if (!it->is_array())
        throw ValidationError("bounds '" + key + "' must be a list of pairs", detail::line_of_key(text, key));
    for (const Json &e : *it)
        out.push_back(read_pair(e, key, text));
    return out;
}

int body_ref(const Json &j, const BodyCatalog &catalog, std::string_view text, const char *key)
{
    if (j.is_number_integer())
        return j.get<int>();
    if (j.is_string())
    {
        try
        {
            return catalog.by_name(j.get<std::string>()).id;
        }
        catch (const ValidationError &e)
        {
            throw ValidationError(e.what(), detail::line_of_key(text, key));
        }
    }
    throw ValidationError(std::string("'") + key + "' entries must be body ids or names", detail::line_of_key(text, key));
}

template <typename E>
E parse_enum(const Json &root, const char *key, std::string_view text,
             std::initializer_list<std::pair<const char *, E>> options, E fallback)
{
    const auto it = root.find(key);
    if (it == root.end())
        return fallback;
    if (it->is_string())
        for (const auto &[name, value] : options)
            if (it->get<std::string>() == name)
                return value;
    std::string allowed;
    for (const auto &[name, value] : options)
        allowed += std::string(allowed.empty() ? "" : ", ") + name;
    throw ValidationError(std::string("'") + key + "' must be one of: " + allowed, detail::line_of_key(text, key));
}

}  // namespace

MgaProblem load_problem(std::string_view text, const std::filesystem::path &base_dir,
                        std::shared_ptr<const BodyCatalog> catalog_override)
{
    const Json root = detail::parse_json(text);
    if (!root.is_object())
        throw ValidationError("problem root must be an object", 1);

    std::shared_ptr<const BodyCatalog> catalog = std::move(catalog_override);
    if (!catalog)
    {
        std::filesystem::path path = detail::require<std::string>(root, "catalog", text);
        if (path.is_relative())
            path = base_dir / path;
        try
        {
            catalog = std::make_shared<const BodyCatalog>(load_catalog_file(path));
        }
        catch (const ValidationError &e)
        {
            throw ValidationError(std::string("catalog ") + path.string() + ": " + e.what(),
                                  e.line() > 0 ? 0 : detail::line_of_key(text, "catalog"));
        }
    }

    ProblemOptions opt;
    opt.name = detail::optional_field<std::string>(root, "name", "", text);
    opt.launch_mode = parse_enum(root, "launch_mode", text,
                                 {{"parameterized", LaunchMode::parameterized},
                                  {"lambert_first_leg", LaunchMode::lambert_first_leg}},
                                 LaunchMode::parameterized);
    opt.objective_mode = parse_enum(root, "objective_mode", text,
                                    {{"total_with_launch", ObjectiveMode::total_with_launch},
                                     {"fixed_launch", ObjectiveMode::fixed_launch}},
                                    ObjectiveMode::total_with_launch);
    opt.flyby_reference = parse_enum(root, "flyby_reference", text,
                                     {{"xy_normal", FlybyReference::xy_normal},
                                      {"velocity_plane_normal", FlybyReference::velocity_plane_normal}},
                                     FlybyReference::xy_normal);
    opt.fixed_vinf_kms = detail::optional_field<double>(root, "fixed_vinf_kms", 0.0, text);
    opt.arrival_term = detail::optional_field<bool>(root, "arrival_term", true, text);
    if (const auto it = root.find("arrival_constraint"); it != root.end() && !it->is_null())
    {
        const bool has_min = it->contains("min_vinf");
        const bool has_max = it->contains("max_vinf");
        if (!it->is_object() || has_min == has_max)
            throw ValidationError("arrival_constraint needs exactly one of min_vinf, max_vinf",
                                  detail::line_of_key(text, "arrival_constraint"));
        opt.arrival_constraint.kind = has_min ? ArrivalConstraint::Kind::min_vinf : ArrivalConstraint::Kind::max_vinf;
        opt.arrival_constraint.value_kms =
            detail::require<double>(*it, has_min ? "min_vinf" : "max_vinf", text);
    }

    SequenceSpec seq;
    const auto seq_it = root.find("sequence");
    if (seq_it == root.end())
        throw ValidationError("missing field 'sequence'", 0);
    if (seq_it->is_array())
    {
        for (const Json &j : *seq_it)
            seq.fixed.push_back(body_ref(j, *catalog, text, "sequence"));
    }
    else if (seq_it->is_object() && seq_it->contains("free"))
    {
        const Json &f = (*seq_it)["free"];
        seq.free = true;
        seq.departure = body_ref(detail::require<Json>(f, "departure", text), *catalog, text, "departure");
        seq.arrival = body_ref(detail::require<Json>(f, "arrival", text), *catalog, text, "arrival");
        const auto slots = detail::require<int>(f, "slots", text);
        const auto ids = detail::require<Json>(f, "id_bounds", text);
        if (!ids.is_array() || static_cast<int>(ids.size()) != slots)
            throw ValidationError("id_bounds must list one [lo, hi] pair per slot", detail::line_of_key(text, "id_bounds"));
        for (const Json &b : ids)
        {
            if (!b.is_array() || b.size() != 2 || !b[0].is_number_integer() || !b[1].is_number_integer())
                throw ValidationError("id_bounds entries must be integer pairs", detail::line_of_key(text, "id_bounds"));
            seq.slot_bounds.emplace_back(b[0].get<int>(), b[1].get<int>());
        }
    }
    else
    {
        throw ValidationError("'sequence' must be a list of bodies or {\"free\": {...}}",
                              detail::line_of_key(text, "sequence"));
    }

    const auto b_it = root.find("bounds");
    if (b_it == root.end() || !b_it->is_object())
        throw ValidationError("missing 'bounds' object", detail::line_of_key(text, "bounds"));
    const Json &jb = *b_it;
    ProblemBounds bounds;
    if (jb.contains("v_inf"))
        bounds.v_inf = read_pair(jb["v_inf"], "v_inf", text);
    if (jb.contains("alpha"))
        bounds.alpha = read_pair(jb["alpha"], "alpha", text);
    if (jb.contains("delta"))
        bounds.delta = read_pair(jb["delta"], "delta", text);
    if (!jb.contains("t0"))
        throw ValidationError("missing bounds 't0'", detail::line_of_key(text, "bounds"));
    bounds.t0 = read_pair(jb["t0"], "t0", text);
    bounds.T = read_pairs(jb, "T", text, true);
    bounds.eps = read_pairs(jb, "eps", text, false);
    bounds.eta = read_pairs(jb, "eta", text, false);
    bounds.h = read_pairs(jb, "h", text, true);

    try
    {
        return make_problem(std::move(catalog), std::move(seq), bounds, opt);
    }
    catch (const ValidationError &e)
    {
        if (e.line() > 0)
            throw;
        // Point at the most specific key the message mentions.
        std::string msg = e.what();
        int line = 0;
        for (const char *key : {"v_inf", "alpha", "delta", "t0", "eps", "eta", "fixed_vinf_kms",
                                "arrival_constraint", "id_bounds", "sequence"})
            if (msg.find(key) != std::string::npos && (line = detail::line_of_key(text, key)) > 0)
                break;
        if (line == 0 && (msg.find(" T") != std::string::npos || msg.rfind("T", 0) == 0))
            line = detail::line_of_key(text, "T");
        if (line == 0 && (msg.find(" h") != std::string::npos || msg.rfind("h", 0) == 0))
            line = detail::line_of_key(text, "h");
        if (line == 0 && msg.find("objective") != std::string::npos)
            line = detail::line_of_key(text, "objective_mode");
        if (line == 0 && msg.find("bounds") != std::string::npos)
            line = detail::line_of_key(text, "bounds");
        throw ValidationError(msg, line);
    }
}

MgaProblem load_problem_file(const std::filesystem::path &path, std::shared_ptr<const BodyCatalog> catalog_override)
{
    return load_problem(detail::read_text_file(path), path.parent_path(), std::move(catalog_override));
}

Vec3 launch_asymptote(double v_inf, double alpha, double delta)
{
    return v_inf * Vec3(std::sin(delta) * std::cos(alpha), std::sin(delta) * std::sin(alpha), std::cos(delta));
}

namespace
{

// Decodes into `out`; on failure, out.legs holds the completed phases.
void decode_into(std::span<const double> y, const MgaProblem &problem, Trajectory &out, bool residuals)
{
    if (y.size() != problem.dimension())
        throw ValidationError("solution vector has " + std::to_string(y.size()) + " entries, problem expects " +
                              std::to_string(problem.dimension()));

    const BodyCatalog &cat = *problem.catalog;
    const double mu = cat.central_mu();
    const VariableLayout &L = problem.layout;

    out = Trajectory{};
    out.sequence = problem.resolve_sequence(y);
    const std::size_t n_phase = out.sequence.size() - 1;
    const bool lambert_first = problem.launch_mode == LaunchMode::lambert_first_leg;

    Epoch t{y[static_cast<std::size_t>(L.t0)]};
    CartesianState dep = body_state(cat, out.sequence[0], t);
    const Vec3 v_launch_planet = dep.v;
    if (!lambert_first)
    {
        const double vinf = problem.objective_mode == ObjectiveMode::fixed_launch
                                ? problem.fixed_vinf_kms
                                : y[static_cast<std::size_t>(L.v_inf)];
        out.v_inf_launch = launch_asymptote(vinf, y[static_cast<std::size_t>(L.alpha)],
                                            y[static_cast<std::size_t>(L.delta)]);
        dep.v += out.v_inf_launch;
        out.dv_launch = vinf;
    }

    for (std::size_t k = 0; k < n_phase; ++k)
    {
        Leg leg;
        leg.from_id = out.sequence[k];
        leg.to_id = out.sequence[k + 1];
        leg.tof_days = y[static_cast<std::size_t>(L.T[k])];
        leg.eps = L.eps[k] >= 0 ? y[static_cast<std::size_t>(L.eps[k])] : 0.0;
        leg.departure = dep;
        leg.arrival_epoch = t + leg.tof_days;
        const CartesianState target = body_state(cat, leg.to_id, leg.arrival_epoch);

        const double coast = leg.eps * leg.tof_days;
        const CartesianState at_dsm = coast > 0.0 ? propagate_kepler(dep, mu, coast) : dep;
        if (at_dsm.r.norm() > kMaxHeliocentricKm)
            throw KeplerError("spacecraft beyond 100 AU at the DSM");
        const double arc = leg.tof_days - coast;
        const LambertSolution lam = lambert(at_dsm.r, target.r, arc, mu);
        leg.dsm_epoch = at_dsm.epoch;
        leg.r_dsm = at_dsm.r;
        if (lambert_first && k == 0)
        {
            // The launch absorbs the departure velocity: no DSM on this leg.
            leg.departure.v = lam.v1;
            out.v_inf_launch = lam.v1 - v_launch_planet;
            out.dv_launch = out.v_inf_launch.norm();
        }
        else
        {
            leg.dv_dsm = lam.v1 - at_dsm.v;
        }
        leg.v_arrival = lam.v2;
        leg.v_inf_arrival = lam.v2 - target.v;
        if (residuals)
        {
            // Diagnostic only: a failed check propagation must not change the decode outcome.
            try
            {
                const CartesianState end = propagate_kepler({at_dsm.r, lam.v1, at_dsm.epoch}, mu, arc);
                leg.landing_residual = (end.r - target.r).norm() / target.r.norm();
            }
            catch (const KeplerError &)
            {
                leg.landing_residual = std::numeric_limits<double>::infinity();
            }
        }
        out.dv_dsm_total += leg.dv_dsm.norm();
        out.tof_days += leg.tof_days;
        t = leg.arrival_epoch;

        if (k + 1 < n_phase)
        {
            const Body &body = cat.body(leg.to_id);
            const FlybyGeometry g = flyby_outgoing(leg.v_inf_arrival, target.v, y[static_cast<std::size_t>(L.eta[k])],
                                                   y[static_cast<std::size_t>(L.h[k])], body,
                                                   problem.flyby_reference);
            out.flybys.push_back(g);
            dep = {target.r, target.v + g.v_out_rel, t};
        }
        out.legs.push_back(std::move(leg));
    }
    out.dv_arrival = out.legs.back().v_inf_arrival.norm();
    out.total_objective = trajectory_cost(out, problem);
}

}  // namespace

double trajectory_cost(const Trajectory &tr, const MgaProblem &problem)
{
    double total = tr.dv_dsm_total;
    if (problem.objective_mode == ObjectiveMode::total_with_launch)
        total += tr.dv_launch;
    if (problem.arrival_term)
        total += tr.dv_arrival;
    return total;
}

Trajectory decode(std::span<const double> y, const MgaProblem &problem)
{
    Trajectory out;
    decode_into(y, problem, out, true);
    return out;
}

double objective(std::span<const double> y, const MgaProblem &problem)
{
    Trajectory tr;
    try
    {
        decode_into(y, problem, tr, false);
    }
    catch (const ValidationError &)
    {
        throw;
    }
    catch (const Error &)
    {
        const double phases = static_cast<double>(std::max<std::size_t>(1, tr.sequence.size() - 1));
        return kPenaltyBase + 1.0e3 * (1.0 - static_cast<double>(tr.legs.size()) / phases);
    }
    double f = tr.total_objective;
    if (!std::isfinite(f))
        return kPenaltyBase + 1.0e3;
    const ArrivalConstraint &c = problem.arrival_constraint;
    double violation = 0.0;
    if (c.kind == ArrivalConstraint::Kind::min_vinf)
        violation = std::max(0.0, c.value_kms - tr.dv_arrival);
    else if (c.kind == ArrivalConstraint::Kind::max_vinf)
        violation = std::max(0.0, tr.dv_arrival - c.value_kms);
    if (violation > 0.0)
        f += kPenaltyBase + 100.0 * violation;
    return f;
}

double two_impulse_cost(Epoch t0, double tof_days, int p1, int p2, const BodyCatalog &catalog)
{
    const CartesianState a = body_state(catalog, p1, t0);
    const CartesianState b = body_state(catalog, p2, t0 + tof_days);
    try
    {
        const LambertSolution lam = lambert(a.r, b.r, tof_days, catalog.central_mu());
        return (lam.v1 - a.v).norm() + (lam.v2 - b.v).norm();
    }
    catch (const LambertError &)
    {
        return kPenaltyBase;
    }
}

double three_impulse_cost(Epoch t0, double eps, double tof_days, int p1, int p2, DepartureImpulse dv1,
                          const BodyCatalog &catalog)
{
    if (!(eps >= 0.0 && eps <= 1.0))
        throw ValidationError("eps must lie in [0, 1]");
    const double mu = catalog.central_mu();
    CartesianState s = body_state(catalog, p1, t0);
    const CartesianState b = body_state(catalog, p2, t0 + tof_days);
    Vec3 impulse = Vec3::Zero();
    if (dv1.mode == DepartureImpulse::Mode::along_planet_velocity)
        impulse = s.v.normalized() * dv1.magnitude_kms;
    else if (dv1.mode == DepartureImpulse::Mode::vector)
        impulse = dv1.vector_kms;
    s.v += impulse;
    try
    {
        const double coast = eps * tof_days;
        const CartesianState m = coast > 0.0 ? propagate_kepler(s, mu, coast) : s;
        const LambertSolution lam = lambert(m.r, b.r, tof_days - coast, mu);
        return impulse.norm() + (lam.v1 - m.v).norm() + (lam.v2 - b.v).norm();
    }
    catch (const Error &)
    {
        return kPenaltyBase;
    }
}

GridResult grid_scan(const GridSpec &spec, const BodyCatalog &catalog)
{
    if (spec.n_t0 < 2 || spec.n_tof < 2)
        throw ValidationError("grid needs at least 2 points per axis");
    if (!(spec.tof_min > 0.0) || spec.tof_max < spec.tof_min || spec.t0_max < spec.t0_min)
        throw ValidationError("grid ranges must be ordered and flight times positive");
    (void)catalog.body(spec.p1);
    (void)catalog.body(spec.p2);

    std::vector<double> sweep = spec.eps_sweep;
    if (sweep.empty())
        for (int k = 1; k <= 19; ++k)
            sweep.push_back(0.05 * k);

    GridResult g;
    for (int i = 0; i < spec.n_t0; ++i)
        g.t0.push_back(spec.t0_min + (spec.t0_max - spec.t0_min) * i / (spec.n_t0 - 1));
    for (int j = 0; j < spec.n_tof; ++j)
        g.tof.push_back(spec.tof_min + (spec.tof_max - spec.tof_min) * j / (spec.n_tof - 1));
    g.dv.reserve(g.t0.size() * g.tof.size());
    for (double t0 : g.t0)
    {
        for (double tof : g.tof)
        {
            if (spec.mode == GridMode::two_impulse)
            {
                g.dv.push_back(two_impulse_cost(Epoch{t0}, tof, spec.p1, spec.p2, catalog));
            }
            else
            {
                double best = std::numeric_limits<double>::infinity();
                for (double e : sweep)
                    best = std::min(best, three_impulse_cost(Epoch{t0}, e, tof, spec.p1, spec.p2, spec.dv1, catalog));
                g.dv.push_back(best);
            }
        }
    }
    return g;
}

}  // namespace mga
