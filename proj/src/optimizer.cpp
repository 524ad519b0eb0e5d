#include "mga/optimizer.hpp"

#include "json_util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mga
{

namespace
{

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::size_t> rank_order(const std::vector<Individual> &pop)
{
    std::vector<std::size_t> order(pop.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pop[a].f < pop[b].f; });
    return order;
}

void assign_roles(std::vector<Individual> &pop, const std::vector<std::size_t> &order, int n_e, Rng &rng)
{
    const int n_pop = static_cast<int>(pop.size());
    for (int r = 0; r < n_pop; ++r)
    {
        Individual &ind = pop[order[static_cast<std::size_t>(r)]];
        if (r < n_e)
            ind.role = Role::perceiver;
        else
            ind.role = rng.uniform() < mutation_probability(r, n_pop, n_e) ? Role::mutated : Role::hibernated;
    }
}

// Largest t in [0, t_max] keeping base + t * d inside the box.
double ray_limit(std::span<const double> base, std::span<const double> d, std::span<const double> lower,
                 std::span<const double> upper, double t_max)
{
    double t = t_max;
    for (std::size_t i = 0; i < base.size(); ++i)
    {
        if (d[i] > 0.0)
            t = std::min(t, (upper[i] - base[i]) / d[i]);
        else if (d[i] < 0.0)
            t = std::min(t, (lower[i] - base[i]) / d[i]);
    }
    return std::max(0.0, t);
}

void clip(std::vector<double> &y, std::span<const double> lower, std::span<const double> upper)
{
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = std::clamp(y[i], lower[i], upper[i]);
}

std::vector<double> uniform_point(std::span<const double> lower, std::span<const double> upper, Rng &rng)
{
    std::vector<double> y(lower.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = rng.uniform(lower[i], upper[i]);
    return y;
}

double cut_with_safeguard(double c, double lo, double hi)
{
    const double edge = hi - lo;
    if (!(c - lo >= 0.05 * edge) || !(hi - c >= 0.05 * edge))
        return lo + 0.5 * edge;
    return c;
}

}  // namespace

void SearchParams::validate() const
{
    auto fail = [](const std::string &msg) { throw ValidationError("optimizer: " + msg); };
    if (n_pop < 2)
        fail("n_pop must be at least 2");
    if (n_e < 1 || n_e > n_pop)
        fail("n_e must lie in [1, n_pop]");
    if (!(sigma >= 0.0 && sigma <= 1.0))
        fail("sigma must lie in [0, 1]");
    if (max_evals <= 0)
        fail("max_evals must be positive");
    if (!(node_fraction > 0.0 && node_fraction <= 1.0))
        fail("node_fraction must lie in (0, 1]");
    if (branch_levels < 0)
        fail("branch_levels must be non-negative");
    if (!(crowding_threshold > 0.0))
        fail("crowding_threshold must be positive");
    if (!(theta > 0.0))
        fail("theta must be positive");
    if (!(eps_radius > 0.0 && eps_radius < 1.0))
        fail("eps_radius must lie in (0, 1)");
    if (!(rho_min > 0.0 && rho_min <= rho_converged && rho_converged < rho_initial && rho_initial <= 1.0))
        fail("radius limits must satisfy 0 < rho_min <= rho_converged < rho_initial <= 1");
    if (!(rho_floor > 0.0 && rho_floor <= 1.0))
        fail("rho_floor must lie in (0, 1]");
    if (stall_generations < 0 || !(stall_tolerance >= 0.0))
        fail("stall settings must be non-negative");
    if (!(polish_fraction >= 0.0 && polish_fraction < 1.0))
        fail("polish_fraction must lie in [0, 1)");
    if (polish_starts == 0 || !(polish_separation >= 0.0))
        fail("polish_starts must be positive and polish_separation non-negative");
    if (archive_capacity == 0)
        fail("archive_capacity must be positive");
}

SearchParams load_search_params(std::string_view problem_json, const SearchParams &defaults)
{
    const detail::Json root = detail::parse_json(problem_json);
    SearchParams p = defaults;
    if (!root.is_object() || !root.contains("optimizer"))
        return p;
    const detail::Json &o = root.at("optimizer");
    if (!o.is_object())
        throw ValidationError("'optimizer' must be an object", detail::line_of_key(problem_json, "optimizer"));
    using detail::optional_field;
    p.n_pop = optional_field<int>(o, "n_pop", p.n_pop, problem_json);
    p.n_e = optional_field<int>(o, "n_e", p.n_e, problem_json);
    p.sigma = optional_field<double>(o, "sigma", p.sigma, problem_json);
    p.max_evals = optional_field<std::int64_t>(o, "max_evals", p.max_evals, problem_json);
    p.node_fraction = optional_field<double>(o, "node_fraction", p.node_fraction, problem_json);
    p.branch_levels = optional_field<int>(o, "branch_levels", p.branch_levels, problem_json);
    p.crowding_threshold = optional_field<double>(o, "crowding_threshold", p.crowding_threshold, problem_json);
    p.seed = optional_field<std::uint64_t>(o, "seed", p.seed, problem_json);
    p.theta = optional_field<double>(o, "theta", p.theta, problem_json);
    p.eps_radius = optional_field<double>(o, "eps_radius", p.eps_radius, problem_json);
    p.stall_generations = optional_field<int>(o, "stall_generations", p.stall_generations, problem_json);
    p.four_node_branching = optional_field<bool>(o, "four_node_branching", p.four_node_branching, problem_json);
    p.polish_fraction = optional_field<double>(o, "polish_fraction", p.polish_fraction, problem_json);
    p.polish_starts = optional_field<std::size_t>(o, "polish_starts", p.polish_starts, problem_json);
    p.polish_separation = optional_field<double>(o, "polish_separation", p.polish_separation, problem_json);
    try
    {
        p.validate();
    }
    catch (const ValidationError &e)
    {
        // Point at the field named in the message when possible.
        const std::string msg = e.what();
        int line = detail::line_of_key(problem_json, "optimizer");
        for (const char *key : {"n_pop", "n_e", "sigma", "max_evals", "node_fraction", "branch_levels",
                                "crowding_threshold", "theta", "eps_radius", "stall", "polish_fraction", "polish_starts"})
        {
            if (msg.find(std::string(": ") + key) != std::string::npos)
            {
                if (const int l = detail::line_of_key(problem_json, key); l > 0)
                    line = l;
                break;
            }
        }
        throw ValidationError(msg, line);
    }
    return p;
}

SearchParams load_search_params_file(const std::filesystem::path &path, const SearchParams &defaults)
{
    return load_search_params(detail::read_text_file(path), defaults);
}

void migration_region(const Individual &ind, std::span<const double> lower, std::span<const double> upper,
                      std::vector<double> &lo, std::vector<double> &hi)
{
    const std::size_t n = ind.y.size();
    lo.resize(n);
    hi.resize(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        lo[i] = std::max(lower[i], ind.y[i] - ind.rho * (ind.y[i] - lower[i]));
        hi[i] = std::min(upper[i], ind.y[i] + ind.rho * (upper[i] - ind.y[i]));
    }
}

std::vector<double> mutate(std::span<const double> y, std::span<const double> lo, std::span<const double> hi,
                           Rng &rng)
{
    const std::size_t n = y.size();
    std::vector<double> out(y.begin(), y.end());
    const double p = 1.0 / static_cast<double>(n);
    bool any = false;
    for (std::size_t i = 0; i < n; ++i)
    {
        if (rng.uniform() < p)
        {
            out[i] = rng.uniform(lo[i], hi[i]);
            any = true;
        }
    }
    if (!any)
    {
        const std::size_t i = rng.index(n);
        out[i] = rng.uniform(lo[i], hi[i]);
    }
    return out;
}

std::optional<double> quadratic_minimum(double f0, double chi1, double f1, double f2)
{
    if (!std::isfinite(f0) || !std::isfinite(f1) || !std::isfinite(f2) || chi1 == 0.0 || chi1 == 1.0)
        return std::nullopt;
    const double a = (f1 - f0 - (f2 - f0) * chi1) / (chi1 * (chi1 - 1.0));
    const double b = (f2 - f0) - a;
    if (!(a > 0.0))
        return std::nullopt;
    const double chi = -b / (2.0 * a);
    if (!std::isfinite(chi))
        return std::nullopt;
    return chi;
}

PerceptionOutcome perceive(Individual &ind, std::span<const double> lower, std::span<const double> upper,
                           Evaluator &ev, Rng &rng)
{
    const std::size_t n = ind.y.size();
    std::vector<double> lo, hi;
    migration_region(ind, lower, upper, lo, hi);

    PerceptionOutcome out;
    std::vector<double> best_y;
    double best_f = kInf;
    auto consider = [&](const std::vector<double> &y, double f) {
        ++out.samples;
        if (f < best_f)
        {
            best_f = f;
            best_y = y;
        }
    };

    std::vector<double> d(n), y2(n), y3(n);
    for (int s = 0; s < ind.resources; ++s)
    {
        const std::vector<double> y1 = mutate(ind.y, lo, hi, rng);
        const auto f1 = ev.try_eval(y1);
        if (!f1)
            break;
        consider(y1, *f1);

        // Extrapolate beyond the better of y and y1.
        const bool forward = *f1 < ind.f;
        const std::vector<double> &base = forward ? y1 : ind.y;
        for (std::size_t i = 0; i < n; ++i)
            d[i] = forward ? y1[i] - ind.y[i] : ind.y[i] - y1[i];
        const double nu = ray_limit(base, d, lower, upper, rng.uniform());
        if (nu > 0.0)
        {
            for (std::size_t i = 0; i < n; ++i)
                y2[i] = base[i] + nu * d[i];
            clip(y2, lower, upper);
            const auto f2 = ev.try_eval(y2);
            if (!f2)
                break;
            consider(y2, *f2);

            // y1 sits at chi1 on the line y + chi * (y2 - y).
            const double chi1 = forward ? 1.0 / (1.0 + nu) : -1.0 / nu;
            if (const auto chi = quadratic_minimum(ind.f, chi1, *f1, *f2))
            {
                for (std::size_t i = 0; i < n; ++i)
                    y3[i] = ind.y[i] + *chi * (y2[i] - ind.y[i]);
                clip(y3, lower, upper);
                if (y3 != ind.y && y3 != y1 && y3 != y2)
                {
                    const auto f3 = ev.try_eval(y3);
                    if (!f3)
                        break;
                    consider(y3, *f3);
                }
            }
        }
        if (best_f < ind.f)
            break;
    }

    if (best_y.empty())
        return out;
    double s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        // Node-box units, so the result compares directly with rho.
        const double w = upper[i] - lower[i];
        if (w > 0.0)
        {
            const double t = (best_y[i] - ind.y[i]) / w;
            s2 += t * t;
        }
    }
    out.delta_y_min = std::sqrt(s2);
    if (best_f < ind.f)
    {
        ind.y = std::move(best_y);
        ind.f = best_f;
        out.improved = true;
    }
    return out;
}

double contracted_radius(double rho, double delta_y_min, const SearchParams &params)
{
    const double r = delta_y_min >= params.eps_radius * rho ? std::max(params.rho_floor, delta_y_min)
                                                            : params.eps_radius * rho;
    return std::clamp(r, params.rho_min, 1.0);
}

double expanded_radius(double rho, int rank_j, const SearchParams &params)
{
    const double r = rho * params.theta * std::log(std::exp(1.0) - 1.0 + static_cast<double>(rank_j));
    return std::clamp(r, params.rho_min, 1.0);
}

double mutation_probability(int rank, int n_pop, int n_e)
{
    if (rank < n_e || n_pop <= n_e)
        return 0.0;
    return static_cast<double>(rank - n_e + 1) / static_cast<double>(n_pop - n_e);
}

void rank_and_assign(std::vector<Individual> &population, int n_e, Rng &rng)
{
    std::vector<std::size_t> order(population.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    assign_roles(population, order, n_e, rng);
}

std::vector<double> boundary_mate(std::span<const double> y, std::span<const double> lower,
                                  std::span<const double> upper, Rng &rng)
{
    std::vector<double> out(y.begin(), y.end());
    for (std::size_t i = 0; i < out.size(); ++i)
    {
        const double b = rng.coin() ? upper[i] : lower[i];
        const double nu = rng.uniform();
        out[i] = std::clamp(nu * b + (1.0 - nu) * out[i], lower[i], upper[i]);
    }
    return out;
}

std::vector<double> interpolate(std::span<const double> y, std::span<const double> y1, double nu)
{
    std::vector<double> out(y.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = nu * (y1[i] - y[i]) + y[i];
    return out;
}

void communicate(std::vector<Individual> &population, const std::vector<std::size_t> &improved,
                 std::span<const double> lower, std::span<const double> upper, std::span<const double> norm_lower,
                 std::span<const double> norm_upper, const SearchParams &params, Evaluator &ev, Rng &rng)
{
    const std::size_t n_pop = population.size();
    const std::size_t n = lower.size();
    std::vector<double> d(n);
    for (std::size_t k : improved)
    {
        if (n_pop < 2 || ev.exhausted())
            break;
        std::size_t partner = rng.index(n_pop - 1);
        if (partner >= k)
            ++partner;
        const Individual &a = population[k];
        Individual &b = population[partner];
        std::vector<double> child;
        switch (rng.index(3))
        {
        case 0:  // component exchange: the partner takes some of the improved individual's components
        {
            child = b.y;
            bool any = false;
            for (std::size_t i = 0; i < n; ++i)
                if (rng.coin())
                {
                    child[i] = a.y[i];
                    any = true;
                }
            if (!any)
            {
                const std::size_t i = rng.index(n);
                child[i] = a.y[i];
            }
            break;
        }
        case 1:  // extrapolation past the better of the two
        {
            const Individual &better = a.f <= b.f ? a : b;
            const Individual &worse = a.f <= b.f ? b : a;
            for (std::size_t i = 0; i < n; ++i)
                d[i] = better.y[i] - worse.y[i];
            const double nu = ray_limit(better.y, d, lower, upper, rng.uniform());
            child = better.y;
            for (std::size_t i = 0; i < n; ++i)
                child[i] += nu * d[i];
            break;
        }
        default:  // interpolation between the two
        {
            child = interpolate(b.y, a.y, rng.uniform());
            break;
        }
        }
        clip(child, lower, upper);
        const auto f = ev.try_eval(child);
        if (!f)
            break;
        if (*f < b.f)
        {
            b.y = std::move(child);
            b.f = *f;
        }
    }

    // Crowding: anyone with a better neighbour closer than the threshold is projected
    // toward the node boundary.
    const std::vector<std::size_t> order = rank_order(population);
    std::vector<bool> kept(n_pop, false);
    for (std::size_t r = 0; r < n_pop; ++r)
    {
        Individual &ind = population[order[r]];
        bool crowded = false;
        for (std::size_t q = 0; q < r && !crowded; ++q)
            if (kept[order[q]] &&
                normalized_distance(ind.y, population[order[q]].y, norm_lower, norm_upper) < params.crowding_threshold)
                crowded = true;
        if (!crowded)
        {
            kept[order[r]] = true;
            continue;
        }
        if (ev.exhausted())
            continue;
        std::vector<double> moved = boundary_mate(ind.y, lower, upper, rng);
        const auto f = ev.try_eval(moved);
        if (!f)
            continue;
        ind.y = std::move(moved);
        ind.f = *f;
        ind.rho = params.rho_initial;
        ind.resources = 1;
        ind.delta_f = 0.0;
    }
}

EvolveResult evolve(const Subdomain &node, const BoxProblem &problem, const SearchParams &params,
                    std::int64_t budget, std::uint64_t stream_id)
{
    const std::size_t n = problem.dimension();
    const int n_pop = params.n_pop;
    const std::vector<double> norm_lo = problem.search_lower();
    const std::vector<double> norm_hi = problem.search_upper();
    const std::span<const double> lower = node.lower;
    const std::span<const double> upper = node.upper;

    Rng sched = Rng::stream(params.seed, stream_id, 0);
    std::vector<Rng> rngs;
    for (int k = 0; k < n_pop; ++k)
        rngs.push_back(Rng::stream(params.seed, stream_id, static_cast<std::uint64_t>(k) + 1));

    EvolveResult res;
    res.dimension = n;
    res.archive = SolutionArchive(problem.lower, problem.upper, params.crowding_threshold, params.archive_capacity);
    Evaluator ev(problem, std::max<std::int64_t>(0, budget) + n_pop);

    auto archive = [&](const Individual &ind) { res.archive.insert(problem.to_point(ind.y), ind.f); };
    auto reset = [&](Individual &ind) {
        ind.rho = params.rho_initial;
        ind.resources = 1;
        ind.delta_f = 0.0;
    };

    std::vector<Individual> pop(static_cast<std::size_t>(n_pop));
    for (int k = 0; k < n_pop; ++k)
    {
        Individual &ind = pop[static_cast<std::size_t>(k)];
        ind.y = uniform_point(lower, upper, rngs[static_cast<std::size_t>(k)]);
        ind.f = ev.eval(ind.y);
        reset(ind);
    }

    auto record = [&]() {
        for (const Individual &ind : pop)
        {
            res.trace_y.insert(res.trace_y.end(), ind.y.begin(), ind.y.end());
            res.trace_f.push_back(ind.f);
        }
    };
    record();
    archive(pop[rank_order(pop).front()]);

    std::vector<double> history{res.archive.best_f()};
    std::vector<std::size_t> improved;
    while (!ev.exhausted())
    {
        ++res.generations;
        const std::vector<std::size_t> order = rank_order(pop);
        assign_roles(pop, order, params.n_e, sched);
        improved.clear();
        for (std::size_t r = 0; r < order.size() && !ev.exhausted(); ++r)
        {
            const std::size_t k = order[r];
            Individual &ind = pop[k];
            if (ind.role == Role::perceiver)
            {
                const double f_before = ind.f;
                const PerceptionOutcome po = perceive(ind, lower, upper, ev, rngs[k]);
                if (po.improved)
                {
                    ind.resources = std::min(static_cast<int>(n), ind.resources + 1);
                    const double gain = f_before - ind.f;
                    if (ind.delta_f > 0.0 && gain > ind.delta_f)
                        ind.rho = expanded_radius(ind.rho, static_cast<int>(r) + 1, params);
                    ind.delta_f = gain;
                    improved.push_back(k);
                }
                else
                {
                    ind.resources = std::max(1, ind.resources - 1);
                    if (po.samples > 0)
                        ind.rho = contracted_radius(ind.rho, po.delta_y_min, params);
                    ind.delta_f = 0.0;
                }
            }
            else if (ind.role == Role::mutated)
            {
                // The mutated share of the population is regenerated anywhere in the node.
                std::vector<double> y = uniform_point(lower, upper, rngs[k]);
                const auto f = ev.try_eval(y);
                if (!f)
                    break;
                ind.y = std::move(y);
                ind.f = *f;
                reset(ind);
            }
        }

        communicate(pop, improved, lower, upper, norm_lo, norm_hi, params, ev, sched);

        // Converged individuals become archive entries and restart elsewhere in the node.
        for (std::size_t k = 0; k < pop.size(); ++k)
        {
            Individual &ind = pop[k];
            if (ind.rho > params.rho_converged || ev.exhausted())
                continue;
            archive(ind);
            std::vector<double> y = uniform_point(lower, upper, rngs[k]);
            const auto f = ev.try_eval(y);
            if (!f)
                break;
            ind.y = std::move(y);
            ind.f = *f;
            reset(ind);
        }

        archive(pop[rank_order(pop).front()]);
        record();

        history.push_back(res.archive.best_f());
        const auto S = static_cast<std::size_t>(params.stall_generations);
        if (S > 0 && history.size() > S)
        {
            const double old = history[history.size() - 1 - S];
            const double now = history.back();
            if (std::isfinite(old) && old - now <= params.stall_tolerance * std::abs(old))
                break;
        }
    }

    // The filter (best n_e) joins the archive.
    const std::vector<std::size_t> order = rank_order(pop);
    for (int r = 0; r < params.n_e; ++r)
        archive(pop[order[static_cast<std::size_t>(r)]]);

    res.evals = ev.count();
    const auto worst = std::max_element(res.trace_f.begin(), res.trace_f.end());
    const auto best = std::min_element(res.trace_f.begin(), res.trace_f.end());
    const auto wi = static_cast<std::size_t>(worst - res.trace_f.begin());
    res.y_worst.assign(res.trace_y.begin() + static_cast<long>(wi * n),
                       res.trace_y.begin() + static_cast<long>((wi + 1) * n));
    res.f_worst = *worst;
    res.f_best = *best;
    if (!res.archive.empty())
        res.y_best = res.archive.best().y;
    else
    {
        const auto bi = static_cast<std::size_t>(best - res.trace_f.begin());
        res.y_best.assign(res.trace_y.begin() + static_cast<long>(bi * n),
                          res.trace_y.begin() + static_cast<long>((bi + 1) * n));
    }
    return res;
}

NodeScore score_node(std::span<const double> lower, std::span<const double> upper, const Subdomain &parent,
                     const EvolveResult &result, double sigma)
{
    const std::size_t n = parent.lower.size();
    int n_eff = 0;
    double log_ratio = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        const double edge = parent.upper[i] - parent.lower[i];
        if (edge > 0.0)
        {
            ++n_eff;
            log_ratio += std::log((upper[i] - lower[i]) / edge);
        }
    }

    const std::size_t total = result.trace_f.size();
    std::size_t count = 0;
    double sum_f = 0.0;
    for (std::size_t p = 0; p < total; ++p)
    {
        const double *y = result.trace_y.data() + p * n;
        bool inside = true;
        for (std::size_t i = 0; i < n && inside; ++i)
        {
            // Half-open cells so every point belongs to exactly one leaf.
            const bool closes = upper[i] == parent.upper[i];
            inside = y[i] >= lower[i] && (y[i] < upper[i] || (closes && y[i] <= upper[i]));
        }
        if (inside)
        {
            ++count;
            sum_f += result.trace_f[p];
        }
    }

    NodeScore s;
    const double rel_volume = n_eff > 0 ? std::exp(log_ratio / n_eff) : 1.0;
    s.omega = total > 0 ? (static_cast<double>(count) / static_cast<double>(total)) / rel_volume : 0.0;
    if (count == 0)
        s.phi = 1.0;
    else
    {
        const double spread = result.f_worst - result.f_best;
        s.phi = spread > 0.0 ? (sum_f / static_cast<double>(count) - result.f_best) / spread : 0.0;
    }
    s.psi = sigma * s.omega + (1.0 - sigma) * s.phi;
    return s;
}

std::vector<Subdomain> branch(const Subdomain &node, const EvolveResult &result, const SearchParams &params)
{
    const std::size_t n = node.lower.size();
    struct Candidate
    {
        std::size_t dim;
        double cut;
        double best_psi;
    };
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < n; ++i)
    {
        if (!(node.upper[i] > node.lower[i]))
            continue;
        const double c = cut_with_safeguard(result.y_worst[i], node.lower[i], node.upper[i]);
        std::vector<double> hi = node.upper, lo = node.lower;
        hi[i] = c;
        lo[i] = c;
        const double a = score_node(node.lower, hi, node, result, params.sigma).psi;
        const double b = score_node(lo, node.upper, node, result, params.sigma).psi;
        candidates.push_back({i, c, std::min(a, b)});
    }
    if (candidates.empty())
        return {};
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate &a, const Candidate &b) { return a.best_psi < b.best_psi; });

    const std::size_t d = candidates[0].dim;
    const double c = candidates[0].cut;
    std::vector<std::pair<std::vector<double>, std::vector<double>>> boxes;

    if (params.four_node_branching && candidates.size() > 1)
    {
        // Second cut through y_best along the runner-up dimension: a 2 x 2 split.
        const std::size_t d2 = candidates[1].dim;
        const double c2 = cut_with_safeguard(result.y_best[d2], node.lower[d2], node.upper[d2]);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
            {
                std::vector<double> lo = node.lower, hi = node.upper;
                (a == 0 ? hi : lo)[d] = c;
                (b == 0 ? hi : lo)[d2] = c2;
                boxes.emplace_back(std::move(lo), std::move(hi));
            }
    }
    else
    {
        // Keep the half without y_best whole; split the other at y_best.
        const bool best_high = result.y_best[d] >= c;
        std::vector<double> other_lo = node.lower, other_hi = node.upper;
        std::vector<double> half_lo = node.lower, half_hi = node.upper;
        if (best_high)
        {
            other_hi[d] = c;
            half_lo[d] = c;
        }
        else
        {
            other_lo[d] = c;
            half_hi[d] = c;
        }
        const double c2 = cut_with_safeguard(result.y_best[d], half_lo[d], half_hi[d]);
        std::vector<double> a_lo = half_lo, a_hi = half_hi, b_lo = half_lo, b_hi = half_hi;
        a_hi[d] = c2;
        b_lo[d] = c2;
        boxes.emplace_back(std::move(other_lo), std::move(other_hi));
        boxes.emplace_back(std::move(a_lo), std::move(a_hi));
        boxes.emplace_back(std::move(b_lo), std::move(b_hi));
    }

    std::vector<Subdomain> children;
    for (auto &[lo, hi] : boxes)
    {
        Subdomain child;
        const NodeScore s = score_node(lo, hi, node, result, params.sigma);
        child.lower = std::move(lo);
        child.upper = std::move(hi);
        child.omega = s.omega;
        child.phi = s.phi;
        child.psi = s.psi;
        child.parent = node.id;
        child.depth = node.depth + 1;
        children.push_back(std::move(child));
    }
    return children;
}

SearchResult run_search(const BoxProblem &problem, const SearchParams &params)
{
    problem.validate();
    params.validate();

    SearchResult out;
    out.archive = SolutionArchive(problem.lower, problem.upper, params.crowding_threshold, params.archive_capacity);

    Subdomain root;
    root.lower = problem.search_lower();
    root.upper = problem.search_upper();
    out.nodes.push_back(root);
    std::vector<std::size_t> open{0};

    const auto polish_budget = static_cast<std::int64_t>(std::floor(params.polish_fraction * params.max_evals));
    const std::int64_t search_budget = params.max_evals - polish_budget;
    int without_improvement = 0;

    while (!open.empty())
    {
        const std::int64_t remaining = search_budget - out.evals;
        if (remaining <= 0)
            break;
        // Lowest psi first; ties go to the older node.
        const auto it = std::min_element(open.begin(), open.end(), [&](std::size_t a, std::size_t b) {
            return out.nodes[a].psi < out.nodes[b].psi;
        });
        const std::size_t idx = *it;
        open.erase(it);

        const auto node_cap = std::max<std::int64_t>(
            1, static_cast<std::int64_t>(std::floor(params.node_fraction * static_cast<double>(params.max_evals))));
        // Without branching the single evolve call owns the whole search budget.
        const std::int64_t budget = params.branch_levels == 0 ? remaining : std::min(node_cap, remaining);
        const EvolveResult r = evolve(out.nodes[idx], problem, params, budget, static_cast<std::uint64_t>(idx) + 1);
        out.evals += r.evals;

        const double before = out.archive.best_f();
        out.archive.merge(r.archive);
        const bool improved = out.archive.best_f() < before;
        out.best_history.push_back(out.archive.best_f());

        Subdomain &node = out.nodes[idx];
        node.explored = true;
        node.best_f = r.f_best;
        node.worst_f = r.f_worst;

        if (params.branch_levels == 0)
            break;
        without_improvement = improved ? 0 : without_improvement + 1;
        if (without_improvement >= params.branch_levels)
            break;

        std::vector<Subdomain> children = branch(out.nodes[idx], r, params);
        ++out.branchings;
        for (Subdomain &child : children)
        {
            child.id = static_cast<int>(out.nodes.size());
            open.push_back(out.nodes.size());
            out.nodes.push_back(std::move(child));
        }
    }

    // Final polish of the best mutually distant entries with whatever the search left;
    // this also absorbs the initial populations' overshoot of the search share.
    std::int64_t polish_left = params.max_evals - out.evals;
    if (polish_left > 0 && !out.archive.empty())
    {
        const std::vector<ArchiveEntry> &entries = out.archive.entries();
        std::vector<std::size_t> starts;
        for (std::size_t k = 0; k < entries.size() && starts.size() < params.polish_starts; ++k)
        {
            const bool distinct = std::all_of(starts.begin(), starts.end(), [&](std::size_t q) {
                return normalized_distance(entries[k].y, entries[q].y, problem.lower, problem.upper) >
                       params.polish_separation;
            });
            if (distinct)
                starts.push_back(k);
        }
        RefineOptions opts;
        opts.max_evals = std::max<std::int64_t>(1, polish_left / static_cast<std::int64_t>(starts.size()));
        SolutionArchive polished(problem.lower, problem.upper, params.crowding_threshold, params.archive_capacity);
        for (const ArchiveEntry &e : entries)
            polished.insert(e.y, e.f);
        for (std::size_t k : starts)
        {
            if (polish_left <= 0)
                break;
            opts.max_evals = std::min(opts.max_evals, polish_left);
            const RefineResult rr = local_refine(entries[k].y, problem, opts, entries[k].f);
            polish_left -= rr.evals;
            out.polish_evals += rr.evals;
            polished.insert(rr.y, rr.f);
        }
        out.archive = std::move(polished);
        out.best_history.push_back(out.archive.best_f());
    }
    out.evals += out.polish_evals;
    return out;
}

}  // namespace mga
