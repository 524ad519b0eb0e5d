#pragma once

#include "mga/baseline.hpp"
#include "mga/search_space.hpp"

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

namespace mga
{

struct SearchParams
{
    int n_pop{40};
    int n_e{25};  ///< filter size: the best n_e individuals perceive
    double sigma{0.5};
    std::int64_t max_evals{100000};
    double node_fraction{0.25};           ///< share of max_evals one evolve call may spend
    int branch_levels{2};                 ///< branchings in a row without archive improvement before stopping
    double crowding_threshold{1e-3};
    std::uint64_t seed{1};
    double theta{2.0};
    double eps_radius{0.5};
    double rho_initial{0.5};
    double rho_floor{1e-4};     ///< lower argument of the max() in the radius contraction
    double rho_min{1e-6};
    double rho_converged{1e-5};  ///< below this an individual is archived and reseeded
    int stall_generations{30};   ///< 0 disables the stall test
    double stall_tolerance{1e-6};
    bool four_node_branching{false};
    double polish_fraction{0.1};  ///< share of max_evals kept for the final local refinement
    std::size_t polish_starts{10};
    double polish_separation{0.05};  ///< minimum normalized distance between polish starts
    std::size_t archive_capacity{500};

    /// Throws ValidationError naming the offending field.
    void validate() const;
};

/// Reads the `optimizer` object of a problem file; absent keys keep their defaults.
SearchParams load_search_params(std::string_view problem_json, const SearchParams &defaults = {});
SearchParams load_search_params_file(const std::filesystem::path &path, const SearchParams &defaults = {});

enum class Role
{
    perceiver,
    mutated,
    hibernated
};

struct Individual
{
    std::vector<double> y;
    double f{0.0};
    double rho{0.5};
    int resources{1};
    Role role{Role::perceiver};
    double delta_f{0.0};  ///< improvement in the previous generation
};

/// Axis-aligned region S: each side spans rho times the distance from y to that box bound.
void migration_region(const Individual &ind, std::span<const double> lower, std::span<const double> upper,
                      std::vector<double> &lo, std::vector<double> &hi);

/// Component-wise mutation inside [lo, hi]: probability 1/n per component, at least one.
std::vector<double> mutate(std::span<const double> y, std::span<const double> lo, std::span<const double> hi,
                           Rng &rng);

/// Minimizer of the parabola through (0, f0), (chi1, f1), (1, f2); nullopt unless convex.
std::optional<double> quadratic_minimum(double f0, double chi1, double f1, double f2);

struct PerceptionOutcome
{
    bool improved{false};
    double delta_y_min{0.0};  ///< normalized offset of the best sample
    std::int64_t samples{0};
};

/// Perception loop of one individual inside box [lower, upper].
PerceptionOutcome perceive(Individual &ind, std::span<const double> lower, std::span<const double> upper,
                           Evaluator &ev, Rng &rng);

/// Radius contraction after a failed perception.
double contracted_radius(double rho, double delta_y_min, const SearchParams &params);
/// Radius expansion for an improving trend; rank_j is 1-based.
double expanded_radius(double rho, int rank_j, const SearchParams &params);

/// Probability that the individual at 0-based rank r is mutated rather than hibernated.
double mutation_probability(int rank, int n_pop, int n_e);

/// Assigns roles to a population sorted by f ascending.
void rank_and_assign(std::vector<Individual> &population, int n_e, Rng &rng);

/// Boundary mating: each component moves toward a random bound by nu ~ U(0,1).
std::vector<double> boundary_mate(std::span<const double> y, std::span<const double> lower,
                                  std::span<const double> upper, Rng &rng);

/// Linear interpolation y + nu (y1 - y).
std::vector<double> interpolate(std::span<const double> y, std::span<const double> y1, double nu);

/// Pairs each improved individual with a random partner; the offspring replaces the
/// partner if better. Then separates crowded individuals.
void communicate(std::vector<Individual> &population, const std::vector<std::size_t> &improved,
                 std::span<const double> lower, std::span<const double> upper, std::span<const double> norm_lower,
                 std::span<const double> norm_upper, const SearchParams &params, Evaluator &ev, Rng &rng);

struct Subdomain
{
    std::vector<double> lower;
    std::vector<double> upper;
    double omega{0.0};
    double phi{1.0};
    double psi{0.0};
    int id{0};
    int parent{-1};
    int depth{0};
    bool explored{false};
    double best_f{0.0};
    double worst_f{0.0};
};

struct EvolveResult
{
    std::size_t dimension{0};
    std::vector<double> trace_y;  ///< end-of-generation positions, `dimension` values per point
    std::vector<double> trace_f;
    SolutionArchive archive;
    std::int64_t evals{0};
    int generations{0};
    std::vector<double> y_best;
    std::vector<double> y_worst;
    double f_best{0.0};
    double f_worst{0.0};
};

/// Evolutionary step on one subdomain with at most `budget` evaluations after the
/// initial population.
EvolveResult evolve(const Subdomain &node, const BoxProblem &problem, const SearchParams &params,
                    std::int64_t budget, std::uint64_t stream_id);

struct NodeScore
{
    double omega{0.0};
    double phi{1.0};
    double psi{0.0};
};

/// Density, fitness and qualification of box [lower, upper] inside `parent` from the evolve trace.
NodeScore score_node(std::span<const double> lower, std::span<const double> upper, const Subdomain &parent,
                     const EvolveResult &result, double sigma);

/// Splits a node into three leaves (four with the switch) that tile it exactly.
std::vector<Subdomain> branch(const Subdomain &node, const EvolveResult &result, const SearchParams &params);

struct SearchResult
{
    SolutionArchive archive;
    std::vector<Subdomain> nodes;  ///< every node ever created, explored or not
    std::int64_t evals{0};
    std::int64_t polish_evals{0};
    int branchings{0};
    std::vector<double> best_history;  ///< archive best after each evolve call
};

SearchResult run_search(const BoxProblem &problem, const SearchParams &params);

}  // namespace mga
