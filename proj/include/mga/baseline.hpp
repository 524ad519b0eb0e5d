#pragma once

#include "mga/search_space.hpp"

#include <cstdint>
#include <vector>

namespace mga
{

/// n points in [lower, upper]; per dimension each of the n equal strata holds exactly one point.
std::vector<std::vector<double>> latin_hypercube(std::size_t n_samples, std::span<const double> lower,
                                                 std::span<const double> upper, Rng &rng);

struct RefineOptions
{
    double initial_step{0.05};  ///< fraction of each edge
    double contraction{0.5};
    double tolerance{1e-6};     ///< smallest normalized step
    std::int64_t max_evals{20000};
};

struct RefineResult
{
    std::vector<double> y;
    double f{0.0};
    std::int64_t evals{0};
};

/// Bounded simplex search from y0 followed by a compass poll, integer components
/// frozen. Never returns a worse point than y0. `f0` skips the initial evaluation when known.
RefineResult local_refine(std::span<const double> y0, const BoxProblem &problem, const RefineOptions &options = {},
                          std::optional<double> f0 = std::nullopt);

struct MultistartOptions
{
    std::size_t n_samples{100};
    std::size_t n_best{3};
    std::size_t n_runs{30};
    std::uint64_t seed{1};
    /// Total budget for all runs; 0 uses `refine.max_evals` per refinement instead.
    std::int64_t max_evals{0};
    double crowding_threshold{1e-3};
    RefineOptions refine{};
};

struct MultistartReport
{
    std::size_t samples_drawn{0};
    std::int64_t evals{0};
    SolutionArchive minima;         ///< refined points, deduplicated
    std::vector<double> run_best;   ///< best refined value per run
};

/// Throws ValidationError when n_best exceeds n_samples or a count is zero.
MultistartReport multistart(const BoxProblem &problem, const MultistartOptions &options);

}  // namespace mga
