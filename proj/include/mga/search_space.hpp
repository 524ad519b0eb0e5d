#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace mga
{

struct MgaProblem;

/// Box-constrained minimization problem. Integer components are searched as
/// continuous values in [lo - 0.5, hi + 0.5] and rounded before every evaluation.
struct BoxProblem
{
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<bool> integer;  ///< empty means all continuous
    std::function<double(std::span<const double>)> objective;

    std::size_t dimension() const { return lower.size(); }
    bool is_integer(std::size_t i) const { return i < integer.size() && integer[i]; }

    /// Throws ValidationError on inconsistent sizes, reversed bounds or a missing objective.
    void validate() const;

    /// Continuous search box (integer slots widened by one half on each side).
    std::vector<double> search_lower() const;
    std::vector<double> search_upper() const;

    /// Point handed to the objective: integer slots rounded and clamped to their bounds.
    std::vector<double> to_point(std::span<const double> y) const;
};

/// Objective of an MGA problem as a box problem over its full solution vector.
BoxProblem make_box_problem(const MgaProblem &problem);

/// Euclidean distance with every component scaled by its bound width (zero-width skipped).
double normalized_distance(std::span<const double> a, std::span<const double> b, std::span<const double> lower,
                           std::span<const double> upper);

/// Counts evaluations against a hard limit.
class Evaluator
{
public:
    Evaluator(const BoxProblem &problem, std::int64_t limit) : problem_(problem), limit_(limit) {}

    /// Evaluates the rounded point; nullopt once the limit is reached.
    std::optional<double> try_eval(std::span<const double> y);
    /// Evaluates regardless of the limit (initial populations).
    double eval(std::span<const double> y);

    std::int64_t count() const { return count_; }
    std::int64_t limit() const { return limit_; }
    bool exhausted() const { return count_ >= limit_; }
    const BoxProblem &problem() const { return problem_; }

private:
    const BoxProblem &problem_;
    std::int64_t limit_;
    std::int64_t count_{0};
};

/// mt19937_64 stream with platform-independent uniform draws.
class Rng
{
public:
    Rng() : Rng(0) {}
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    /// Independent stream keyed by (seed, a, b, c).
    static Rng stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n).
    std::size_t index(std::size_t n);
    bool coin() { return (engine_() >> 63) != 0; }

private:
    std::mt19937_64 engine_;
};

struct ArchiveEntry
{
    std::vector<double> y;
    double f{0.0};
};

/// Best-first list of distinct solutions. Entries closer than `threshold` in
/// bounds-normalized distance are merged, keeping the better one.
class SolutionArchive
{
public:
    SolutionArchive() = default;
    SolutionArchive(std::vector<double> lower, std::vector<double> upper, double threshold,
                    std::size_t capacity = 500);

    /// Returns true when the entry was stored (new or better than its neighbour).
    bool insert(std::span<const double> y, double f);
    void merge(const SolutionArchive &other);

    const std::vector<ArchiveEntry> &entries() const { return entries_; }
    std::vector<ArchiveEntry> &mutable_entries() { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const ArchiveEntry &best() const { return entries_.front(); }
    double best_f() const;
    double threshold() const { return threshold_; }
    std::size_t capacity() const { return capacity_; }
    const std::vector<double> &lower() const { return lower_; }
    const std::vector<double> &upper() const { return upper_; }

private:
    std::vector<double> lower_;
    std::vector<double> upper_;
    double threshold_{1e-3};
    std::size_t capacity_{500};
    std::vector<ArchiveEntry> entries_;
};

}  // namespace mga
