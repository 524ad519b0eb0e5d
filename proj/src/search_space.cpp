#include "mga/search_space.hpp"

#include "mga/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mga
{

void BoxProblem::validate() const
{
    if (lower.empty() || lower.size() != upper.size())
        throw ValidationError("box problem needs matching, non-empty lower and upper bounds");
    if (!integer.empty() && integer.size() != lower.size())
        throw ValidationError("integer mask size does not match the bounds");
    for (std::size_t i = 0; i < lower.size(); ++i)
    {
        if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) || lower[i] > upper[i])
            throw ValidationError("bounds of component " + std::to_string(i) + " are not an ordered finite pair");
        if (is_integer(i) && (lower[i] != std::round(lower[i]) || upper[i] != std::round(upper[i])))
            throw ValidationError("integer component " + std::to_string(i) + " needs integer bounds");
    }
    if (!objective)
        throw ValidationError("box problem has no objective");
}

std::vector<double> BoxProblem::search_lower() const
{
    std::vector<double> lo = lower;
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (is_integer(i))
            lo[i] -= 0.5;
    return lo;
}

std::vector<double> BoxProblem::search_upper() const
{
    std::vector<double> hi = upper;
    for (std::size_t i = 0; i < hi.size(); ++i)
        if (is_integer(i))
            hi[i] += 0.5;
    return hi;
}

std::vector<double> BoxProblem::to_point(std::span<const double> y) const
{
    std::vector<double> x(y.begin(), y.end());
    for (std::size_t i = 0; i < x.size(); ++i)
        if (is_integer(i))
            x[i] = std::clamp(std::round(x[i]), lower[i], upper[i]);
    return x;
}

BoxProblem make_box_problem(const MgaProblem &problem)
{
    BoxProblem box;
    box.lower = problem.lower;
    box.upper = problem.upper;
    box.integer = problem.integer_mask();
    auto shared = std::make_shared<const MgaProblem>(problem);
    box.objective = [shared](std::span<const double> y) { return objective(y, *shared); };
    return box;
}

double normalized_distance(std::span<const double> a, std::span<const double> b, std::span<const double> lower,
                           std::span<const double> upper)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        const double w = upper[i] - lower[i];
        if (w > 0.0)
        {
            const double d = (a[i] - b[i]) / w;
            s += d * d;
        }
    }
    return std::sqrt(s);
}

std::optional<double> Evaluator::try_eval(std::span<const double> y)
{
    if (exhausted())
        return std::nullopt;
    return eval(y);
}

double Evaluator::eval(std::span<const double> y)
{
    ++count_;
    const double f = problem_.objective(problem_.to_point(y));
    // NaN would break every ordering downstream.
    return std::isnan(f) ? std::numeric_limits<double>::infinity() : f;
}

Rng Rng::stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(a),    static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b),    static_cast<std::uint32_t>(b >> 32),
                      static_cast<std::uint32_t>(c),    static_cast<std::uint32_t>(c >> 32)};
    Rng rng;
    rng.engine_.seed(seq);
    return rng;
}

std::size_t Rng::index(std::size_t n)
{
    if (n <= 1)
        return 0;
    // Rejection sampling keeps the draw unbiased and platform independent.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % static_cast<std::uint64_t>(n);
    std::uint64_t x;
    do
        x = engine_();
    while (x >= limit);
    return static_cast<std::size_t>(x % n);
}

SolutionArchive::SolutionArchive(std::vector<double> lower, std::vector<double> upper, double threshold,
                                 std::size_t capacity)
    : lower_(std::move(lower)), upper_(std::move(upper)), threshold_(threshold), capacity_(capacity)
{
}

double SolutionArchive::best_f() const
{
    return entries_.empty() ? std::numeric_limits<double>::infinity() : entries_.front().f;
}

bool SolutionArchive::insert(std::span<const double> y, double f)
{
    if (!std::isfinite(f))
        return false;
    for (const ArchiveEntry &e : entries_)
        if (e.f <= f && normalized_distance(e.y, y, lower_, upper_) <= threshold_)
            return false;

    // Drop every worse neighbour, then insert in sorted position.
    std::erase_if(entries_, [&](const ArchiveEntry &e) {
        return normalized_distance(e.y, y, lower_, upper_) <= threshold_;
    });
    const auto pos = std::upper_bound(entries_.begin(), entries_.end(), f,
                                      [](double v, const ArchiveEntry &e) { return v < e.f; });
    if (static_cast<std::size_t>(pos - entries_.begin()) >= capacity_)
        return false;
    entries_.insert(pos, ArchiveEntry{std::vector<double>(y.begin(), y.end()), f});
    if (entries_.size() > capacity_)
        entries_.pop_back();
    return true;
}

void SolutionArchive::merge(const SolutionArchive &other)
{
    for (const ArchiveEntry &e : other.entries_)
        insert(e.y, e.f);
}

}  // namespace mga
