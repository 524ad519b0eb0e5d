#pragma once

#include "mga/astro.hpp"
#include "mga/ephemeris.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mga
{

/// Finite value added to the objective for infeasible or failed decodes; any
/// feasible total is far below it.
inline constexpr double kPenaltyBase = 1.0e4;

/// A DSM point beyond this heliocentric distance fails the decode: such arcs are
/// unphysical and the conic solvers lose precision on them.
inline constexpr double kMaxHeliocentricKm = 100.0 * kAstronomicalUnitKm;

enum class LaunchMode
{
    parameterized,     ///< launch asymptote (v_inf, alpha, delta) is part of the solution vector
    lambert_first_leg  ///< first phase is a plain Lambert arc, no DSM on it
};

enum class ObjectiveMode
{
    total_with_launch,  ///< launch v_inf + DSMs + arrival v_inf
    fixed_launch        ///< launch magnitude pinned to fixed_vinf_kms and left out of the sum
};

struct ArrivalConstraint
{
    enum class Kind
    {
        none,
        min_vinf,
        max_vinf
    };
    Kind kind{Kind::none};
    double value_kms{0.0};
};

/// Position of every variable in the solution vector; -1 when absent.
struct VariableLayout
{
    int n_integer{0};      ///< free-sequence slots at the head of y
    int v_inf{-1};
    int alpha{-1};
    int delta{-1};
    int t0{-1};
    std::vector<int> T;    ///< per phase, size n_phases
    std::vector<int> eps;  ///< per phase; eps[0] = -1 for a Lambert first leg
    std::vector<int> eta;  ///< per flyby, size n_phases - 1
    std::vector<int> h;    ///< per flyby
    std::vector<std::string> names;

    std::size_t size() const { return names.size(); }
};

struct SequenceSpec
{
    /// Fixed mode: the full list p_0 .. p_{Np-1}.
    std::vector<int> fixed;

    /// Free mode: departure, `slot_bounds.size()` integer slots, then arrival.
    /// A slot that resolves to the arrival body ends the trajectory there.
    bool free{false};
    int departure{0};
    int arrival{0};
    std::vector<std::pair<int, int>> slot_bounds;

    /// Number of bodies N_p (maximum, in free mode).
    int n_bodies() const
    {
        return free ? static_cast<int>(slot_bounds.size()) + 2 : static_cast<int>(fixed.size());
    }
};

struct MgaProblem
{
    std::string name;
    std::shared_ptr<const BodyCatalog> catalog;
    SequenceSpec sequence;
    LaunchMode launch_mode{LaunchMode::parameterized};
    ObjectiveMode objective_mode{ObjectiveMode::total_with_launch};
    double fixed_vinf_kms{0.0};
    bool arrival_term{true};  ///< include the arrival v_inf in the total (off for impactors)
    ArrivalConstraint arrival_constraint{};
    FlybyReference flyby_reference{FlybyReference::xy_normal};
    VariableLayout layout;
    std::vector<double> lower;
    std::vector<double> upper;

    int n_phases() const { return sequence.n_bodies() - 1; }
    std::size_t dimension() const { return lower.size(); }
    std::vector<bool> integer_mask() const;

    /// Bodies visited by y (free mode: slots rounded, truncated at the arrival body).
    std::vector<int> resolve_sequence(std::span<const double> y) const;
};

/// Per-variable box bounds in physical order. Missing angular entries default to their
/// full range; eps defaults to [0.01, 0.9].
struct ProblemBounds
{
    std::optional<std::pair<double, double>> v_inf;
    std::pair<double, double> alpha{0.0, kTwoPi};
    std::pair<double, double> delta{0.0, kPi};
    std::pair<double, double> t0{0.0, 0.0};
    std::vector<std::pair<double, double>> T;
    std::vector<std::pair<double, double>> eps;
    std::vector<std::pair<double, double>> eta;
    std::vector<std::pair<double, double>> h;
};

struct ProblemOptions
{
    std::string name;
    LaunchMode launch_mode{LaunchMode::parameterized};
    ObjectiveMode objective_mode{ObjectiveMode::total_with_launch};
    double fixed_vinf_kms{0.0};
    bool arrival_term{true};
    ArrivalConstraint arrival_constraint{};
    FlybyReference flyby_reference{FlybyReference::xy_normal};
};

/// Builds the layout and bound vectors, validating everything against the catalog.
/// Throws ValidationError.
MgaProblem make_problem(std::shared_ptr<const BodyCatalog> catalog, SequenceSpec sequence,
                        const ProblemBounds &bounds, const ProblemOptions &options);

/// Parses a problem file. A relative `catalog` path resolves against `base_dir`;
/// `catalog_override` replaces the file's catalog entirely.
MgaProblem load_problem(std::string_view json_text, const std::filesystem::path &base_dir = {},
                        std::shared_ptr<const BodyCatalog> catalog_override = nullptr);
MgaProblem load_problem_file(const std::filesystem::path &path,
                             std::shared_ptr<const BodyCatalog> catalog_override = nullptr);

/// v_inf (sin d cos a, sin d sin a, cos d).
Vec3 launch_asymptote(double v_inf, double alpha, double delta);

struct Leg
{
    int from_id{0};
    int to_id{0};
    double tof_days{0.0};
    double eps{0.0};
    CartesianState departure;  ///< spacecraft right after launch / flyby
    Epoch dsm_epoch{};
    Vec3 r_dsm{Vec3::Zero()};
    Vec3 dv_dsm{Vec3::Zero()};
    Epoch arrival_epoch{};
    Vec3 v_arrival{Vec3::Zero()};      ///< spacecraft heliocentric velocity at the target
    Vec3 v_inf_arrival{Vec3::Zero()};  ///< relative to the target
    double landing_residual{0.0};      ///< |r_end - r_target| / |r_target| from a forward propagation
};

struct Trajectory
{
    std::vector<int> sequence;
    std::vector<Leg> legs;
    std::vector<FlybyGeometry> flybys;
    Vec3 v_inf_launch{Vec3::Zero()};
    double dv_launch{0.0};
    double dv_dsm_total{0.0};
    double dv_arrival{0.0};
    double total_objective{0.0};  ///< unpenalized sum per the objective mode
    double tof_days{0.0};
};

/// Decodes y. Throws LambertError / FlybyError / KeplerError on failure and
/// ValidationError when y has the wrong length.
Trajectory decode(std::span<const double> y, const MgaProblem &problem);

/// Objective value for y; failures and constraint violations become finite penalties:
/// decode failure -> kPenaltyBase + 1e3 * (fraction of phases not completed);
/// arrival constraint violation -> total + kPenaltyBase + 100 * violation.
double objective(std::span<const double> y, const MgaProblem &problem);

/// Penalty-free objective of an already decoded trajectory (same sum as objective()).
double trajectory_cost(const Trajectory &trajectory, const MgaProblem &problem);

/// Lambert departure + arrival cost between two bodies; Lambert failure -> kPenaltyBase.
double two_impulse_cost(Epoch t0, double tof_days, int p1, int p2, const BodyCatalog &catalog);

struct DepartureImpulse
{
    enum class Mode
    {
        zero,
        along_planet_velocity,  ///< magnitude_kms along the departure planet's velocity
        vector                  ///< the explicit impulse `vector_kms`
    };
    Mode mode{Mode::zero};
    double magnitude_kms{0.0};
    Vec3 vector_kms{Vec3::Zero()};
};

/// Departure impulse, coast for eps*T, DSM, Lambert to p2 in (1-eps)*T.
/// Returns dv1 + dv_dsm + dv2; Lambert failure -> kPenaltyBase.
double three_impulse_cost(Epoch t0, double eps, double tof_days, int p1, int p2, DepartureImpulse dv1,
                          const BodyCatalog &catalog);

enum class GridMode
{
    two_impulse,
    three_impulse_best_eps
};

struct GridSpec
{
    int p1{3};
    int p2{4};
    double t0_min{0.0};
    double t0_max{0.0};
    double tof_min{0.0};
    double tof_max{0.0};
    int n_t0{2};
    int n_tof{2};
    GridMode mode{GridMode::two_impulse};
    DepartureImpulse dv1{};
    std::vector<double> eps_sweep{};  ///< empty -> 0.05, 0.10, ..., 0.95
};

struct GridResult
{
    std::vector<double> t0;
    std::vector<double> tof;
    std::vector<double> dv;  ///< row-major, dv[i * tof.size() + j] for (t0[i], tof[j])

    double at(std::size_t i, std::size_t j) const { return dv[i * tof.size() + j]; }
};

/// Throws ValidationError for fewer than 2 points per axis or unknown ids.
GridResult grid_scan(const GridSpec &spec, const BodyCatalog &catalog);

}  // namespace mga
