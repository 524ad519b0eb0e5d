#pragma once

#include "mga/ephemeris.hpp"
#include "mga/state.hpp"

#include <cmath>

namespace mga
{

/// Two-body propagation by `dt_days` (negative allowed) with the universal-variable
/// formulation; valid for elliptic, near-parabolic and hyperbolic motion.
/// Throws KeplerError if the universal Kepler equation cannot be solved.
CartesianState propagate_kepler(const CartesianState &state, double mu, double dt_days);

enum class Direction
{
    prograde,
    retrograde
};

struct LambertSolution
{
    Vec3 v1;
    Vec3 v2;
    int iterations{0};
};

/// Zero-revolution Lambert arc from r1 to r2 in tof_days (Izzo's formulation,
/// Householder iterations). Transfer angle is measured counter-clockwise about +z
/// for prograde, clockwise for retrograde.
///
/// Throws LambertError when tof <= 0, when the transfer angle is within 1e-4 rad
/// of pi (the transfer plane is undefined), or when the iteration fails.
LambertSolution lambert(const Vec3 &r1, const Vec3 &r2, double tof_days, double mu,
                        Direction direction = Direction::prograde);

inline constexpr double kLambertSingularityTolerance = 1e-4;

/// Unit quaternion (vector part, scalar part).
struct Quaternion
{
    Vec3 vec{Vec3::Zero()};
    double w{1.0};

    /// Rotation by `angle` about the unit `axis`.
    static Quaternion from_axis_angle(const Vec3 &axis, double angle);

    Vec3 rotate(const Vec3 &v) const;
    double norm() const { return std::sqrt(vec.squaredNorm() + w * w); }
};

/// Rotates v about the unit axis by angle (right-hand rule).
/// Throws std::invalid_argument for a zero or non-unit axis.
Vec3 rotate(const Vec3 &v, const Vec3 &axis, double angle);

/// Half-angle beta of the flyby hyperbola's asymptotes measured from the apse
/// line: beta = acos(1 / e_h), e_h = 1 + r_p v_inf^2 / mu, r_p = R (1 + h_norm).
/// The velocity turn angle is pi - 2 beta. Throws FlybyError for v_inf <= 0.
double beta_angle(double h_norm, double v_inf, const Body &body);

enum class FlybyReference
{
    xy_normal,            ///< reference direction built from the ecliptic (xy) plane normal
    velocity_plane_normal ///< normal of the plane holding v_in_rel and the planet velocity
};

struct FlybyGeometry
{
    Vec3 v_in_rel{Vec3::Zero()};
    Vec3 v_out_rel{Vec3::Zero()};
    double eta{0.0};
    double h_norm{0.0};
    double beta{0.0};
    double gamma{0.0};  ///< turn angle pi - 2 beta
    Vec3 n_plane{Vec3::Zero()};
};

/// Unpowered linked-conic flyby: the hyperbola plane normal is the reference
/// direction rotated by eta about v_in_rel, and v_in_rel is turned by gamma about it.
/// Throws FlybyError when the reference direction is degenerate.
FlybyGeometry flyby_outgoing(const Vec3 &v_in_rel, const Vec3 &v_planet, double eta, double h_norm,
                             const Body &body, FlybyReference ref = FlybyReference::xy_normal);

/// Reference direction n_i used by flyby_outgoing (unit, normal to v_in_rel).
Vec3 flyby_reference_direction(const Vec3 &v_in_rel, const Vec3 &v_planet, FlybyReference ref);

}  // namespace mga
