#include "mga/astro.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mga
{

namespace
{

// Stumpff functions c2(z), c3(z).
void stumpff(double z, double &c2, double &c3)
{
    if (std::abs(z) < 0.1)
    {
        // Alternating series; |z| < 0.1 keeps the truncation below 1e-17.
        double term2 = 0.5;
        double term3 = 1.0 / 6.0;
        c2 = term2;
        c3 = term3;
        for (int k = 1; k < 9; ++k)
        {
            term2 *= -z / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
            term3 *= -z / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
            c2 += term2;
            c3 += term3;
        }
        return;
    }
    if (z > 0.0)
    {
        const double s = std::sqrt(z);
        c2 = (1.0 - std::cos(s)) / z;
        c3 = (s - std::sin(s)) / (s * z);
    }
    else
    {
        const double s = std::sqrt(-z);
        c2 = (std::cosh(s) - 1.0) / (-z);
        c3 = (std::sinh(s) - s) / (s * -z);
    }
}

}  // namespace

CartesianState propagate_kepler(const CartesianState &state, double mu, double dt_days)
{
    const double r0 = state.r.norm();
    if (!(r0 > 0.0) || !(mu > 0.0) || !std::isfinite(dt_days))
        throw KeplerError("propagate_kepler: invalid state, mu or time step");
    if (dt_days == 0.0)
        return state;

    const double dt = dt_days * kSecondsPerDay;
    const double sqrt_mu = std::sqrt(mu);
    const double rv = state.r.dot(state.v);
    const double alpha = 2.0 / r0 - state.v.squaredNorm() / mu;  // 1/a
    const double sigma0 = rv / sqrt_mu;
    const double target = sqrt_mu * dt;

    // F(x) is strictly increasing in x with derivative equal to the radius.
    auto F = [&](double x, double &dF, double &c2, double &c3) {
        const double z = alpha * x * x;
        stumpff(z, c2, c3);
        dF = sigma0 * x * (1.0 - z * c3) + (1.0 - alpha * r0) * x * x * c2 + r0;
        const double val = sigma0 * x * x * c2 + (1.0 - alpha * r0) * x * x * x * c3 + r0 * x - target;
        if (!std::isfinite(val) || !std::isfinite(dF))
            return x > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
        return val;
    };

    double guess;
    if (alpha > 1e-12)
    {
        guess = sqrt_mu * dt * alpha;
    }
    else if (alpha < -1e-12)
    {
        const double a = 1.0 / alpha;
        const double sgn = dt > 0.0 ? 1.0 : -1.0;
        const double arg = (-2.0 * mu * alpha * dt) / (rv + sgn * std::sqrt(-mu * a) * (1.0 - r0 * alpha));
        guess = (arg > 0.0) ? sgn * std::sqrt(-a) * std::log(arg) : target / r0;
    }
    else
    {
        guess = target / r0;
    }
    if (!std::isfinite(guess) || guess == 0.0 || (guess > 0.0) != (dt > 0.0))
        guess = target / r0;

    double dF = 0.0, c2 = 0.0, c3 = 0.0;
    double lo, hi;
    if (dt > 0.0)
    {
        lo = 0.0;
        hi = guess;
        for (int k = 0; F(hi, dF, c2, c3) < 0.0; ++k)
        {
            if (k > 200)
                throw KeplerError("propagate_kepler: cannot bracket the universal anomaly");
            lo = hi;
            hi *= 2.0;
        }
    }
    else
    {
        hi = 0.0;
        lo = guess;
        for (int k = 0; F(lo, dF, c2, c3) > 0.0; ++k)
        {
            if (k > 200)
                throw KeplerError("propagate_kepler: cannot bracket the universal anomaly");
            hi = lo;
            lo *= 2.0;
        }
    }

    double x = std::clamp(guess, lo, hi);
    bool converged = false;
    for (int iter = 0; iter < 100; ++iter)
    {
        const double val = F(x, dF, c2, c3);
        if (val == 0.0)
        {
            converged = true;
            break;
        }
        if (val < 0.0)
            lo = x;
        else
            hi = x;
        double next = x - val / dF;
        if (!(next > lo && next < hi) || !std::isfinite(next))
            next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 1e-15 * std::max(1.0, std::abs(x)))
        {
            x = next;
            converged = true;
            break;
        }
        x = next;
    }
    if (!converged)
        throw KeplerError("propagate_kepler: universal Kepler iteration did not converge");

    F(x, dF, c2, c3);
    const double x2 = x * x;
    const double f = 1.0 - x2 * c2 / r0;
    const double g = dt - x2 * x * c3 / sqrt_mu;
    const Vec3 r = f * state.r + g * state.v;
    const double rn = r.norm();
    const double fdot = sqrt_mu / (rn * r0) * x * (alpha * x2 * c3 - 1.0);
    const double gdot = 1.0 - x2 * c2 / rn;
    // Near-rectilinear hyperbolas lose all precision in f and g; the Lagrange
    // identity f*gdot - fdot*g = 1 exposes it.
    if (!std::isfinite(rn) || std::abs(f * gdot - fdot * g - 1.0) > 1e-9 * (std::abs(f * gdot) + std::abs(fdot * g)))
        throw KeplerError("propagate_kepler: ill-conditioned orbit, f and g lost precision");
    return {r, fdot * state.r + gdot * state.v, state.epoch + dt_days};
}

namespace
{

// Izzo's zero-revolution Lambert solver, following the structure of the
// published algorithm (Izzo 2015, Cel. Mech. Dyn. Astr.).
class IzzoLambert
{
public:
    explicit IzzoLambert(double lambda) : lambda_(lambda), lambda2_(lambda * lambda) {}

    double x2tof(double x) const
    {
        const double battin = 0.01;
        const double lagrange = 0.2;
        const double dist = std::abs(x - 1.0);
        if (dist < lagrange && dist > battin)
            return x2tof_lagrange(x);

        const double E = x * x - 1.0;
        const double rho = std::abs(E);
        const double z = std::sqrt(1.0 + lambda2_ * E);
        if (dist < battin)
        {
            const double eta = z - lambda_ * x;
            const double s1 = 0.5 * (1.0 - lambda_ - x * eta);
            const double q = 4.0 / 3.0 * hypergeometric(s1, 1e-14);
            return (eta * eta * eta * q + 4.0 * lambda_ * eta) / 2.0;
        }
        const double y = std::sqrt(rho);
        const double g = x * z - lambda_ * E;
        double d;
        if (E < 0.0)
            d = std::acos(std::clamp(g, -1.0, 1.0));
        else
            d = std::log(y * (z - lambda_ * x) + g);
        return (x - lambda_ * z - d / y) / E;
    }

    void derivatives(double x, double T, double &dT, double &ddT, double &dddT) const
    {
        const double l3 = lambda2_ * lambda_;
        const double umx2 = 1.0 - x * x;
        const double y = std::sqrt(1.0 - lambda2_ * umx2);
        const double y2 = y * y;
        const double y3 = y2 * y;
        dT = (3.0 * T * x - 2.0 + 2.0 * l3 * x / y) / umx2;
        ddT = (3.0 * T + 5.0 * x * dT + 2.0 * (1.0 - lambda2_) * l3 / y3) / umx2;
        dddT = (7.0 * x * ddT + 8.0 * dT - 6.0 * (1.0 - lambda2_) * lambda2_ * l3 * x / y3 / y2) / umx2;
    }

    double initial_guess(double T) const
    {
        const double T00 = std::acos(lambda_) + lambda_ * std::sqrt(1.0 - lambda2_);
        const double T1 = 2.0 / 3.0 * (1.0 - lambda2_ * lambda_);
        if (T >= T00)
            return std::pow(T00 / T, 2.0 / 3.0) - 1.0;
        if (T < T1)
            return 2.5 * T1 / T * (T1 - T) / (1.0 - lambda2_ * lambda2_ * lambda_) + 1.0;
        return std::pow(T / T00, std::log(2.0) / std::log(T1 / T00)) - 1.0;
    }

private:
    double x2tof_lagrange(double x) const
    {
        const double a = 1.0 / (1.0 - x * x);
        if (a > 0.0)
        {
            const double alfa = 2.0 * std::acos(x);
            double beta = 2.0 * std::asin(std::sqrt(lambda2_ / a));
            if (lambda_ < 0.0)
                beta = -beta;
            return a * std::sqrt(a) * ((alfa - std::sin(alfa)) - (beta - std::sin(beta))) / 2.0;
        }
        const double alfa = 2.0 * std::acosh(x);
        double beta = 2.0 * std::asinh(std::sqrt(-lambda2_ / a));
        if (lambda_ < 0.0)
            beta = -beta;
        return -a * std::sqrt(-a) * ((beta - std::sinh(beta)) - (alfa - std::sinh(alfa))) / 2.0;
    }

    static double hypergeometric(double z, double tol)
    {
        double sj = 1.0, cj = 1.0, err = 1.0;
        for (int j = 0; err > tol && j < 1000; ++j)
        {
            const double cj1 = cj * (3.0 + j) * (1.0 + j) / (2.5 + j) * z / (j + 1.0);
            sj += cj1;
            err = std::abs(cj1);
            cj = cj1;
        }
        return sj;
    }

    double lambda_;
    double lambda2_;
};

}  // namespace

LambertSolution lambert(const Vec3 &r1, const Vec3 &r2, double tof_days, double mu, Direction direction)
{
    if (!(tof_days > 0.0) || !std::isfinite(tof_days))
        throw LambertError("lambert: time of flight must be positive");
    if (!(mu > 0.0))
        throw LambertError("lambert: mu must be positive");

    const double R1 = r1.norm();
    const double R2 = r2.norm();
    if (!(R1 > 0.0) || !(R2 > 0.0))
        throw LambertError("lambert: zero position vector");

    const Vec3 ir1 = r1 / R1;
    const Vec3 ir2 = r2 / R2;
    const Vec3 cross = ir1.cross(ir2);
    const double sin_theta = cross.norm();
    const double cos_theta = ir1.dot(ir2);
    const double theta = std::atan2(sin_theta, cos_theta);  // in [0, pi]
    if (std::abs(theta - kPi) < kLambertSingularityTolerance)
        throw LambertError("lambert: transfer angle too close to 180 degrees");
    if (sin_theta == 0.0)
        throw LambertError("lambert: collinear position vectors");

    const double c = (r2 - r1).norm();
    const double s = 0.5 * (c + R1 + R2);
    const Vec3 ih = cross / sin_theta;
    double lambda = std::sqrt(std::max(0.0, 1.0 - c / s));

    Vec3 it1, it2;
    if (ih.z() < 0.0)
    {
        lambda = -lambda;
        it1 = ir1.cross(ih);
        it2 = ir2.cross(ih);
    }
    else
    {
        it1 = ih.cross(ir1);
        it2 = ih.cross(ir2);
    }
    it1.normalize();
    it2.normalize();
    if (direction == Direction::retrograde)
    {
        lambda = -lambda;
        it1 = -it1;
        it2 = -it2;
    }

    const double tof = tof_days * kSecondsPerDay;
    const double T = std::sqrt(2.0 * mu / (s * s * s)) * tof;

    const IzzoLambert solver(lambda);
    double x = solver.initial_guess(T);
    int iterations = 0;
    bool converged = false;
    for (; iterations < 60; ++iterations)
    {
        if (std::abs(1.0 - x * x) < 1e-14)
            x += 1e-12;
        const double tof_x = solver.x2tof(x);
        const double delta = tof_x - T;
        if (std::abs(delta) <= 1e-11 * T)
        {
            converged = true;
            break;
        }
        double dT, ddT, dddT;
        solver.derivatives(x, tof_x, dT, ddT, dddT);
        const double dT2 = dT * dT;
        const double next =
            x - delta * (dT2 - delta * ddT / 2.0) / (dT * (dT2 - delta * ddT) + dddT * delta * delta / 6.0);
        if (!std::isfinite(next) || next <= -1.0)
            break;
        if (std::abs(next - x) < 1e-15 * std::max(1.0, std::abs(x)))
        {
            x = next;
            converged = std::abs(solver.x2tof(x) - T) <= 1e-9 * T;
            break;
        }
        x = next;
    }
    if (!converged)
        throw LambertError("lambert: Householder iteration did not converge");

    const double gamma = std::sqrt(mu * s / 2.0);
    const double rho = (R1 - R2) / c;
    const double sigma = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    const double y = std::sqrt(1.0 - lambda * lambda + lambda * lambda * x * x);
    const double vr1 = gamma * ((lambda * y - x) - rho * (lambda * y + x)) / R1;
    const double vr2 = -gamma * ((lambda * y - x) + rho * (lambda * y + x)) / R2;
    const double vt = gamma * sigma * (y + lambda * x);

    LambertSolution out;
    out.v1 = vr1 * ir1 + (vt / R1) * it1;
    out.v2 = vr2 * ir2 + (vt / R2) * it2;
    out.iterations = iterations;
    return out;
}

Quaternion Quaternion::from_axis_angle(const Vec3 &axis, double angle)
{
    return {axis * std::sin(0.5 * angle), std::cos(0.5 * angle)};
}

Vec3 Quaternion::rotate(const Vec3 &v) const
{
    const Vec3 t = 2.0 * vec.cross(v);
    return v + w * t + vec.cross(t);
}

Vec3 rotate(const Vec3 &v, const Vec3 &axis, double angle)
{
    const double n = axis.norm();
    if (!(n > 0.0) || !std::isfinite(n))
        throw std::invalid_argument("rotate: zero rotation axis");
    if (std::abs(n - 1.0) > 1e-12)
        throw std::invalid_argument("rotate: rotation axis must be a unit vector");
    return Quaternion::from_axis_angle(axis, angle).rotate(v);
}

double beta_angle(double h_norm, double v_inf, const Body &body)
{
    if (!(v_inf > 0.0))
        throw FlybyError("beta_angle: v_inf must be positive");
    const double rp = body.radius * (1.0 + h_norm);
    const double e_h = 1.0 + rp * v_inf * v_inf / body.mu;
    return std::acos(1.0 / e_h);
}

Vec3 flyby_reference_direction(const Vec3 &v_in_rel, const Vec3 &v_planet, FlybyReference ref)
{
    const Vec3 u = v_in_rel.normalized();
    Vec3 n;
    if (ref == FlybyReference::xy_normal)
    {
        // Minus the part of +z orthogonal to u: eta in [pi/2, 3pi/2] then turns
        // v_in_rel counter-clockwise about +z, the energy-gaining side for prograde encounters.
        const Vec3 z_perp = Vec3::UnitZ() - u.z() * u;
        n = -z_perp;
    }
    else
    {
        n = v_planet.cross(u);
    }
    const double norm = n.norm();
    if (!(norm > 1e-12))
        throw FlybyError("flyby: degenerate reference direction");
    return n / norm;
}

FlybyGeometry flyby_outgoing(const Vec3 &v_in_rel, const Vec3 &v_planet, double eta, double h_norm,
                             const Body &body, FlybyReference ref)
{
    const double v_inf = v_in_rel.norm();
    if (!(v_inf > 0.0) || !std::isfinite(v_inf))
        throw FlybyError("flyby: zero incoming relative velocity");

    const Vec3 u = v_in_rel / v_inf;
    const Vec3 n_i = flyby_reference_direction(v_in_rel, v_planet, ref);

    FlybyGeometry g;
    g.v_in_rel = v_in_rel;
    g.eta = eta;
    g.h_norm = h_norm;
    g.n_plane = Quaternion::from_axis_angle(u, eta).rotate(n_i).normalized();
    g.beta = beta_angle(h_norm, v_inf, body);
    g.gamma = kPi - 2.0 * g.beta;
    g.v_out_rel = Quaternion::from_axis_angle(g.n_plane, g.gamma).rotate(v_in_rel);
    return g;
}

}  // namespace mga
