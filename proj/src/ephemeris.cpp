#include "mga/ephemeris.hpp"

#include "json_util.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace mga
{

namespace
{

double wrap_two_pi(double angle)
{
    double w = std::fmod(angle, kTwoPi);
    if (w < 0.0)
        w += kTwoPi;
    return w;
}

void check_elements(const std::string &name, const KeplerElements &el)
{
    if (!std::isfinite(el.a) || !std::isfinite(el.e) || !std::isfinite(el.i) || !std::isfinite(el.raan) ||
        !std::isfinite(el.argp) || !std::isfinite(el.M0) || !std::isfinite(el.epoch_ref.mjd2000))
        throw ValidationError("body '" + name + "': non-finite orbital element");
    if (el.e < 0.0)
        throw ValidationError("body '" + name + "': eccentricity must be non-negative");
    if (el.e >= 1.0)
        throw ValidationError("body '" + name + "': only elliptic orbits (e < 1) are supported");
    if (el.a <= 0.0)
        throw ValidationError("body '" + name + "': semi-major axis must be positive");
}

/// Line of the n-th (0-based) occurrence of `"key"`; 0 when there are fewer.
int nth_key_line(std::string_view text, std::string_view key, std::size_t n)
{
    const std::string quoted = "\"" + std::string(key) + "\"";
    std::size_t pos = 0;
    for (std::size_t k = 0;; ++k, pos += quoted.size())
    {
        pos = text.find(quoted, pos);
        if (pos == std::string_view::npos)
            return 0;
        if (k == n)
            return detail::line_at_offset(text, pos);
    }
}

}  // namespace

BodyCatalog::BodyCatalog(double central_mu, std::vector<Body> bodies)
    : central_mu_(central_mu), bodies_(std::move(bodies))
{
    if (!(central_mu_ > 0.0))
        throw ValidationError("central gravitational parameter must be positive");
    std::set<int> ids;
    for (auto &b : bodies_)
    {
        if (!ids.insert(b.id).second)
            throw ValidationError("duplicate body id " + std::to_string(b.id));
        if (!(b.mu > 0.0))
            throw ValidationError("body '" + b.name + "': mu must be positive");
        if (b.radius < 0.0 || b.min_altitude < 0.0)
            throw ValidationError("body '" + b.name + "': radius and minimum altitude must be non-negative");
        check_elements(b.name, b.elements);
        b.elements.i = wrap_two_pi(b.elements.i);
        b.elements.raan = wrap_two_pi(b.elements.raan);
        b.elements.argp = wrap_two_pi(b.elements.argp);
        b.elements.M0 = wrap_two_pi(b.elements.M0);
    }
    std::sort(bodies_.begin(), bodies_.end(), [](const Body &l, const Body &r) { return l.id < r.id; });
}

bool BodyCatalog::contains(int id) const noexcept
{
    return std::any_of(bodies_.begin(), bodies_.end(), [id](const Body &b) { return b.id == id; });
}

const Body &BodyCatalog::body(int id) const
{
    const auto it = std::lower_bound(bodies_.begin(), bodies_.end(), id,
                                     [](const Body &b, int key) { return b.id < key; });
    if (it == bodies_.end() || it->id != id)
        throw ValidationError("unknown body id " + std::to_string(id));
    return *it;
}

const Body &BodyCatalog::by_name(std::string_view name) const
{
    for (const auto &b : bodies_)
        if (b.name == name)
            return b;
    throw ValidationError("unknown body '" + std::string(name) + "'");
}

double BodyCatalog::orbital_period_days(int id) const
{
    const double a = body(id).elements.a;
    return kTwoPi * std::sqrt(a * a * a / central_mu_) / kSecondsPerDay;
}

double solve_kepler(double mean_anomaly, double e)
{
    if (!(e >= 0.0 && e < 1.0) || !std::isfinite(mean_anomaly))
        throw KeplerError("Kepler equation: eccentricity must lie in [0, 1)");

    const double turns = std::floor(mean_anomaly / kTwoPi);
    const double M = mean_anomaly - turns * kTwoPi;

    // f(E) = E - e sin E - M is increasing on [0, 2pi] with f(0) <= 0 <= f(2pi).
    double lo = 0.0;
    double hi = kTwoPi;
    double E = M + e * std::sin(M);
    for (int iter = 0; iter < 50; ++iter)
    {
        const double f = E - e * std::sin(E) - M;
        if (std::abs(f) < 1e-14)
            return E + turns * kTwoPi;
        if (f < 0.0)
            lo = E;
        else
            hi = E;
        const double fp = 1.0 - e * std::cos(E);
        double next = E - f / fp;
        if (!(next > lo && next < hi))
            next = 0.5 * (lo + hi);
        if (std::abs(next - E) <= 4e-16 * std::max(1.0, std::abs(E)))
        {
            E = next;
            if (std::abs(E - e * std::sin(E) - M) < 1e-13)
                return E + turns * kTwoPi;
            break;
        }
        E = next;
    }
    throw KeplerError("Kepler equation did not converge (corrupt elements?)");
}

KeplerElements elements_at(const KeplerElements &el, double central_mu, Epoch epoch)
{
    const double dt = epoch - el.epoch_ref;
    const double n = std::sqrt(central_mu / (el.a * el.a * el.a)) * kSecondsPerDay;  // rad/day
    KeplerElements out = el;
    out.a = el.a + el.rates.a * dt;
    out.e = el.e + el.rates.e * dt;
    out.i = el.i + el.rates.i * dt;
    out.raan = el.raan + el.rates.raan * dt;
    out.argp = el.argp + el.rates.argp * dt;
    out.M0 = el.M0 + (n + el.rates.M) * dt;
    out.epoch_ref = epoch;
    return out;
}

CartesianState state_from_elements(const KeplerElements &el, double central_mu, Epoch epoch)
{
    const KeplerElements cur = elements_at(el, central_mu, epoch);
    if (!(cur.a > 0.0) || !(cur.e >= 0.0 && cur.e < 1.0))
        throw KeplerError("elements drifted outside the elliptic domain");

    const double E = solve_kepler(cur.M0, cur.e);
    const double cosE = std::cos(E);
    const double sinE = std::sin(E);
    const double b_over_a = std::sqrt(1.0 - cur.e * cur.e);
    const double one_minus_ecosE = 1.0 - cur.e * cosE;

    // Total time derivative, secular drifts included, so that the velocity is
    // the exact derivative of the position returned here.
    const ElementRates &rt = el.rates;
    const double M_dot = std::sqrt(central_mu / (el.a * el.a * el.a)) + rt.M / kSecondsPerDay;  // rad/s
    const double e_dot = rt.e / kSecondsPerDay;
    const double E_dot = (M_dot + e_dot * sinE) / one_minus_ecosE;

    const Vec3 r_pf(cur.a * (cosE - cur.e), cur.a * b_over_a * sinE, 0.0);
    Vec3 v_pf(-cur.a * sinE * E_dot, cur.a * b_over_a * cosE * E_dot, 0.0);
    v_pf += (rt.a / kSecondsPerDay / cur.a) * r_pf;
    v_pf += e_dot * Vec3(-cur.a, -cur.a * cur.e / b_over_a * sinE, 0.0);

    const double cO = std::cos(cur.raan), sO = std::sin(cur.raan);
    const double ci = std::cos(cur.i), si = std::sin(cur.i);
    const double cw = std::cos(cur.argp), sw = std::sin(cur.argp);
    Eigen::Matrix3d R;
    R << cO * cw - sO * sw * ci, -cO * sw - sO * cw * ci, sO * si,
         sO * cw + cO * sw * ci, -sO * sw + cO * cw * ci, -cO * si,
         sw * si, cw * si, ci;

    const Vec3 r = R * r_pf;
    // Frame rotation rate: node about +z, inclination about the node line, argp about the orbit normal.
    const Vec3 omega = (rt.raan * Vec3::UnitZ() + rt.i * Vec3(cO, sO, 0.0) + rt.argp * R.col(2)) / kSecondsPerDay;
    return {r, R * v_pf + omega.cross(r), epoch};
}

CartesianState body_state(const BodyCatalog &catalog, int id, Epoch epoch)
{
    return state_from_elements(catalog.body(id).elements, catalog.central_mu(), epoch);
}

BodyCatalog load_catalog(std::string_view text)
{
    using detail::Json;
    using detail::optional_field;
    using detail::require;

    const Json root = detail::parse_json(text);
    if (!root.is_object())
        throw ValidationError("catalog root must be an object", 1);

    const double central_mu = require<double>(root, "central_mu_km3s2", text);
    const auto bodies_it = root.find("bodies");
    if (bodies_it == root.end() || !bodies_it->is_array())
        throw ValidationError("catalog needs a 'bodies' array", detail::line_of_key(text, "bodies"));

    std::vector<Body> bodies;
    std::set<int> seen;
    for (const Json &jb : *bodies_it)
    {
        Body b;
        b.id = require<int>(jb, "id", text);
        if (!seen.insert(b.id).second)
            throw ValidationError("duplicate body id " + std::to_string(b.id),
                                  nth_key_line(text, "id", bodies.size()));
        b.name = require<std::string>(jb, "name", text);
        b.mu = require<double>(jb, "mu_km3s2", text);
        b.radius = require<double>(jb, "radius_km", text);
        b.min_altitude = optional_field<double>(jb, "min_altitude_km", 0.0, text);

        const auto el_it = jb.find("elements");
        if (el_it == jb.end() || !el_it->is_object())
            throw ValidationError("body '" + b.name + "' needs an 'elements' object",
                                  nth_key_line(text, "id", bodies.size()));
        const Json &je = *el_it;
        KeplerElements &el = b.elements;
        el.a = require<double>(je, "a_km", text);
        el.e = require<double>(je, "e", text);
        el.i = require<double>(je, "i_rad", text);
        el.raan = require<double>(je, "raan_rad", text);
        el.argp = require<double>(je, "argp_rad", text);
        el.M0 = require<double>(je, "M0_rad", text);
        el.epoch_ref = {require<double>(je, "epoch_mjd2000", text)};
        if (const auto r_it = je.find("rates"); r_it != je.end())
        {
            const Json &jr = *r_it;
            el.rates.a = optional_field<double>(jr, "a_km", 0.0, text);
            el.rates.e = optional_field<double>(jr, "e", 0.0, text);
            el.rates.i = optional_field<double>(jr, "i_rad", 0.0, text);
            el.rates.raan = optional_field<double>(jr, "raan_rad", 0.0, text);
            el.rates.argp = optional_field<double>(jr, "argp_rad", 0.0, text);
            el.rates.M = optional_field<double>(jr, "M_rad", 0.0, text);
        }
        try
        {
            // Validate per body so errors can point at the entry.
            BodyCatalog(central_mu, {b});
        }
        catch (const ValidationError &e)
        {
            throw ValidationError(e.what(), nth_key_line(text, "id", bodies.size()));
        }
        bodies.push_back(std::move(b));
    }
    return BodyCatalog(central_mu, std::move(bodies));
}

BodyCatalog load_catalog_file(const std::filesystem::path &path)
{
    return load_catalog(detail::read_text_file(path));
}

}  // namespace mga
