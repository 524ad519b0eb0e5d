#pragma once

#include "mga/epoch.hpp"
#include "mga/state.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mga
{

/// Linear secular drift of each element, per day. Mean anomaly drift is in
/// addition to the two-body mean motion sqrt(mu / a^3).
struct ElementRates
{
    double a{0.0};     ///< km/day
    double e{0.0};     ///< 1/day
    double i{0.0};     ///< rad/day
    double raan{0.0};  ///< rad/day
    double argp{0.0};  ///< rad/day
    double M{0.0};     ///< rad/day
};

/// Heliocentric mean Keplerian elements referred to epoch_ref.
struct KeplerElements
{
    double a{0.0};     ///< semi-major axis, km
    double e{0.0};
    double i{0.0};     ///< rad
    double raan{0.0};  ///< rad
    double argp{0.0};  ///< rad
    double M0{0.0};    ///< mean anomaly at epoch_ref, rad
    ElementRates rates{};
    Epoch epoch_ref{};
};

struct Body
{
    int id{0};
    std::string name;
    double mu{0.0};            ///< km^3/s^2
    double radius{0.0};        ///< km
    double min_altitude{0.0};  ///< lowest admissible flyby altitude, km
    KeplerElements elements{};

    /// Smallest admissible pericenter altitude normalized by the mean radius.
    double min_altitude_ratio() const { return radius > 0.0 ? min_altitude / radius : 0.0; }
};

class BodyCatalog
{
public:
    BodyCatalog() = default;

    /// Throws ValidationError on duplicate ids or non-physical values.
    BodyCatalog(double central_mu, std::vector<Body> bodies);

    double central_mu() const noexcept { return central_mu_; }
    std::span<const Body> bodies() const noexcept { return bodies_; }
    std::size_t size() const noexcept { return bodies_.size(); }

    bool contains(int id) const noexcept;

    /// Throws ValidationError for an unknown id.
    const Body &body(int id) const;
    const Body &by_name(std::string_view name) const;

    /// Keplerian period of a body from its semi-major axis (rates ignored), days.
    double orbital_period_days(int id) const;

private:
    double central_mu_{0.0};
    std::vector<Body> bodies_;
};

/// Solves E - e sin E = M for elliptic orbits; safeguarded Newton, |residual| < 1e-13.
/// Throws KeplerError when e is outside [0, 1) or iteration fails.
double solve_kepler(double mean_anomaly, double e);

/// Elements with secular rates applied at `epoch` (mean anomaly includes mean motion).
KeplerElements elements_at(const KeplerElements &el, double central_mu, Epoch epoch);

/// Cartesian state of a Keplerian orbit; velocity is the analytic time derivative of
/// the position (two-body motion plus the secular drifts).
CartesianState state_from_elements(const KeplerElements &el, double central_mu, Epoch epoch);

/// Heliocentric state of catalog body `id` at `epoch`.
CartesianState body_state(const BodyCatalog &catalog, int id, Epoch epoch);

/// Parses the JSON catalog schema; errors carry a source line where known.
BodyCatalog load_catalog(std::string_view json_text);
BodyCatalog load_catalog_file(const std::filesystem::path &path);

}  // namespace mga
