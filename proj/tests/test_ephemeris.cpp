#include "mga/ephemeris.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

#include <random>

using namespace mga;
using testing_support::default_catalog;
using testing_support::frozen_catalog;
using testing_support::rel_err;

namespace
{

const char *kOneBody = R"({
  "central_mu_km3s2": 1.32712440018e11,
  "bodies": [
    {"id": 3, "name": "Earth", "mu_km3s2": 398600.4418, "radius_km": 6378.136,
     "elements": {"a_km": 1.496e8, "e": 0.0167, "i_rad": 0.0, "raan_rad": 0.0,
                  "argp_rad": 1.8, "M0_rad": -0.05, "epoch_mjd2000": 0.0}}
  ]
})";

}  // namespace

TEST_CASE("Kepler solver residual")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> M(-20.0, 20.0), E(0.0, 0.95);
    for (int k = 0; k < 20000; ++k)
    {
        const double m = M(rng), e = E(rng);
        const double ecc = solve_kepler(m, e);
        CHECK(std::abs(ecc - e * std::sin(ecc) - m) < 1e-13 * std::max(1.0, std::abs(m)));
    }
    CHECK_THROWS_AS(solve_kepler(1.0, 1.0), KeplerError);
    CHECK_THROWS_AS(solve_kepler(1.0, -0.1), KeplerError);
}

TEST_CASE("conic radius at the reference epoch")
{
    const BodyCatalog cat = frozen_catalog();
    const Body &earth = cat.by_name("Earth");
    const auto s = body_state(cat, earth.id, earth.elements.epoch_ref);
    const double E0 = solve_kepler(earth.elements.M0, earth.elements.e);
    CHECK(rel_err(s.r.norm(), earth.elements.a * (1.0 - earth.elements.e * std::cos(E0))) < 1e-9);
}

TEST_CASE("periodicity, energy and angular momentum with rates zeroed")
{
    const BodyCatalog cat = frozen_catalog();
    for (const Body &b : cat.bodies())
    {
        const double period = cat.orbital_period_days(b.id);
        const auto s0 = body_state(cat, b.id, Epoch{1234.5});
        const auto s1 = body_state(cat, b.id, Epoch{1234.5 + period});
        CHECK((s1.r - s0.r).norm() / s0.r.norm() < 1e-9);
        CHECK((s1.v - s0.v).norm() / s0.v.norm() < 1e-9);

        const Vec3 h0 = s0.r.cross(s0.v).normalized();
        for (double t : {-4000.0, 0.0, 777.7, 9000.0})
        {
            const auto s = body_state(cat, b.id, Epoch{t});
            const double energy = 0.5 * s.v.squaredNorm() - cat.central_mu() / s.r.norm();
            CHECK(rel_err(energy, -cat.central_mu() / (2.0 * b.elements.a)) < 1e-9);
            CHECK((s.r.cross(s.v).normalized() - h0).norm() < 1e-12);
        }
    }
}

TEST_CASE("velocity is the derivative of position")
{
    // Central difference as an independent check of the analytic velocity.
    const BodyCatalog &cat = default_catalog();
    for (const Body &b : cat.bodies())
    {
        const double h = 1e-3;
        const auto s = body_state(cat, b.id, Epoch{3000.0});
        const auto sp = body_state(cat, b.id, Epoch{3000.0 + h});
        const auto sm = body_state(cat, b.id, Epoch{3000.0 - h});
        const Vec3 fd = (sp.r - sm.r) / (2.0 * h * kSecondsPerDay);
        CHECK((fd - s.v).norm() / s.v.norm() < 1e-8);
    }
}

TEST_CASE("Earth at MJD2000 0 is near perihelion distance")
{
    const auto s = body_state(default_catalog(), 3, Epoch{0.0});
    CHECK(std::abs(s.r.norm() - 1.47e8) < 1e6);
    CHECK(std::abs(s.v.norm() - 30.29) < 0.1);
}

TEST_CASE("default catalog contents")
{
    const BodyCatalog &cat = default_catalog();
    CHECK(cat.size() == 11);
    for (int id = 1; id <= 11; ++id)
        CHECK(cat.contains(id));
    CHECK(cat.by_name("Jupiter").id == 5);
    CHECK(cat.by_name("67P").id == 10);
    CHECK(cat.by_name("1989ML").id == 11);
    CHECK_THROWS_AS(cat.body(42), ValidationError);
    CHECK(cat.orbital_period_days(3) == doctest::Approx(365.25).epsilon(1e-3));
}

TEST_CASE("catalog loading and validation")
{
    CHECK(load_catalog(kOneBody).size() == 1);

    std::string dup = kOneBody;
    const auto pos = dup.find("  ]");
    dup.insert(pos, R"(,    {"id": 3, "name": "Copy", "mu_km3s2": 1.0, "radius_km": 1.0,
     "elements": {"a_km": 1.0e8, "e": 0.1, "i_rad": 0.0, "raan_rad": 0.0,
                  "argp_rad": 0.0, "M0_rad": 0.0, "epoch_mjd2000": 0.0}}
)");
    try
    {
        load_catalog(dup);
        FAIL("duplicate id accepted");
    }
    catch (const ValidationError &e)
    {
        CHECK(std::string(e.what()).find("duplicate") != std::string::npos);
        CHECK(e.line() == 7);
    }

    std::string neg_e = kOneBody;
    neg_e.replace(neg_e.find("\"e\": 0.0167"), 11, "\"e\": -0.01");
    CHECK_THROWS_AS(load_catalog(neg_e), ValidationError);

    std::string bad_mu = kOneBody;
    bad_mu.replace(bad_mu.find("398600.4418"), 11, "0.0");
    CHECK_THROWS_AS(load_catalog(bad_mu), ValidationError);

    try
    {
        load_catalog("{\n  \"central_mu_km3s2\": 1.0,\n  \"bodies\": [ }");
        FAIL("malformed JSON accepted");
    }
    catch (const ValidationError &e)
    {
        CHECK(e.line() == 3);
    }

    try
    {
        load_catalog("{\n \"bodies\": []\n}");
        FAIL("missing mu accepted");
    }
    catch (const ValidationError &e)
    {
        CHECK(std::string(e.what()).find("central_mu_km3s2") != std::string::npos);
    }
}
