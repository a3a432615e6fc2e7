#include <doctest.h>

#include <cmath>

#include "sedlab/errors.hpp"
#include "sedlab/units.hpp"

using namespace sedlab;

TEST_SUITE("units") {

TEST_CASE("electron radiation-reaction time is of order 1e-23 s") {
    // Gaussian-cgs electron; tau = 2 e^2 / (3 m c^3) = 6.266e-24 s
    const PhysicalScale s = electron_scale(1.0e15);
    CHECK(s.tau() == doctest::Approx(6.266e-24).epsilon(1e-3));
    CHECK(s.tau() > 1e-24);
    CHECK(s.tau() < 1e-22);
}

TEST_CASE("tau is recomputed, never drifts from the defining formula") {
    const PhysicalScale s = make_scale(0.3, 2.0, 5.0, 1.5);
    const double expected = 2.0 * 0.3 * 0.3 / (3.0 * 2.0 * 125.0);
    CHECK(std::abs(s.tau() - expected) / expected < 1e-14);
}

TEST_CASE("non-positive inputs are rejected") {
    CHECK_THROWS_AS(make_scale(0.0, 1.0, 1.0, 1.0), NonPositiveInput);
    CHECK_THROWS_AS(make_scale(1e-3, -1.0, 1.0, 1.0), NonPositiveInput);
    CHECK_THROWS_AS(make_scale(1e-3, 1.0, 1.0, 0.0), NonPositiveInput);
    CHECK_THROWS_AS(natural_scale(0.0), NonPositiveInput);
}

TEST_CASE("strong coupling is out of scope") {
    // natural units: epsilon = tau * omega0 = 2 e^2 / 3
    CHECK_THROWS_AS(make_scale(1.0, 1.0, 1.0, 1.0), StrongCouplingOutOfScope);
    CHECK_THROWS_AS(natural_scale(0.1), StrongCouplingOutOfScope);
    CHECK_NOTHROW(natural_scale(0.099));
}

TEST_CASE("natural units: epsilon = 1e-3 gives tau = 1e-3") {
    const PhysicalScale s = natural_scale(1e-3);
    CHECK(s.hbar == 1.0);
    CHECK(s.mass == 1.0);
    CHECK(s.c == 1.0);
    CHECK(s.omega0 == 1.0);
    CHECK(s.tau() == doctest::Approx(1e-3).epsilon(1e-14));
    CHECK(s.epsilon() == doctest::Approx(1e-3).epsilon(1e-14));
}

TEST_CASE("dissipation time") {
    SUBCASE("natural units, epsilon = 1e-3 -> tau_d = 1000") {
        const PhysicalScale s = natural_scale(1e-3);
        CHECK(dissipation_time(s) == doctest::Approx(1000.0).epsilon(1e-12));
    }
    SUBCASE("electron in an atomic-scale oscillator: order 1e-11 s") {
        const PhysicalScale s = electron_scale(4.1e16);
        const double td = dissipation_time(s);
        CHECK(td > 1e-12);
        CHECK(td < 1e-10);
    }
    SUBCASE("monotone: larger coupling decays faster") {
        const double td1 = dissipation_time(natural_scale(1e-3));
        const double td2 = dissipation_time(natural_scale(2e-3));
        const double td3 = dissipation_time(natural_scale(5e-3));
        CHECK(td1 > td2);
        CHECK(td2 > td3);
    }
}

TEST_CASE("unit conversions round-trip to 1e-12") {
    const PhysicalScale s = electron_scale(4.1e16);
    const UnitSystem u(s);
    for (double v : {1.0, 3.7e-9, 2.4e11}) {
        CHECK(std::abs(u.to_physical_time(u.to_natural_time(v)) - v) <= 1e-12 * v);
        CHECK(std::abs(u.to_natural_energy(u.to_physical_energy(v)) - v) <= 1e-12 * v);
        CHECK(std::abs(u.to_physical_length(u.to_natural_length(v)) - v) <= 1e-12 * v);
    }
    // natural-unit magnitudes of one physical unit
    CHECK(u.time_unit() == doctest::Approx(1.0 / 4.1e16));
    CHECK(u.energy_unit() == doctest::Approx(s.hbar * s.omega0));
}

}  // TEST_SUITE
