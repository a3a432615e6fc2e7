#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "sedlab/errors.hpp"
#include "sedlab/stats.hpp"
#include "sedlab/units.hpp"
#include "sedlab/zpf.hpp"

using namespace sedlab;

namespace {
constexpr double kPi = std::numbers::pi;

FieldModeSet single_mode(const PhysicalScale& s, double omega, double domega,
                         double phase) {
    FieldModeSet m;
    m.omegas = {omega};
    m.amplitudes = {mode_amplitude(s, omega, domega)};
    m.phases = {{phase}};
    m.components = 1;
    m.omega_min = omega - 0.5 * domega;
    m.omega_max = omega + 0.5 * domega;
    return m;
}
}  // namespace

TEST_SUITE("zpf") {

TEST_CASE("single-mode mean square field matches the spectral weight") {
    const PhysicalScale s = natural_scale(1e-3);
    const double omega = 1.3, domega = 0.01;
    const double a = mode_amplitude(s, omega, domega);

    // oracle: direct phase average of A^2 cos^2(phi)
    const double expected = oracle::phase_average(
        [&](double phi) { return a * a * std::cos(phi) * std::cos(phi); });
    const double target = 2.0 * s.hbar * omega * omega * omega * domega /
                          (3.0 * kPi * s.c * s.c * s.c);
    CHECK(expected == doctest::Approx(target).epsilon(1e-8));
    CHECK(0.5 * a * a == doctest::Approx(target).epsilon(1e-14));
}

TEST_CASE("mode-set construction guards") {
    const PhysicalScale s = natural_scale(1e-3);
    ModeSetSpec spec = ModeSetSpec::resonant_band(1.0, 0.25, 0, 7);
    CHECK_THROWS_AS(build_mode_set(s, spec), TooFewModes);
    spec.n_modes = 1;
    CHECK_THROWS_AS(build_mode_set(s, spec), TooFewModes);
    spec.n_modes = 16;
    spec.omega_min = 2.0;
    spec.omega_max = 1.0;
    CHECK_THROWS_AS(build_mode_set(s, spec), EmptyBandwidth);
    spec.omega_min = -1.0;
    CHECK_THROWS_AS(build_mode_set(s, spec), EmptyBandwidth);
}

TEST_CASE("identical seed gives a bit-identical mode set") {
    const PhysicalScale s = natural_scale(1e-3);
    const ModeSetSpec spec = ModeSetSpec::resonant_band(1.0, 0.25, 64, 99, 3);
    const FieldModeSet a = build_mode_set(s, spec);
    const FieldModeSet b = build_mode_set(s, spec);
    CHECK(a.omegas == b.omegas);
    CHECK(a.amplitudes == b.amplitudes);
    CHECK(a.phases == b.phases);
    for (double t : {0.0, 1.7, 133.1}) {
        CHECK(eval_field(a, t) == eval_field(b, t));
    }
    ModeSetSpec other = spec;
    other.seed = 100;
    CHECK(build_mode_set(s, other).phases != a.phases);
}

TEST_CASE("field evaluation closed cases") {
    const PhysicalScale s = natural_scale(1e-3);
    SUBCASE("all phases zero at t = 0 sums the amplitudes") {
        FieldModeSet m;
        m.omegas = {0.8, 1.0, 1.2};
        m.amplitudes = {0.3, 0.4, 0.5};
        m.phases = {{0.0, 0.0, 0.0}};
        m.components = 1;
        CHECK(eval_field_component(m, 0, 0.0) ==
              doctest::Approx(1.2).epsilon(1e-15));
    }
    SUBCASE("single mode with phase pi/2 vanishes at t = 0") {
        const FieldModeSet m = single_mode(s, 1.0, 0.01, kPi / 2.0);
        CHECK(eval_field_component(m, 0, 0.0) ==
              doctest::Approx(0.0).epsilon(1e-15));
    }
    SUBCASE("periodic on commensurate grids") {
        FieldModeSet m;
        m.omegas = {2.0, 4.0, 6.0};
        m.amplitudes = {0.2, 0.1, 0.05};
        m.phases = {{0.3, -1.2, 2.0}};
        m.components = 1;
        const double period = 2.0 * kPi / 2.0;  // g = 2 divides all modes
        for (double t : {0.0, 0.37, 1.9}) {
            CHECK(eval_field_component(m, 0, t) ==
                  doctest::Approx(eval_field_component(m, 0, t + period))
                      .epsilon(1e-12));
        }
    }
}

TEST_CASE("phasor evaluator tracks the exact cosine sum") {
    const PhysicalScale s = natural_scale(1e-3);
    const FieldModeSet m =
        build_mode_set(s, ModeSetSpec::resonant_band(1.0, 0.25, 128, 5));
    const double h = 0.05;
    FieldPhasors ph(m, 0.0, h, 4096);
    double worst = 0.0;
    for (int i = 0; i <= 20000; ++i) {
        worst = std::max(worst, std::abs(ph.value()[0] -
                                         eval_field_component(m, 0, ph.t())));
        ph.step();
    }
    CHECK(worst < 1e-11);
}

TEST_CASE("autocorrelation estimate converges to the discrete target") {
    const PhysicalScale s = natural_scale(1e-3);
    ModeSetSpec spec = ModeSetSpec::resonant_band(1.0, 0.25, 32, 21, 1);
    spec.jitter = false;
    const FieldModeSet m = build_mode_set(s, spec);

    SUBCASE("lag zero: sum of A^2/2") {
        double direct = 0.0;  // oracle: direct sum
        for (double a : m.amplitudes) direct += 0.5 * a * a;
        const SpectralEstimate est = estimate_autocorrelation(s, spec, 600, {0.0});
        CHECK(autocorrelation_target(m, 0.0) ==
              doctest::Approx(direct).epsilon(1e-14));
        CHECK(std::abs(est.autocorr[0] - direct) <= 3.0 * est.stderr[0]);
        CHECK(est.autocorr[0] > 0.0);
    }
    SUBCASE("single mode at lag pi/omega gives -A^2/2") {
        const FieldModeSet one = single_mode(s, 1.1, 0.02, 0.4);
        CHECK(autocorrelation_target(one, kPi / 1.1) ==
              doctest::Approx(-0.5 * one.amplitudes[0] * one.amplitudes[0])
                  .epsilon(1e-12));
    }
    SUBCASE("cross components decorrelate") {
        ModeSetSpec spec3 = spec;
        spec3.components = 3;
        const std::vector<double> lags{0.0, 1.0, 2.5};
        const SpectralEstimate cross =
            estimate_cross_correlation(s, spec3, 800, lags);
        for (std::size_t l = 0; l < lags.size(); ++l) {
            CHECK(std::abs(cross.autocorr[l]) <= 3.0 * cross.stderr[l]);
        }
    }
    SUBCASE("needs at least two realizations") {
        CHECK_THROWS_AS(estimate_autocorrelation(s, spec, 1, {0.0}),
                        InconsistentInputs);
    }
}

TEST_CASE("parseval: long time average of E^2 approaches sum A^2/2") {
    const PhysicalScale s = natural_scale(1e-3);
    const FieldModeSet m =
        build_mode_set(s, ModeSetSpec::resonant_band(1.0, 0.25, 64, 31));
    const double t_end = 40000.0, dt = 0.21;
    double acc = 0.0;
    std::size_t n = 0;
    FieldPhasors ph(m, 0.0, dt);
    while (ph.t() < t_end) {
        acc += ph.value()[0] * ph.value()[0];
        ++n;
        ph.step();
    }
    const double mean = acc / static_cast<double>(n);
    CHECK(std::abs(mean - m.variance()) < 0.01 * m.variance());
}

TEST_CASE("phases are uniform and independent across modes") {
    const PhysicalScale s = natural_scale(1e-3);
    SUBCASE("Kolmogorov-Smirnov against uniform (-pi, pi]") {
        const FieldModeSet m =
            build_mode_set(s, ModeSetSpec::resonant_band(1.0, 0.25, 4096, 17));
        std::vector<double> ph = m.phases[0];
        std::sort(ph.begin(), ph.end());
        double d = 0.0;
        const auto n = static_cast<double>(ph.size());
        for (std::size_t i = 0; i < ph.size(); ++i) {
            const double cdf = (ph[i] + kPi) / (2.0 * kPi);
            d = std::max(d, std::abs(cdf - static_cast<double>(i + 1) / n));
            d = std::max(d, std::abs(cdf - static_cast<double>(i) / n));
        }
        CHECK(d < 1.63 / std::sqrt(n));  // alpha = 0.01 critical value
    }
    SUBCASE("neighbour-mode phase correlation is noise-level") {
        const std::size_t n_modes = 64, n_real = 64;
        Accumulator mx, my;
        for (std::size_t r = 0; r < n_real; ++r) {
            ModeSetSpec spec = ModeSetSpec::resonant_band(1.0, 0.25, n_modes, 1000 + r);
            const FieldModeSet m = build_mode_set(s, spec);
            for (std::size_t a = 0; a + 1 < n_modes; ++a) {
                mx.add(m.phases[0][a]);
                my.add(m.phases[0][a + 1]);
            }
        }
        double sxy = 0.0, sxx = 0.0, syy = 0.0;
        for (std::size_t r = 0; r < n_real; ++r) {
            ModeSetSpec spec = ModeSetSpec::resonant_band(1.0, 0.25, n_modes, 1000 + r);
            const FieldModeSet m = build_mode_set(s, spec);
            for (std::size_t a = 0; a + 1 < n_modes; ++a) {
                const double dx = m.phases[0][a] - mx.mean();
                const double dy = m.phases[0][a + 1] - my.mean();
                sxy += dx * dy;
                sxx += dx * dx;
                syy += dy * dy;
            }
        }
        const double corr = sxy / std::sqrt(sxx * syy);
        CHECK(std::abs(corr) <
              3.0 / std::sqrt(static_cast<double>(n_modes * n_real)));
    }
}

TEST_CASE("vacuum energy density closed form") {
    const PhysicalScale s = natural_scale(1e-3);
    SUBCASE("matches the quadrature of the spectral density") {
        // oracle: integrate hbar w^3 / (2 pi^2 c^3) up to the cutoff
        const double cutoff = 1.0;
        const double byquad = oracle::integrate(
            [&](double w) {
                return s.hbar * w * w * w / (2.0 * kPi * kPi * s.c * s.c * s.c);
            },
            0.0, cutoff);
        CHECK(vacuum_energy_density(s, cutoff) ==
              doctest::Approx(byquad).epsilon(1e-10));
        CHECK(vacuum_energy_density(s, 1.0) ==
              doctest::Approx(s.hbar / (8.0 * kPi * kPi)).epsilon(1e-14));
    }
    SUBCASE("doubling the cutoff multiplies by 16") {
        for (double cutoff : {0.3, 1.0, 7.5}) {
            CHECK(vacuum_energy_density(s, 2.0 * cutoff) ==
                  doctest::Approx(16.0 * vacuum_energy_density(s, cutoff))
                      .epsilon(1e-13));
        }
    }
    SUBCASE("cutoff must be positive") {
        CHECK_THROWS_AS(vacuum_energy_density(s, 0.0), NonPositiveCutoff);
        CHECK_THROWS_AS(vacuum_energy_density(s, -1.0), NonPositiveCutoff);
    }
}

TEST_CASE("mode spec serializes to JSON and back") {
    ModeSetSpec spec = ModeSetSpec::resonant_band(1.0, 0.25, 256, 424242, 3);
    spec.spacing = Spacing::Logarithmic;
    spec.jitter = false;
    const ModeSetSpec back = mode_set_spec_from_json(to_json(spec));
    CHECK(back.omega_min == spec.omega_min);
    CHECK(back.omega_max == spec.omega_max);
    CHECK(back.n_modes == spec.n_modes);
    CHECK(back.spacing == spec.spacing);
    CHECK(back.seed == spec.seed);
    CHECK(back.components == spec.components);
    CHECK(back.jitter == spec.jitter);
}

TEST_CASE("logarithmic spacing covers the band with sorted modes") {
    const PhysicalScale s = natural_scale(1e-3);
    ModeSetSpec spec;
    spec.omega_min = 0.5;
    spec.omega_max = 8.0;
    spec.n_modes = 64;
    spec.spacing = Spacing::Logarithmic;
    spec.seed = 3;
    const FieldModeSet m = build_mode_set(s, spec);
    CHECK(std::is_sorted(m.omegas.begin(), m.omegas.end()));
    CHECK(m.omegas.front() >= 0.5);
    CHECK(m.omegas.back() <= 8.0);
}

}  // TEST_SUITE
