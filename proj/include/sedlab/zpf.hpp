#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sedlab/units.hpp"

namespace sedlab {

enum class Spacing { Uniform, Logarithmic };

// Serializable recipe for a mode set. Frequencies, amplitudes and phases are
// implied by (spec, scale); they are never stored in files.
struct ModeSetSpec {
    double omega_min = 0.0;
    double omega_max = 0.0;
    std::size_t n_modes = 0;
    Spacing spacing = Spacing::Uniform;
    std::uint64_t seed = 0;
    int components = 1;
    bool jitter = true;  // frequency jitter within each bin, seeded

    // Band centred on omega0 with half-width delta*omega0. A linear system
    // only responds near resonance, so this is the default for oscillator
    // runs.
    static ModeSetSpec resonant_band(double omega0, double delta,
                                     std::size_t n_modes, std::uint64_t seed,
                                     int components = 1);
};

std::string to_json(const ModeSetSpec& spec);
ModeSetSpec mode_set_spec_from_json(const std::string& text);

// One discrete realization of the zero-point field in the long-wavelength
// approximation. Each spatial component is an independent cosine sum
//   E_c(t) = sum_a A_a cos(omega_a t + phi_{c,a}),
// with phi i.i.d. uniform on (-pi, pi] and amplitudes fixed so the ensemble
// autocovariance reproduces the discretized zero-point spectrum over the
// band: <E_c(s) E_c(t)> = sum_a (A_a^2/2) cos omega_a (t - s).
struct FieldModeSet {
    std::vector<double> omegas;      // sorted ascending
    std::vector<double> amplitudes;  // A_a
    // phases[c][a], one stream per (component, mode)
    std::vector<std::vector<double>> phases;
    std::uint64_t seed = 0;
    double omega_min = 0.0;
    double omega_max = 0.0;
    int components = 1;

    std::size_t n_modes() const { return omegas.size(); }
    double max_omega() const { return omegas.empty() ? 0.0 : omegas.back(); }

    // sum_a A_a^2 / 2: the exact per-component field variance
    double variance() const;
};

// Amplitude of a single mode at frequency omega occupying a bin of width
// domega: sqrt(4 hbar omega^3 domega / (3 pi c^3)). Matching the discrete
// autocovariance to the continuum spectral function fixes this uniquely.
double mode_amplitude(const PhysicalScale& scale, double omega, double domega);

FieldModeSet build_mode_set(const PhysicalScale& scale, const ModeSetSpec& spec);

// Positional convenience mirroring the operation contract.
FieldModeSet build_mode_set(const PhysicalScale& scale, double omega_min,
                            double omega_max, std::size_t n_modes,
                            Spacing spacing, std::uint64_t seed,
                            int components = 1, bool jitter = true);

// Exact cosine-sum evaluation of all components at time t.
std::array<double, 3> eval_field(const FieldModeSet& modes, double t);

// Single-component evaluation (component index c).
double eval_field_component(const FieldModeSet& modes, int c, double t);

// Incremental field evaluator for integrators that sample E on a uniform
// half-step grid. Advances one complex phasor per (component, mode) and
// periodically resynchronizes against the exact cosine sum so accumulated
// rounding stays below ~1e-12. Deterministic in (modes, t0, h).
class FieldPhasors {
  public:
    FieldPhasors(const FieldModeSet& modes, double t0, double h,
                 std::size_t resync_interval = 4096);

    double t() const { return t_; }
    // field components at the current time
    const std::array<double, 3>& value() const { return value_; }
    // advance by one grid step h
    void step();

  private:
    void resync();

    const FieldModeSet* modes_;
    double t0_;
    double h_;
    std::size_t step_count_ = 0;
    std::size_t resync_interval_;
    double t_;
    std::vector<double> rot_re_, rot_im_;    // per-mode e^{i omega h}
    std::vector<double> ph_re_, ph_im_;      // phasor per (component, mode)
    std::array<double, 3> value_{0.0, 0.0, 0.0};
};

// Monte Carlo estimate of the field autocovariance over phase realizations.
struct SpectralEstimate {
    std::vector<double> lags;
    std::vector<double> autocorr;
    std::vector<double> stderr;
};

// <E_c(0) E_c(lag)> pooled over components, one independent realization per
// derived seed. Converges to sum_a (A_a^2/2) cos(omega_a lag).
SpectralEstimate estimate_autocorrelation(const PhysicalScale& scale,
                                          const ModeSetSpec& spec,
                                          std::size_t n_realizations,
                                          const std::vector<double>& lags);

// <E_0(0) E_1(lag)>: distinct components, converges to zero.
SpectralEstimate estimate_cross_correlation(const PhysicalScale& scale,
                                            const ModeSetSpec& spec,
                                            std::size_t n_realizations,
                                            const std::vector<double>& lags);

// Analytic discrete target sum_a (A_a^2/2) cos(omega_a lag) for a built set.
double autocorrelation_target(const FieldModeSet& modes, double lag);

// Closed form of the zero-point energy density integrated to a cutoff:
// (hbar / (2 pi^2 c^3)) * cutoff^4 / 4.
double vacuum_energy_density(const PhysicalScale& scale, double cutoff);

}  // namespace sedlab
