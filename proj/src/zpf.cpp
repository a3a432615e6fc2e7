#include "sedlab/zpf.hpp"

#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "sedlab/errors.hpp"
#include "sedlab/rng.hpp"
#include "sedlab/stats.hpp"

namespace sedlab {

namespace {
constexpr double kPi = std::numbers::pi;
}

ModeSetSpec ModeSetSpec::resonant_band(double omega0, double delta,
                                       std::size_t n_modes, std::uint64_t seed,
                                       int components) {
    ModeSetSpec spec;
    spec.omega_min = omega0 * (1.0 - delta);
    spec.omega_max = omega0 * (1.0 + delta);
    spec.n_modes = n_modes;
    spec.seed = seed;
    spec.components = components;
    return spec;
}

std::string to_json(const ModeSetSpec& spec) {
    nlohmann::json j{
        {"omega_min", spec.omega_min},
        {"omega_max", spec.omega_max},
        {"n_modes", spec.n_modes},
        {"spacing", spec.spacing == Spacing::Uniform ? "uniform" : "logarithmic"},
        {"seed", spec.seed},
        {"components", spec.components},
        {"jitter", spec.jitter},
        {"rng", kRngId},
    };
    return j.dump(2);
}

ModeSetSpec mode_set_spec_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ModeSetSpec spec;
    spec.omega_min = j.at("omega_min").get<double>();
    spec.omega_max = j.at("omega_max").get<double>();
    spec.n_modes = j.at("n_modes").get<std::size_t>();
    const std::string spacing = j.value("spacing", "uniform");
    if (spacing == "uniform") {
        spec.spacing = Spacing::Uniform;
    } else if (spacing == "logarithmic") {
        spec.spacing = Spacing::Logarithmic;
    } else {
        throw ConfigParseError("unknown spacing '" + spacing + "'");
    }
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.components = j.value("components", 1);
    spec.jitter = j.value("jitter", true);
    return spec;
}

double FieldModeSet::variance() const {
    double v = 0.0;
    for (double a : amplitudes) v += 0.5 * a * a;
    return v;
}

double mode_amplitude(const PhysicalScale& scale, double omega, double domega) {
    const double c3 = scale.c * scale.c * scale.c;
    return std::sqrt(4.0 * scale.hbar * omega * omega * omega * domega /
                     (3.0 * kPi * c3));
}

FieldModeSet build_mode_set(const PhysicalScale& scale, const ModeSetSpec& spec) {
    if (!(spec.omega_min > 0.0) || !(spec.omega_max > spec.omega_min)) {
        throw EmptyBandwidth("need 0 < omega_min < omega_max, got [" +
                             std::to_string(spec.omega_min) + ", " +
                             std::to_string(spec.omega_max) + "]");
    }
    if (spec.n_modes < 2) {
        throw TooFewModes("n_modes = " + std::to_string(spec.n_modes) +
                          " < 2");
    }
    if (spec.components != 1 && spec.components != 3) {
        throw InconsistentInputs("components must be 1 or 3");
    }

    const std::size_t n = spec.n_modes;
    FieldModeSet modes;
    modes.seed = spec.seed;
    modes.omega_min = spec.omega_min;
    modes.omega_max = spec.omega_max;
    modes.components = spec.components;
    modes.omegas.resize(n);
    modes.amplitudes.resize(n);

    // Bin edges; amplitudes always use the nominal bin width so the jitter
    // average of the discrete spectrum is an unbiased Riemann sum.
    for (std::size_t i = 0; i < n; ++i) {
        double lo, hi;
        if (spec.spacing == Spacing::Uniform) {
            const double dw = (spec.omega_max - spec.omega_min) / static_cast<double>(n);
            lo = spec.omega_min + static_cast<double>(i) * dw;
            hi = lo + dw;
        } else {
            const double r = std::pow(spec.omega_max / spec.omega_min,
                                      1.0 / static_cast<double>(n));
            lo = spec.omega_min * std::pow(r, static_cast<double>(i));
            hi = lo * r;
        }
        double omega;
        if (spec.jitter) {
            const double u = uniform01(derive(spec.seed, StreamTag::ModeJitter, i));
            omega = lo + u * (hi - lo);
        } else {
            omega = 0.5 * (lo + hi);
        }
        modes.omegas[i] = omega;
        modes.amplitudes[i] = mode_amplitude(scale, omega, hi - lo);
    }

    modes.phases.resize(static_cast<std::size_t>(spec.components));
    for (int c = 0; c < spec.components; ++c) {
        auto& ph = modes.phases[static_cast<std::size_t>(c)];
        ph.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double u = uniform01(derive(spec.seed, StreamTag::ModePhase, i,
                                              static_cast<std::uint64_t>(c)));
            ph[i] = kPi - 2.0 * kPi * u;  // (-pi, pi]
        }
    }
    return modes;
}

FieldModeSet build_mode_set(const PhysicalScale& scale, double omega_min,
                            double omega_max, std::size_t n_modes,
                            Spacing spacing, std::uint64_t seed, int components,
                            bool jitter) {
    ModeSetSpec spec;
    spec.omega_min = omega_min;
    spec.omega_max = omega_max;
    spec.n_modes = n_modes;
    spec.spacing = spacing;
    spec.seed = seed;
    spec.components = components;
    spec.jitter = jitter;
    return build_mode_set(scale, spec);
}

double eval_field_component(const FieldModeSet& modes, int c, double t) {
    const auto& ph = modes.phases.at(static_cast<std::size_t>(c));
    double e = 0.0;
    for (std::size_t i = 0; i < modes.omegas.size(); ++i) {
        e += modes.amplitudes[i] * std::cos(modes.omegas[i] * t + ph[i]);
    }
    return e;
}

std::array<double, 3> eval_field(const FieldModeSet& modes, double t) {
    std::array<double, 3> out{0.0, 0.0, 0.0};
    for (int c = 0; c < modes.components; ++c) {
        out[static_cast<std::size_t>(c)] = eval_field_component(modes, c, t);
    }
    return out;
}

FieldPhasors::FieldPhasors(const FieldModeSet& modes, double t0, double h,
                           std::size_t resync_interval)
    : modes_(&modes),
      t0_(t0),
      h_(h),
      resync_interval_(resync_interval),
      t_(t0) {
    const std::size_t n = modes.n_modes();
    rot_re_.resize(n);
    rot_im_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        rot_re_[i] = std::cos(modes.omegas[i] * h);
        rot_im_[i] = std::sin(modes.omegas[i] * h);
    }
    ph_re_.resize(n * static_cast<std::size_t>(modes.components));
    ph_im_.resize(n * static_cast<std::size_t>(modes.components));
    resync();
}

void FieldPhasors::resync() {
    const std::size_t n = modes_->n_modes();
    for (int c = 0; c < modes_->components; ++c) {
        const auto& ph = modes_->phases[static_cast<std::size_t>(c)];
        double acc = 0.0;
        const std::size_t base = static_cast<std::size_t>(c) * n;
        for (std::size_t i = 0; i < n; ++i) {
            const double arg = modes_->omegas[i] * t_ + ph[i];
            const double re = modes_->amplitudes[i] * std::cos(arg);
            const double im = modes_->amplitudes[i] * std::sin(arg);
            ph_re_[base + i] = re;
            ph_im_[base + i] = im;
            acc += re;
        }
        value_[static_cast<std::size_t>(c)] = acc;
    }
}

void FieldPhasors::step() {
    ++step_count_;
    t_ = t0_ + static_cast<double>(step_count_) * h_;
    if (step_count_ % resync_interval_ == 0) {
        resync();
        return;
    }
    const std::size_t n = modes_->n_modes();
    for (int c = 0; c < modes_->components; ++c) {
        const std::size_t base = static_cast<std::size_t>(c) * n;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double re = ph_re_[base + i];
            const double im = ph_im_[base + i];
            const double nre = re * rot_re_[i] - im * rot_im_[i];
            const double nim = re * rot_im_[i] + im * rot_re_[i];
            ph_re_[base + i] = nre;
            ph_im_[base + i] = nim;
            acc += nre;
        }
        value_[static_cast<std::size_t>(c)] = acc;
    }
}

namespace {

SpectralEstimate estimate_correlation_impl(const PhysicalScale& scale,
                                           const ModeSetSpec& spec,
                                           std::size_t n_realizations,
                                           const std::vector<double>& lags,
                                           bool cross) {
    if (n_realizations < 2) {
        throw InconsistentInputs("need n_realizations >= 2");
    }
    if (cross && spec.components < 2) {
        throw InconsistentInputs("cross-correlation needs >= 2 components");
    }
    std::vector<Accumulator> acc(lags.size());
    for (std::size_t r = 0; r < n_realizations; ++r) {
        ModeSetSpec rspec = spec;
        rspec.seed = derive(spec.seed, StreamTag::Ensemble, r);
        const FieldModeSet modes = build_mode_set(scale, rspec);
        if (cross) {
            const double e0 = eval_field_component(modes, 0, 0.0);
            for (std::size_t l = 0; l < lags.size(); ++l) {
                acc[l].add(e0 * eval_field_component(modes, 1, lags[l]));
            }
        } else {
            // pool the independent components of one realization
            for (std::size_t l = 0; l < lags.size(); ++l) {
                double pooled = 0.0;
                for (int c = 0; c < modes.components; ++c) {
                    pooled += eval_field_component(modes, c, 0.0) *
                              eval_field_component(modes, c, lags[l]);
                }
                acc[l].add(pooled / modes.components);
            }
        }
    }
    SpectralEstimate est;
    est.lags = lags;
    est.autocorr.resize(lags.size());
    est.stderr.resize(lags.size());
    for (std::size_t l = 0; l < lags.size(); ++l) {
        est.autocorr[l] = acc[l].mean();
        est.stderr[l] = acc[l].stderr_mean();
    }
    return est;
}

}  // namespace

SpectralEstimate estimate_autocorrelation(const PhysicalScale& scale,
                                          const ModeSetSpec& spec,
                                          std::size_t n_realizations,
                                          const std::vector<double>& lags) {
    return estimate_correlation_impl(scale, spec, n_realizations, lags, false);
}

SpectralEstimate estimate_cross_correlation(const PhysicalScale& scale,
                                            const ModeSetSpec& spec,
                                            std::size_t n_realizations,
                                            const std::vector<double>& lags) {
    return estimate_correlation_impl(scale, spec, n_realizations, lags, true);
}

double autocorrelation_target(const FieldModeSet& modes, double lag) {
    double v = 0.0;
    for (std::size_t i = 0; i < modes.omegas.size(); ++i) {
        v += 0.5 * modes.amplitudes[i] * modes.amplitudes[i] *
             std::cos(modes.omegas[i] * lag);
    }
    return v;
}

double vacuum_energy_density(const PhysicalScale& scale, double cutoff) {
    if (!(cutoff > 0.0)) {
        throw NonPositiveCutoff("cutoff must be > 0");
    }
    const double c3 = scale.c * scale.c * scale.c;
    const double l4 = cutoff * cutoff * cutoff * cutoff;
    return scale.hbar / (2.0 * kPi * kPi * c3) * l4 / 4.0;
}

}  // namespace sedlab
