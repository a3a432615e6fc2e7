#include "sedlab/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <thread>

#include <nlohmann/json.hpp>

#include "sedlab/errors.hpp"
#include "sedlab/rng.hpp"

namespace sedlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Deriv {
    Vec3 dx;
    Vec3 dp;
};

// right-hand side with the field value supplied externally
inline Deriv rhs(const PhysicalScale& scale, const ForceModel& force,
                 bool radiation_reaction, double coupling, const Vec3& x,
                 const Vec3& p, const std::array<double, 3>& field, int dim) {
    Deriv d{};
    Vec3 v{0.0, 0.0, 0.0};
    for (int i = 0; i < dim; ++i) v[i] = p[i] / scale.mass;
    Vec3 f = force.force(x);
    if (radiation_reaction) {
        const Mat3 j = force.jacobian(x);
        const double tau = scale.tau();
        for (int i = 0; i < dim; ++i) {
            double jv = 0.0;
            for (int k = 0; k < dim; ++k) jv += j[i][k] * v[k];
            f[i] += tau * jv;
        }
    }
    for (int i = 0; i < dim; ++i) {
        d.dx[i] = v[i];
        d.dp[i] = f[i] + coupling * field[i];
    }
    return d;
}

template <typename Observer>
void integrate_core(const PhysicalScale& scale, const ForceModel& force,
                    const Vec3& x0, const Vec3& p0, double t_end, double dt,
                    const BmOptions& opts, Observer&& observe) {
    if (!(t_end > 0.0) || !(dt > 0.0)) {
        throw NonPositiveInput("integrate_bm requires t_end > 0 and dt > 0");
    }
    if (opts.field != nullptr) {
        const double dt_max = max_stable_dt(*opts.field);
        if (dt > dt_max * (1.0 + 1e-12)) {
            throw StepTooLarge("dt = " + std::to_string(dt) +
                               " exceeds 2*pi/(20*omega_max) = " +
                               std::to_string(dt_max));
        }
        if (force.dimension() == 3 && opts.field->components != 3) {
            throw InconsistentInputs("3D force needs a 3-component field");
        }
    }

    const int dim = force.dimension();
    const double coupling = opts.field ? scale.charge : 0.0;
    const auto n_steps = static_cast<std::size_t>(std::llround(t_end / dt));

    // field samples on the half-step grid; stage times t, t+dt/2, t+dt
    std::optional<FieldPhasors> phasors;
    if (opts.field) phasors.emplace(*opts.field, 0.0, 0.5 * dt, opts.resync_interval);
    static const std::array<double, 3> kZeroField{0.0, 0.0, 0.0};

    Vec3 x = x0;
    Vec3 p = p0;
    observe(std::size_t{0}, 0.0, x, p, phasors ? phasors->value() : kZeroField);

    for (std::size_t step = 0; step < n_steps; ++step) {
        const double t = static_cast<double>(step) * dt;
        const std::array<double, 3>& e0 = phasors ? phasors->value() : kZeroField;
        const Deriv k1 = rhs(scale, force, opts.radiation_reaction, coupling, x, p, e0, dim);

        Vec3 xs, ps;
        const double h2 = 0.5 * dt;
        for (int i = 0; i < dim; ++i) {
            xs[i] = x[i] + h2 * k1.dx[i];
            ps[i] = p[i] + h2 * k1.dp[i];
        }
        if (phasors) phasors->step();
        const std::array<double, 3>& eh = phasors ? phasors->value() : kZeroField;
        const Deriv k2 = rhs(scale, force, opts.radiation_reaction, coupling, xs, ps, eh, dim);

        for (int i = 0; i < dim; ++i) {
            xs[i] = x[i] + h2 * k2.dx[i];
            ps[i] = p[i] + h2 * k2.dp[i];
        }
        const Deriv k3 = rhs(scale, force, opts.radiation_reaction, coupling, xs, ps, eh, dim);

        for (int i = 0; i < dim; ++i) {
            xs[i] = x[i] + dt * k3.dx[i];
            ps[i] = p[i] + dt * k3.dp[i];
        }
        if (phasors) phasors->step();
        const std::array<double, 3>& e1 = phasors ? phasors->value() : kZeroField;
        const Deriv k4 = rhs(scale, force, opts.radiation_reaction, coupling, xs, ps, e1, dim);

        const double w = dt / 6.0;
        for (int i = 0; i < dim; ++i) {
            x[i] += w * (k1.dx[i] + 2.0 * k2.dx[i] + 2.0 * k3.dx[i] + k4.dx[i]);
            p[i] += w * (k1.dp[i] + 2.0 * k2.dp[i] + 2.0 * k3.dp[i] + k4.dp[i]);
        }

        bool finite = true;
        for (int i = 0; i < dim; ++i) {
            finite = finite && std::isfinite(x[i]) && std::isfinite(p[i]);
        }
        if (!finite) {
            throw NonFiniteState("state non-finite at step " +
                                 std::to_string(step + 1) + " (t = " +
                                 std::to_string(t + dt) + ")");
        }
        observe(step + 1, static_cast<double>(step + 1) * dt, x, p, e1);
    }
}

}  // namespace

double max_stable_dt(const FieldModeSet& modes) {
    return kTwoPi / (20.0 * modes.max_omega());
}

double default_dt(const PhysicalScale& scale, const FieldModeSet& modes) {
    return std::min(max_stable_dt(modes), dissipation_time(scale) / 1e4);
}

Trajectory integrate_bm(const PhysicalScale& scale, const ForceModel& force,
                        const Vec3& x0, const Vec3& p0, double t_end, double dt,
                        const BmOptions& opts) {
    Trajectory traj;
    traj.dim = force.dimension();
    traj.meta.scale = scale;
    traj.meta.force = force.description();
    traj.meta.dt = dt;
    traj.meta.t_end = t_end;
    traj.meta.seed = opts.field ? opts.field->seed : 0;
    traj.meta.radiation_reaction = opts.radiation_reaction;
    traj.meta.n_field_modes = opts.field ? opts.field->n_modes() : 0;

    const int stride = std::max(1, opts.record_stride);
    const auto n_steps = static_cast<std::size_t>(std::llround(t_end / dt));
    traj.times.reserve(n_steps / static_cast<std::size_t>(stride) + 2);

    integrate_core(scale, force, x0, p0, t_end, dt, opts,
                   [&](std::size_t step, double t, const Vec3& x, const Vec3& p,
                       const std::array<double, 3>&) {
                       if (step % static_cast<std::size_t>(stride) != 0 &&
                           step != n_steps) {
                           return;
                       }
                       traj.times.push_back(t);
                       for (int i = 0; i < traj.dim; ++i) traj.x.push_back(x[i]);
                       for (int i = 0; i < traj.dim; ++i) traj.p.push_back(p[i]);
                   });
    return traj;
}

void integrate_bm_observe(const PhysicalScale& scale, const ForceModel& force,
                          const Vec3& x0, const Vec3& p0, double t_end,
                          double dt, const BmOptions& opts,
                          const StepObserver& observer) {
    integrate_core(scale, force, x0, p0, t_end, dt, opts, observer);
}

std::vector<double> energy_series(const Trajectory& traj, const ForceModel& force) {
    if (!force.has_potential()) {
        throw NonConservativeForce("energy_series needs a conservative force");
    }
    std::vector<double> h(traj.size());
    const double m = traj.meta.scale.mass;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        Vec3 x{0.0, 0.0, 0.0};
        double p2 = 0.0;
        for (int a = 0; a < traj.dim; ++a) {
            x[a] = traj.x_at(i, a);
            const double pa = traj.p_at(i, a);
            p2 += pa * pa;
        }
        h[i] = 0.5 * p2 / m + force.potential(x);
    }
    return h;
}

namespace {

// per-trajectory streamed results, reduced later in index order
struct TrajResult {
    std::vector<double> rec_x, rec_p, rec_H;  // recorded grid, axis 0
    double win_x = 0.0, win_p = 0.0, win_x2 = 0.0, win_p2 = 0.0, win_H = 0.0;
    double win_abs = 0.0, win_rad = 0.0;
    std::size_t win_count = 0;
};

}  // namespace

EnsembleStats run_ensemble(const EnsembleSpec& spec) {
    if (spec.n_traj < 2) {
        throw InconsistentInputs("run_ensemble needs n_traj >= 2");
    }
    const PhysicalScale& scale = spec.scale;
    const double tau_d = dissipation_time(scale);
    const double t_end = spec.t_end > 0.0 ? spec.t_end : 20.0 * tau_d;

    // one throwaway mode set fixes the step size for all realizations
    double dt = spec.dt;
    if (spec.field_coupling) {
        ModeSetSpec probe = spec.field;
        probe.seed = derive(spec.base_seed, StreamTag::Ensemble, 0);
        const FieldModeSet probe_modes = build_mode_set(scale, probe);
        if (dt <= 0.0) dt = default_dt(scale, probe_modes);
    } else if (dt <= 0.0) {
        throw NonPositiveInput("run_ensemble without field coupling needs dt");
    }

    const auto n_steps = static_cast<std::size_t>(std::llround(t_end / dt));
    const int stride = spec.record_stride > 0
                           ? spec.record_stride
                           : std::max(1, static_cast<int>(n_steps / 2000));
    const double w_start = std::max(5.0 * tau_d, 0.5 * t_end);

    const int dim = spec.force.dimension();
    const double mass = scale.mass;
    const double tau = scale.tau();
    const double e = scale.charge;

    std::vector<TrajResult> results(spec.n_traj);
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= spec.n_traj) return;
            std::optional<FieldModeSet> modes;
            BmOptions opts;
            if (spec.field_coupling) {
                ModeSetSpec fs = spec.field;
                fs.seed = derive(spec.base_seed, StreamTag::Ensemble, i);
                modes.emplace(build_mode_set(scale, fs));
                opts.field = &*modes;
            }

            TrajResult& r = results[i];
            r.rec_x.reserve(n_steps / static_cast<std::size_t>(stride) + 2);

            try {
                integrate_bm_observe(
                    scale, spec.force, spec.x0, spec.p0, t_end, dt, opts,
                    [&](std::size_t step, double t, const Vec3& x, const Vec3& p,
                        const std::array<double, 3>& ef) {
                        if (step % static_cast<std::size_t>(stride) == 0 ||
                            step == n_steps) {
                            Vec3 xv{0, 0, 0};
                            double p2 = 0.0;
                            for (int a = 0; a < dim; ++a) {
                                xv[a] = x[a];
                                p2 += p[a] * p[a];
                            }
                            r.rec_x.push_back(x[0]);
                            r.rec_p.push_back(p[0]);
                            r.rec_H.push_back(0.5 * p2 / mass +
                                              spec.force.potential(xv));
                        }
                        if (t >= w_start) {
                            Vec3 xv{0, 0, 0};
                            Vec3 v{0, 0, 0};
                            double p2 = 0.0;
                            for (int a = 0; a < dim; ++a) {
                                xv[a] = x[a];
                                v[a] = p[a] / mass;
                                p2 += p[a] * p[a];
                            }
                            r.win_x += x[0];
                            r.win_p += p[0];
                            r.win_x2 += x[0] * x[0];
                            r.win_p2 += p[0] * p[0];
                            r.win_H += 0.5 * p2 / mass + spec.force.potential(xv);
                            const Mat3 j = spec.force.jacobian(xv);
                            double pabs = 0.0, prad = 0.0;
                            for (int a = 0; a < dim; ++a) {
                                pabs += e * ef[a] * v[a];
                                double jv = 0.0;
                                for (int b = 0; b < dim; ++b) jv += j[a][b] * v[b];
                                prad += tau * jv * v[a];
                            }
                            r.win_abs += pabs;
                            r.win_rad += prad;
                            ++r.win_count;
                        }
                    });
            } catch (const Error& err) {
                throw Error("trajectory " + std::to_string(i) + ": " + err.what());
            }
        }
    };

    int n_threads = spec.threads > 0
                        ? spec.threads
                        : static_cast<int>(std::thread::hardware_concurrency());
    n_threads = std::max(1, std::min<int>(n_threads, static_cast<int>(spec.n_traj)));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // ordered reduction: identical result regardless of worker count
    EnsembleStats stats;
    stats.n_traj = spec.n_traj;
    stats.dt = dt;
    const std::size_t n_rec = results.front().rec_x.size();
    stats.times.resize(n_rec);
    for (std::size_t k = 0; k < n_rec; ++k) {
        const std::size_t step = std::min(k * static_cast<std::size_t>(stride), n_steps);
        stats.times[k] = static_cast<double>(step) * dt;
    }
    // the final recorded point is always the last step
    if (n_rec > 0) stats.times.back() = static_cast<double>(n_steps) * dt;

    std::vector<Accumulator> ax(n_rec), ap(n_rec), aH(n_rec);
    Accumulator wx, wp, wx2, wp2, wH, wabs, wrad, wnet;
    for (std::size_t i = 0; i < spec.n_traj; ++i) {
        const TrajResult& r = results[i];
        for (std::size_t k = 0; k < n_rec; ++k) {
            ax[k].add(r.rec_x[k]);
            ap[k].add(r.rec_p[k]);
            aH[k].add(r.rec_H[k]);
        }
        const double n = static_cast<double>(r.win_count);
        const double mx = r.win_x / n;
        const double mp = r.win_p / n;
        wx.add(mx);
        wp.add(mp);
        wx2.add(r.win_x2 / n - mx * mx);
        wp2.add(r.win_p2 / n - mp * mp);
        wH.add(r.win_H / n);
        wabs.add(r.win_abs / n);
        wrad.add(r.win_rad / n);
        wnet.add((r.win_abs + r.win_rad) / n);
    }

    stats.mean_x.resize(n_rec);
    stats.se_mean_x.resize(n_rec);
    stats.mean_p.resize(n_rec);
    stats.se_mean_p.resize(n_rec);
    stats.var_x.resize(n_rec);
    stats.se_var_x.resize(n_rec);
    stats.var_p.resize(n_rec);
    stats.se_var_p.resize(n_rec);
    stats.mean_H.resize(n_rec);
    stats.se_mean_H.resize(n_rec);
    for (std::size_t k = 0; k < n_rec; ++k) {
        stats.mean_x[k] = ax[k].mean();
        stats.se_mean_x[k] = ax[k].stderr_mean();
        stats.mean_p[k] = ap[k].mean();
        stats.se_mean_p[k] = ap[k].stderr_mean();
        stats.var_x[k] = ax[k].variance();
        stats.se_var_x[k] = ax[k].stderr_variance();
        stats.var_p[k] = ap[k].variance();
        stats.se_var_p[k] = ap[k].stderr_variance();
        stats.mean_H[k] = aH[k].mean();
        stats.se_mean_H[k] = aH[k].stderr_mean();
    }

    stats.window.t_start = w_start;
    stats.window.t_end = t_end;
    stats.window.mean_x = estimate_of_mean(wx);
    stats.window.mean_p = estimate_of_mean(wp);
    stats.window.var_x = estimate_of_mean(wx2);
    stats.window.var_p = estimate_of_mean(wp2);
    stats.window.mean_H = estimate_of_mean(wH);
    stats.window.absorbed_power = estimate_of_mean(wabs);
    stats.window.radiated_power = estimate_of_mean(wrad);
    stats.window.net_power = estimate_of_mean(wnet);
    return stats;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path);
    out.precision(17);
    out << "t";
    for (int a = 0; a < traj.dim; ++a) out << ",x" << a;
    for (int a = 0; a < traj.dim; ++a) out << ",p" << a;
    out << "\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        out << traj.times[i];
        for (int a = 0; a < traj.dim; ++a) out << "," << traj.x_at(i, a);
        for (int a = 0; a < traj.dim; ++a) out << "," << traj.p_at(i, a);
        out << "\n";
    }
}

namespace {
constexpr char kColumnarMagic[8] = {'S', 'E', 'D', 'C', 'O', 'L', '0', '1'};
}

void write_trajectory_columnar(const Trajectory& traj, const std::string& path,
                               const std::string& config_hash) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path);
    out.write(kColumnarMagic, sizeof(kColumnarMagic));
    const std::uint64_t n = traj.size();
    const std::uint64_t dim = static_cast<std::uint64_t>(traj.dim);
    out.write(reinterpret_cast<const char*>(&n), sizeof(n));
    out.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
    auto write_col = [&](const std::vector<double>& v) {
        out.write(reinterpret_cast<const char*>(v.data()),
                  static_cast<std::streamsize>(v.size() * sizeof(double)));
    };
    write_col(traj.times);
    write_col(traj.x);
    write_col(traj.p);

    nlohmann::json meta{
        {"n_samples", n},
        {"dim", traj.dim},
        {"dt", traj.meta.dt},
        {"t_end", traj.meta.t_end},
        {"seed", traj.meta.seed},
        {"force", traj.meta.force},
        {"radiation_reaction", traj.meta.radiation_reaction},
        {"n_field_modes", traj.meta.n_field_modes},
        {"rng", traj.meta.rng},
        {"scale",
         {{"hbar", traj.meta.scale.hbar},
          {"mass", traj.meta.scale.mass},
          {"charge", traj.meta.scale.charge},
          {"c", traj.meta.scale.c},
          {"omega0", traj.meta.scale.omega0}}},
    };
    if (!config_hash.empty()) meta["config_hash"] = config_hash;
    std::ofstream side(path + ".meta.json");
    side << meta.dump(2) << "\n";
}

Trajectory read_trajectory_columnar(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || !std::equal(magic, magic + 8, kColumnarMagic)) {
        throw Error("bad columnar header in " + path);
    }
    std::uint64_t n = 0, dim = 0;
    in.read(reinterpret_cast<char*>(&n), sizeof(n));
    in.read(reinterpret_cast<char*>(&dim), sizeof(dim));
    Trajectory traj;
    traj.dim = static_cast<int>(dim);
    traj.times.resize(n);
    traj.x.resize(n * dim);
    traj.p.resize(n * dim);
    auto read_col = [&](std::vector<double>& v) {
        in.read(reinterpret_cast<char*>(v.data()),
                static_cast<std::streamsize>(v.size() * sizeof(double)));
    };
    read_col(traj.times);
    read_col(traj.x);
    read_col(traj.p);
    if (!in) throw Error("truncated columnar file " + path);
    return traj;
}

}  // namespace sedlab
