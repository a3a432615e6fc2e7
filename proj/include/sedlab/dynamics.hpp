#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sedlab/force.hpp"
#include "sedlab/stats.hpp"
#include "sedlab/units.hpp"
#include "sedlab/zpf.hpp"

namespace sedlab {

// Fixed-step RK4 integration of the order-reduced Braffort-Marshall equation
//   m x'' = f(x) + tau * (df/dx) x' + e E(t),
// with E(t) an exactly evaluable cosine sum per realization. The radiation
// reaction term and the field coupling can be switched off independently for
// the limiting cases the contracts exercise (tau = 0, e = 0).
struct BmOptions {
    bool radiation_reaction = true;
    const FieldModeSet* field = nullptr;
    int record_stride = 1;
    std::size_t resync_interval = 4096;
};

struct TrajectoryMeta {
    PhysicalScale scale;
    std::string force;
    double dt = 0.0;
    double t_end = 0.0;
    std::uint64_t seed = 0;
    bool radiation_reaction = true;
    std::size_t n_field_modes = 0;
    std::string rng = kRngId;
};

struct Trajectory {
    int dim = 1;
    std::vector<double> times;
    std::vector<double> x;  // dim-major: x[i*dim + axis]
    std::vector<double> p;
    TrajectoryMeta meta;

    std::size_t size() const { return times.size(); }
    double x_at(std::size_t i, int axis = 0) const { return x[i * dim + axis]; }
    double p_at(std::size_t i, int axis = 0) const { return p[i * dim + axis]; }
};

// dt guard: the fastest synthesized mode must be resolved by >= 20 steps.
double max_stable_dt(const FieldModeSet& modes);

// Default step: resolve the fastest mode and the relaxation time.
double default_dt(const PhysicalScale& scale, const FieldModeSet& modes);

Trajectory integrate_bm(const PhysicalScale& scale, const ForceModel& force,
                        const Vec3& x0, const Vec3& p0, double t_end, double dt,
                        const BmOptions& opts = {});

// Streaming variant: calls observer(step_index, t, x, p, E(t)) at every
// accepted step (including step 0) without storing the trajectory. The field
// argument is zero when no field is coupled.
using StepObserver = std::function<void(std::size_t, double, const Vec3&,
                                        const Vec3&, const std::array<double, 3>&)>;
void integrate_bm_observe(const PhysicalScale& scale, const ForceModel& force,
                          const Vec3& x0, const Vec3& p0, double t_end,
                          double dt, const BmOptions& opts,
                          const StepObserver& observer);

// H(t) = p^2/2m + V(x) on the trajectory grid (conservative forces only).
std::vector<double> energy_series(const Trajectory& traj, const ForceModel& force);

// --- ensembles -------------------------------------------------------------

struct EnsembleSpec {
    PhysicalScale scale;
    ForceModel force;
    ModeSetSpec field;       // per-trajectory seeds derive from base_seed
    Vec3 x0{0.0, 0.0, 0.0};
    Vec3 p0{0.0, 0.0, 0.0};
    double t_end = 0.0;      // <= 0: 20 dissipation times
    double dt = 0.0;         // <= 0: default_dt
    std::size_t n_traj = 0;
    std::uint64_t base_seed = 0;
    int threads = 0;         // 0: hardware concurrency
    int record_stride = 0;   // 0: ~2000 recorded points
    bool field_coupling = true;  // false: e = 0 limit, no drive (dt required)
};

struct WindowSummary {
    double t_start = 0.0;
    double t_end = 0.0;
    Estimate mean_x;       // axis 0
    Estimate mean_p;
    Estimate var_x;
    Estimate var_p;
    Estimate mean_H;
    Estimate absorbed_power;   // time average of e E . v
    Estimate radiated_power;   // time average of tau (J v) . v
    Estimate net_power;        // per-trajectory sum of the two
};

struct EnsembleStats {
    std::size_t n_traj = 0;
    double dt = 0.0;
    std::vector<double> times;  // recorded grid
    // across-trajectory statistics per recorded time (axis 0 for x, p)
    std::vector<double> mean_x, se_mean_x;
    std::vector<double> mean_p, se_mean_p;
    std::vector<double> var_x, se_var_x;
    std::vector<double> var_p, se_var_p;
    std::vector<double> mean_H, se_mean_H;
    WindowSummary window;      // stationary-window summary
};

// Independent field realizations per trajectory via seed splitting; the
// stationary window is [max(5 tau_d, t_end/2), t_end]. Results are
// reproducible for a fixed base_seed independent of thread count.
EnsembleStats run_ensemble(const EnsembleSpec& spec);

// --- export ----------------------------------------------------------------

void write_trajectory_csv(const Trajectory& traj, const std::string& path);
// Binary columnar dump (f64 columns t, x..., p...) plus <path>.meta.json.
void write_trajectory_columnar(const Trajectory& traj, const std::string& path,
                               const std::string& config_hash = "");
Trajectory read_trajectory_columnar(const std::string& path);

}  // namespace sedlab
