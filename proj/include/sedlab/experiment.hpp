#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sedlab/units.hpp"
#include "sedlab/zpf.hpp"

namespace sedlab {

inline constexpr const char* kToolName = "sedlab";
inline constexpr const char* kToolVersion = "0.1.0";

enum class Experiment {
    SpectrumCheck,
    GroundState,
    Hierarchy,
    Commutator,
    FieldOperators,
    EnergyBalance,
    CutoffSweep,
};

std::string to_string(Experiment e);
Experiment experiment_from_string(const std::string& name);

// Parsed experiment configuration. One JSON file describes one experiment;
// unknown experiments or malformed fields raise ConfigParseError naming the
// field. All declared tolerances are fixed in code, not configurable.
struct ExperimentConfig {
    Experiment experiment = Experiment::GroundState;
    std::uint64_t seed = 1;
    int threads = 0;  // 0: hardware concurrency

    // scale: natural units with a chosen damping, or explicit constants
    bool natural = true;
    double epsilon = 1e-3;
    double charge = 0.0, mass = 0.0, c = 0.0, omega0 = 0.0, hbar = 1.0;

    // field band
    std::size_t n_modes = 256;
    double band_delta = 0.25;  // half-width relative to omega0
    double omega_min = 0.0, omega_max = 0.0;  // explicit band overrides delta
    Spacing spacing = Spacing::Uniform;
    bool jitter = true;
    int components = 1;

    // integrator
    double dt = 0.0;     // 0: auto
    double t_end = 0.0;  // 0: 20 dissipation times

    // ensemble
    std::size_t n_traj = 400;
    double x0 = 0.0, p0 = 0.0;

    // spectrum check
    std::size_t n_realizations = 2000;
    std::size_t n_lags = 64;

    // matrix experiments
    std::vector<int> matrix_dims{2, 3, 4, 8, 16, 32, 64};

    // cutoff sweep
    std::vector<double> cutoffs{0.5, 1.0, 2.0, 4.0};

    // sweep axis (used by the sweep entry point)
    std::string sweep_axis;
    std::vector<double> sweep_values;

    // output
    std::string output_dir = ".";

    PhysicalScale scale() const;
    ModeSetSpec field_spec() const;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
// Canonical JSON of the effective configuration (defaults resolved).
std::string canonical_json(const ExperimentConfig& config);
// FNV-1a 64 content digest of the canonical form, as "fnv1a:<hex>".
std::string config_hash(const ExperimentConfig& config);

struct Check {
    std::string name;
    double value = 0.0;
    double target = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct RunManifest {
    std::string experiment;
    std::string config_hash;
    std::uint64_t seed = 0;
    int threads = 0;
    double wall_time_s = 0.0;
    std::map<std::string, double> metrics;
    std::vector<Check> checks;
    bool pass = true;
    std::vector<std::string> outputs;

    std::string to_json() const;
    // identical runs must agree on everything but wall time
    std::string to_json_without_wall_time() const;
};

// Runs one experiment, writes its outputs and manifest under
// config.output_dir, and returns the manifest.
RunManifest run(const ExperimentConfig& config);

// Runs the experiment once per value of the single swept axis and writes a
// combined CSV. Throws MultipleSweptAxes / ConfigParseError on bad sweeps.
std::vector<RunManifest> sweep(const ExperimentConfig& config,
                               const std::string& axis = "");

}  // namespace sedlab
