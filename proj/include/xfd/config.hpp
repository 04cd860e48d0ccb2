#pragma once

#include "xfd/discretization.hpp"
#include "xfd/solve.hpp"

#include <string>
#include <vector>

namespace xfd {

enum class Experiment { Convergence, Sweep, Fall, Steady };

std::string to_string(Experiment e);
Experiment parse_experiment(const std::string& name);

struct MeshConfig {
    Rect rect{0.0, 0.0, 1.0, 1.0};
    int nx = 20;
    int ny = 20;
    DiagonalSplit split = DiagonalSplit::Uniform;
};

struct PhysicsConfig {
    double nu = 1.0;
    double gamma0 = 0.05;
    double rho_f = 1.0;
    double g_mag = 9.81;
};

struct ShapeConfig {
    enum class Kind { Circle, Ellipse };
    Kind kind = Kind::Circle;
    double r = 0.21;
    double a = 0.24;
    double b = 0.08;
    Vec2 center{0.5, 0.5};
    double theta0 = 0.0;
    double mass = 20.0;

    Shape shape() const;
};

struct FemConfig {
    int k_u = 2;
    int k_p = 1;
    int volume_order = 4;
    int surface_order = 3;
    int nseg_per_cut = 4;
    NormalMode normals = NormalMode::Analytic;
};

struct SolveConfig {
    double newton_tol = 1e-10;
    double newton_rel_tol = 1e-8;
    int newton_max_iter = 20;
    PressureGauge gauge = PressureGauge::MeanZero;
};

struct TimeConfig {
    double dt = 1e-3;
    double t_end = 0.551;
    int snapshot_every = 0;     // 0: no snapshots
    bool couple_fluid = true;

    int num_steps() const;
};

struct SweepConfig {
    double x_min = 0.5;
    double x_max = 0.7;
    double step = 0.005;
    double gamma0_unstab = 0.0;

    int num_positions() const;
};

struct ConvergenceConfig {
    std::vector<int> subdivisions{10, 20, 40, 80};
};

struct OutputConfig {
    std::string dir = "out";
    bool deterministic_assembly = true;
    bool vtk = true;
};

struct Config {
    Experiment experiment = Experiment::Convergence;
    MeshConfig mesh;
    PhysicsConfig physics;
    ShapeConfig shape;
    FemConfig fem;
    SolveConfig solve;
    TimeConfig time;
    SweepConfig sweep;
    ConvergenceConfig convergence;
    OutputConfig output;

    DiscretizationOptions discretization() const;
    SolveOptions solve_options() const;
    FluidParams fluid(double gamma0) const { return {physics.nu, gamma0}; }
    FluidParams fluid() const { return fluid(physics.gamma0); }
};

/// Defaults of an experiment before any file is read. Fall uses the falling
/// ellipse setup, everything else the circle in the unit square.
Config default_config(Experiment e);

/// Parses JSON text. `experiment` (when non-empty) wins over the file's
/// "experiment" key; overrides are "dotted.key=value" with a JSON value
/// (bare words are taken as strings). Unknown keys and wrong types raise
/// ParseError naming the key path, invariant violations ValidationError.
Config parse_config_text(const std::string& text, const std::string& experiment = {},
                         const std::vector<std::string>& overrides = {});
Config parse_config(const std::string& path, const std::string& experiment = {},
                    const std::vector<std::string>& overrides = {});

/// Every violated invariant, as "key.path: reason".
std::vector<std::string> validation_errors(const Config& cfg);
void validate(const Config& cfg);

/// Canonical JSON echo with all defaults filled in.
std::string config_to_json(const Config& cfg, int indent = 2);

} // namespace xfd
