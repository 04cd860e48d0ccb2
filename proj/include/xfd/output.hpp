#pragma once

#include "xfd/drivers.hpp"

#include <map>
#include <string>
#include <vector>

namespace xfd {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Fixed "%.12e" rendering; non-finite values print as inf / -inf / nan.
std::string format_number(double v);

/// Writes `content` to `path` through a temporary file and a rename.
void write_file_atomic(const std::string& path, const std::string& content);

std::string to_csv(const Table& table);
void write_csv(const Table& table, const std::string& path);

/// convergence.csv: h, err_u_H1, err_u_L2, err_p_L2, err_lambda_L2, then the
/// observed rates between consecutive rows (empty on the first row).
Table convergence_table(const ConvergenceResult& r);
/// sweep.csv: x_c, rel_err_lambda_stab_pct, rel_err_lambda_unstab_pct, status.
Table sweep_table(const SweepResult& r);
/// fall.csv: t, hx, hy, hvx, hvy, theta, omega, Fx, Fy, torque, newton_iters.
Table fall_table(const std::vector<StepRecord>& records);
/// steady.csv: the error report of a single solve.
Table steady_table(const ErrorReport& e);

/// Velocity and pressure at the mesh vertices. Unknowns outside the fluid are
/// reported as zero.
struct VertexFields {
    std::vector<Vec2> velocity;
    std::vector<double> pressure;
};
VertexFields vertex_fields(const Mesh& mesh, const DofMap& dofs, const Solution& sol);
VertexFields vertex_fields(const Mesh& mesh, const FallSimulation& sim);

/// Legacy ASCII unstructured grid: triangles, point data "velocity" and
/// "pressure", cell data "element_class" (0 fluid, 1 solid, 2 cut).
std::string to_vtk(const Mesh& mesh, const std::vector<ElementClass>& classes, const VertexFields& fields,
                   const std::string& title = "xfd snapshot");
void write_vtk_snapshot(const Mesh& mesh, const std::vector<ElementClass>& classes, const VertexFields& fields,
                        const std::string& path);

struct RunManifest {
    std::string config_json;
    std::string version;
    std::string experiment;
    std::string status = "ok";
    std::string error;
    double wall_clock = 0.0;
    std::map<std::string, double> timings;
    std::map<std::string, long long> dof_counts;
    std::map<std::string, double> summary;   // fitted rates, failure counts, ...
    std::vector<std::string> outputs;

    std::string to_json() const;
};

} // namespace xfd
