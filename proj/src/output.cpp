#include "xfd/output.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace xfd {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    std::error_code ec;
    if (target.has_parent_path()) fs::create_directories(target.parent_path(), ec);
    if (ec) throw IoError("cannot create directory for '" + path + "': " + ec.message());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
        out << content;
        out.flush();
        if (!out) throw IoError("write to '" + tmp.string() + "' failed");
    }
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot move output into place at '" + path + "'");
    }
}

std::string to_csv(const Table& table) {
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(table.header);
    for (const auto& r : table.rows) {
        XFD_REQUIRE(r.size() == table.header.size(), InvalidArgument, "csv row width does not match the header");
        line(r);
    }
    return out;
}

void write_csv(const Table& table, const std::string& path) { write_file_atomic(path, to_csv(table)); }

Table convergence_table(const ConvergenceResult& r) {
    Table t;
    t.header = {"h", "err_u_H1", "err_u_L2", "err_p_L2", "err_lambda_L2",
                "rate_u_H1", "rate_u_L2", "rate_p_L2", "rate_lambda_L2"};
    auto rate = [](double e0, double e1, double h0, double h1) {
        return format_number(std::log(e1 / e0) / std::log(h1 / h0));
    };
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        const ErrorReport& e = r.rows[i];
        std::vector<std::string> row{format_number(e.h), format_number(e.err_u_H1), format_number(e.err_u_L2),
                                     format_number(e.err_p_L2), format_number(e.err_lambda_L2)};
        if (i == 0) {
            row.insert(row.end(), 4, "");
        } else {
            const ErrorReport& p = r.rows[i - 1];
            row.push_back(rate(p.err_u_H1, e.err_u_H1, p.h, e.h));
            row.push_back(rate(p.err_u_L2, e.err_u_L2, p.h, e.h));
            row.push_back(rate(p.err_p_L2, e.err_p_L2, p.h, e.h));
            row.push_back(rate(p.err_lambda_L2, e.err_lambda_L2, p.h, e.h));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table sweep_table(const SweepResult& r) {
    Table t;
    t.header = {"x_c", "rel_err_lambda_stab_pct", "rel_err_lambda_unstab_pct", "status"};
    for (const auto& row : r.rows)
        t.rows.push_back({format_number(row.x_c), format_number(row.rel_err_stab_pct),
                          format_number(row.rel_err_unstab_pct), row.status});
    return t;
}

Table fall_table(const std::vector<StepRecord>& records) {
    Table t;
    t.header = {"t", "hx", "hy", "hvx", "hvy", "theta", "omega", "Fx", "Fy", "torque", "newton_iters"};
    for (const auto& r : records)
        t.rows.push_back({format_number(r.t), format_number(r.state.center.x()), format_number(r.state.center.y()),
                          format_number(r.state.velocity.x()), format_number(r.state.velocity.y()),
                          format_number(r.state.angle), format_number(r.state.omega),
                          format_number(r.traction.force.x()), format_number(r.traction.force.y()),
                          format_number(r.traction.torque), std::to_string(r.newton_iterations)});
    return t;
}

Table steady_table(const ErrorReport& e) {
    Table t;
    t.header = {"h", "err_u_H1", "err_u_L2", "err_p_L2", "err_lambda_L2", "rel_err_lambda", "triple_norm_err"};
    t.rows.push_back({format_number(e.h), format_number(e.err_u_H1), format_number(e.err_u_L2),
                      format_number(e.err_p_L2), format_number(e.err_lambda_L2), format_number(e.rel_lambda()),
                      format_number(e.triple_norm_err)});
    return t;
}

VertexFields vertex_fields(const Mesh& mesh, const DofMap& dofs, const Solution& sol) {
    VertexFields f;
    const Index nv = mesh.num_nodes();
    f.velocity.assign(static_cast<std::size_t>(nv), Vec2::Zero());
    f.pressure.assign(static_cast<std::size_t>(nv), 0.0);
    for (Index i = 0; i < nv; ++i) {
        const Index d0 = dofs.u_dof(i, 0);
        if (d0 >= 0) f.velocity[static_cast<std::size_t>(i)] = Vec2(sol.x[d0], sol.x[d0 + 1]);
        const Index dp = dofs.p_dof(i);
        if (dp >= 0) f.pressure[static_cast<std::size_t>(i)] = sol.x[dp];
    }
    return f;
}

VertexFields vertex_fields(const Mesh& mesh, const FallSimulation& sim) {
    VertexFields f;
    const std::size_t nv = static_cast<std::size_t>(mesh.num_nodes());
    f.velocity.assign(sim.nodal_velocity().begin(), sim.nodal_velocity().begin() + static_cast<std::ptrdiff_t>(nv));
    f.pressure.resize(nv);
    for (std::size_t i = 0; i < nv; ++i) f.pressure[i] = sim.nodal_pressure()[static_cast<Index>(i)];
    return f;
}

std::string to_vtk(const Mesh& mesh, const std::vector<ElementClass>& classes, const VertexFields& fields,
                   const std::string& title) {
    const Index nv = mesh.num_nodes();
    const Index nt = mesh.num_triangles();
    XFD_REQUIRE(static_cast<Index>(fields.velocity.size()) == nv && static_cast<Index>(fields.pressure.size()) == nv,
                InvalidArgument, "vtk: vertex fields do not match the mesh");
    XFD_REQUIRE(static_cast<Index>(classes.size()) == nt, InvalidArgument, "vtk: one class per triangle expected");
    std::ostringstream os;
    os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << nv << " double\n";
    for (Index i = 0; i < nv; ++i) {
        const Vec2& x = mesh.node(i);
        os << format_number(x.x()) << ' ' << format_number(x.y()) << " 0\n";
    }
    os << "CELLS " << nt << ' ' << 4 * nt << '\n';
    for (Index t = 0; t < nt; ++t) {
        const auto& tri = mesh.triangle(t);
        os << "3 " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
    }
    os << "CELL_TYPES " << nt << '\n';
    for (Index t = 0; t < nt; ++t) os << "5\n";
    os << "CELL_DATA " << nt << "\nSCALARS element_class int 1\nLOOKUP_TABLE default\n";
    for (ElementClass c : classes) os << (c == ElementClass::Fluid ? 0 : c == ElementClass::Solid ? 1 : 2) << '\n';
    os << "POINT_DATA " << nv << "\nVECTORS velocity double\n";
    for (const Vec2& v : fields.velocity) os << format_number(v.x()) << ' ' << format_number(v.y()) << " 0\n";
    os << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
    for (double p : fields.pressure) os << format_number(p) << '\n';
    return os.str();
}

void write_vtk_snapshot(const Mesh& mesh, const std::vector<ElementClass>& classes, const VertexFields& fields,
                        const std::string& path) {
    write_file_atomic(path, to_vtk(mesh, classes, fields));
}

std::string RunManifest::to_json() const {
    nlohmann::json j;
    j["config"] = config_json.empty() ? nlohmann::json::object() : nlohmann::json::parse(config_json);
    j["version"] = version;
    j["experiment"] = experiment;
    j["status"] = status;
    if (!error.empty()) j["error"] = error;
    j["wall_clock_s"] = wall_clock;
    j["timings_s"] = timings;
    j["dof_counts"] = dof_counts;
    j["summary"] = nlohmann::json::object();
    for (const auto& [k, v] : summary) j["summary"][k] = std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(format_number(v));
    j["outputs"] = outputs;
    return j.dump(2) + "\n";
}

} // namespace xfd
