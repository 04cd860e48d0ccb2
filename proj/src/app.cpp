#include "xfd/app.hpp"
#include "xfd/profile.hpp"

#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdio>
#include <filesystem>

namespace xfd {

namespace {

std::string path_in(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

void record_dofs(RunManifest& m, const BlockLayout& l) {
    m.dof_counts["velocity"] = l.nu;
    m.dof_counts["pressure"] = l.np;
    m.dof_counts["multiplier"] = l.nl;
}

void run_body(const Config& cfg, const std::string& out, RunManifest& m) {
    switch (cfg.experiment) {
    case Experiment::Convergence: {
        const ConvergenceResult r = run_convergence(cfg);
        const std::string csv = path_in(out, "convergence.csv");
        write_csv(convergence_table(r), csv);
        m.outputs.push_back(csv);
        m.summary["rate_u_H1"] = r.rate_u_H1;
        m.summary["rate_u_L2"] = r.rate_u_L2;
        m.summary["rate_p_L2"] = r.rate_p_L2;
        m.summary["rate_lambda_L2"] = r.rate_lambda;
        break;
    }
    case Experiment::Sweep: {
        const SweepResult r = run_sweep(cfg);
        const std::string csv = path_in(out, "sweep.csv");
        write_csv(sweep_table(r), csv);
        m.outputs.push_back(csv);
        m.summary["failures_stab"] = r.failures_stab();
        m.summary["failures_unstab"] = r.failures_unstab();
        break;
    }
    case Experiment::Steady: {
        const SteadyResult r = run_steady(cfg);
        record_dofs(m, r.run.disc.system.layout);
        const std::string csv = path_in(out, "steady.csv");
        write_csv(steady_table(r.run.errors), csv);
        m.outputs.push_back(csv);
        if (cfg.output.vtk) {
            const std::string vtk = path_in(out, "steady.vtk");
            write_vtk_snapshot(*r.mesh, r.run.disc.geo.classes,
                               vertex_fields(*r.mesh, r.run.disc.dofs, r.run.solution), vtk);
            m.outputs.push_back(vtk);
        }
        break;
    }
    case Experiment::Fall: {
        const int every = cfg.output.vtk ? cfg.time.snapshot_every : 0;
        auto snapshot = [&](const Mesh& mesh, const FallSimulation& sim, int step) {
            const std::vector<ElementClass> classes = sim.discretization()
                                                          ? sim.discretization()->geo.classes
                                                          : classify_elements(mesh, sim.body());
            char name[64];
            std::snprintf(name, sizeof name, "fall_%06d.vtk", step);
            const std::string vtk = path_in(out, name);
            write_vtk_snapshot(mesh, classes, vertex_fields(mesh, sim), vtk);
            m.outputs.push_back(vtk);
        };
        const Mesh mesh = build_structured_mesh(cfg.mesh.rect, cfg.mesh.nx, cfg.mesh.ny, cfg.mesh.split);
        const FallResult r = run_fall(cfg, [&](const FallSimulation& sim, const StepRecord& rec) {
            if (every > 0 && rec.step % every == 0) snapshot(mesh, sim, rec.step);
            m.dof_counts["velocity"] = rec.num_u;
            m.dof_counts["pressure"] = rec.num_p;
            m.dof_counts["multiplier"] = rec.num_lambda;
        });
        const std::string csv = path_in(out, "fall.csv");
        write_csv(fall_table(r.records), csv);
        m.outputs.push_back(csv);
        m.summary["steps"] = static_cast<double>(r.records.size());
        if (!r.completed) {
            if (r.failure_kind == "NewtonDiverged") throw NewtonDiverged(r.failure);
            if (r.failure_kind == "SolidLeftDomain") throw SolidLeftDomain(r.failure);
            throw SingularSystem(r.failure);
        }
        break;
    }
    }
}

} // namespace

RunManifest run_experiment(const Config& cfg, const std::string& out_dir) {
    const auto start = std::chrono::steady_clock::now();
    PhaseTimings::global().reset();
    RunManifest m;
    m.config_json = config_to_json(cfg);
    m.version = kVersion;
    m.experiment = to_string(cfg.experiment);

    auto finish = [&]() {
        m.timings = PhaseTimings::global().totals();
        m.wall_clock = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        write_file_atomic(path_in(out_dir, "manifest.json"), m.to_json());
    };
    try {
        run_body(cfg, out_dir, m);
    } catch (const std::exception& e) {
        m.status = "error";
        m.error = e.what();
        finish();
        throw;
    }
    finish();
    return m;
}

} // namespace xfd
