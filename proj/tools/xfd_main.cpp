#include "xfd/app.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <cstdlib>

int main(int argc, char** argv) {
    CLI::App cli{"Fictitious-domain Stokes / Navier-Stokes solver with a falling rigid body"};
    std::string config_path;
    std::string experiment;
    std::string out_dir;
    std::vector<std::string> overrides;
    cli.add_option("config", config_path, "JSON configuration file")->required();
    cli.add_option("--experiment", experiment, "convergence | sweep | fall | steady");
    cli.add_option("--out", out_dir, "output directory (default: output.dir)");
    cli.add_option("--override", overrides, "dotted.key=value, repeatable");
    CLI11_PARSE(cli, argc, argv);

    spdlog::set_level(spdlog::level::info);
    if (const char* level = std::getenv("XFD_LOG_LEVEL")) spdlog::set_level(spdlog::level::from_str(level));

    try {
        const xfd::Config cfg = xfd::parse_config(config_path, experiment, overrides);
        const std::string out = out_dir.empty() ? cfg.output.dir : out_dir;
        spdlog::info("running {} into {}", xfd::to_string(cfg.experiment), out);
        const xfd::RunManifest m = xfd::run_experiment(cfg, out);
        spdlog::info("done in {:.2f} s", m.wall_clock);
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return EXIT_FAILURE;
    }
    return EXIT_SUCCESS;
}
