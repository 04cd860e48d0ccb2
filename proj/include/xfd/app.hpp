#pragma once

#include "xfd/config.hpp"
#include "xfd/output.hpp"

#include <string>

namespace xfd {

inline constexpr const char* kVersion = "0.1.0";

/// Runs the configured experiment and writes its CSV, optional VTK
/// snapshots and manifest.json under `out_dir`. Solver errors are recorded in
/// the manifest and rethrown.
RunManifest run_experiment(const Config& cfg, const std::string& out_dir);

} // namespace xfd
