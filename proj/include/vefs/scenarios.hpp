#pragma once

#include "vefs/config.hpp"

namespace vefs {

// Executes the configured scenario; writes timeseries.csv, snapshots, the
// resolved config, report.json and the plot script into cfg.out_dir.
// Returns the process exit status (0 on success).
int run(const RunConfig &cfg);

// Profile described by the config (sinusoidal surface over a flat bottom).
DomainProfile profile_from_config(const RunConfig &cfg);

} // namespace vefs
