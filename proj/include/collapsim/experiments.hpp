#pragma once

#include "collapsim/config.hpp"

#include <string>
#include <vector>

namespace collapsim {
namespace cli {

struct RunReport {
    ExperimentConfig config;
    std::vector<std::string> series_files; // paths relative to out_dir
    std::string report_file;               // report.json inside out_dir
    double wall_time_seconds = 0.0;
};

// Validates, executes deterministically for (config, seed), writes the series
// files and report.json under config.out_dir. Trajectory ensembles fan out to
// a worker pool capped by COLLAPSIM_THREADS (0 = sequential); results are
// merged in trajectory-index order, so output is independent of the pool size.
// Throws ConfigError / IoError / NumericalError.
RunReport run_experiment(const ExperimentConfig& config);

// Worker-pool size after applying COLLAPSIM_THREADS.
int worker_count();

} // namespace cli
} // namespace collapsim
