#pragma once

#include "collapsim/errors.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace collapsim {
namespace cli {

// Flat `key = value` experiment description; '#' starts a comment. The file
// carries the physics parameters; seed / out_dir / format may be set here
// and overridden on the command line.
struct ExperimentConfig {
    std::string experiment;
    std::map<std::string, std::string> params;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    std::string format = "csv"; // csv | json series files

    double number(const std::string& key) const;
    double number_or(const std::string& key, double fallback) const;
    long integer(const std::string& key) const;
    long integer_or(const std::string& key, long fallback) const;
    std::string text_or(const std::string& key, const std::string& fallback) const;
    bool flag_or(const std::string& key, bool fallback) const;
};

// Parses the file into key/value pairs. Throws IoError when unreadable and
// ConfigError on malformed lines.
std::map<std::string, std::string> parse_config_file(const std::string& path);

// Builds a config for `experiment` from the raw pairs, consuming the common
// keys (seed, out_dir, format).
ExperimentConfig make_config(const std::string& experiment,
                             std::map<std::string, std::string> pairs);

// All violations, empty when runnable: missing/unknown keys, bad numbers,
// violated stability bounds. Never executes the experiment.
std::vector<std::string> validate_config(const ExperimentConfig& config);

const std::vector<std::string>& known_experiments();

} // namespace cli
} // namespace collapsim
