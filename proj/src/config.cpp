#include "collapsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace collapsim {
namespace cli {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& s, double& out) {
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end && *end == '\0' && end != s.c_str() && std::isfinite(out);
}

struct KeySpec {
    const char* name;
    bool required;
};

// Per-experiment parameter schema (common keys handled separately).
const std::map<std::string, std::vector<KeySpec>>& schema() {
    static const std::map<std::string, std::vector<KeySpec>> s = {
        {"ruin",
         {{"x0", true}, {"stake", true}, {"trajectories", true}, {"halving", false},
          {"max_steps", false}}},
        {"diffusion",
         {{"lambda", true}, {"x0", true}, {"r", true}, {"n_cells", true}, {"t_end", true},
          {"dt", false}, {"checkpoints", false}}},
        {"grw",
         {{"lambda", true}, {"a", true}, {"n", true}, {"branch_separation", true},
          {"weight_left", true}, {"trajectories", true}}},
        {"csl",
         {{"lambda", true}, {"a_l", true}, {"a_r", true}, {"x0", true}, {"t_end", true},
          {"trajectories", true}, {"dt", false}, {"mode", false}, {"checkpoints", false}}},
        {"stuff",
         {{"sector", true}, {"n_cells", true}, {"x_min", true}, {"x_max", true},
          {"v_lo", true}, {"v_hi", true}, {"epsilon", true}, {"width", true},
          {"center_left", false}, {"center_right", false}, {"weight_left", false},
          {"center_in", false}, {"center_out", false}, {"hydrogen_r_cm", false}}},
        {"flow",
         {{"lambda", true}, {"a", true}, {"n_cells", true}, {"x_min", true}, {"x_max", true},
          {"v_lo", true}, {"v_hi", true}, {"dt", true}, {"t_end", true}, {"width", true},
          {"center_in", true}, {"center_out", true}}},
    };
    return s;
}

} // namespace

double ExperimentConfig::number(const std::string& key) const {
    auto it = params.find(key);
    if (it == params.end()) throw ConfigError("missing key: " + key);
    double v = 0.0;
    if (!parse_number(it->second, v))
        throw ConfigError("key '" + key + "' is not a number: " + it->second);
    return v;
}

double ExperimentConfig::number_or(const std::string& key, double fallback) const {
    return params.count(key) ? number(key) : fallback;
}

long ExperimentConfig::integer(const std::string& key) const {
    double v = number(key);
    long n = static_cast<long>(std::llround(v));
    if (std::abs(v - static_cast<double>(n)) > 1e-9)
        throw ConfigError("key '" + key + "' must be an integer");
    return n;
}

long ExperimentConfig::integer_or(const std::string& key, long fallback) const {
    return params.count(key) ? integer(key) : fallback;
}

std::string ExperimentConfig::text_or(const std::string& key, const std::string& fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

bool ExperimentConfig::flag_or(const std::string& key, bool fallback) const {
    auto it = params.find(key);
    if (it == params.end()) return fallback;
    const std::string& v = it->second;
    if (v == "1" || v == "true" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "no") return false;
    throw ConfigError("key '" + key + "' must be a boolean");
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file: " + path);
    std::map<std::string, std::string> pairs;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string t = trim(line);
        if (t.empty()) continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key or value");
        if (pairs.count(key))
            throw ConfigError(path + ":" + std::to_string(lineno) + ": duplicate key " + key);
        pairs[key] = value;
    }
    return pairs;
}

ExperimentConfig make_config(const std::string& experiment,
                             std::map<std::string, std::string> pairs) {
    ExperimentConfig cfg;
    cfg.experiment = experiment;
    if (auto it = pairs.find("experiment"); it != pairs.end()) {
        if (cfg.experiment.empty()) cfg.experiment = it->second;
        else if (cfg.experiment != it->second)
            throw ConfigError("config file names experiment '" + it->second +
                              "' but '" + cfg.experiment + "' was requested");
        pairs.erase(it);
    }
    if (cfg.experiment.empty())
        throw ConfigError("no experiment named (subcommand or 'experiment =' key)");
    if (auto it = pairs.find("seed"); it != pairs.end()) {
        cfg.seed = static_cast<std::uint64_t>(std::strtoull(it->second.c_str(), nullptr, 10));
        pairs.erase(it);
    }
    if (auto it = pairs.find("out_dir"); it != pairs.end()) {
        cfg.out_dir = it->second;
        pairs.erase(it);
    }
    if (auto it = pairs.find("format"); it != pairs.end()) {
        cfg.format = it->second;
        pairs.erase(it);
    }
    cfg.params = std::move(pairs);
    return cfg;
}

const std::vector<std::string>& known_experiments() {
    static const std::vector<std::string> v = {"ruin", "diffusion", "grw", "csl", "stuff", "flow"};
    return v;
}

std::vector<std::string> validate_config(const ExperimentConfig& config) {
    std::vector<std::string> diags;
    auto it = schema().find(config.experiment);
    if (it == schema().end()) {
        diags.push_back("unknown experiment: " + config.experiment);
        return diags;
    }
    if (config.format != "csv" && config.format != "json")
        diags.push_back("format must be csv or json");

    std::set<std::string> known;
    for (const auto& k : it->second) {
        known.insert(k.name);
        if (k.required && !config.params.count(k.name))
            diags.push_back("missing required key: " + std::string(k.name));
    }
    for (const auto& [key, value] : config.params) {
        if (!known.count(key)) {
            diags.push_back("unknown key: " + key);
            continue;
        }
        if (config.experiment == "stuff" && key == "sector") continue;
        if (config.experiment == "csl" && key == "mode") continue;
        double v = 0.0;
        if (!parse_number(value, v)) diags.push_back("key '" + key + "' is not a number: " + value);
    }
    if (!diags.empty()) return diags;

    auto positive = [&](const char* key) {
        if (config.params.count(key) && !(config.number(key) > 0.0))
            diags.push_back(std::string(key) + " must be positive");
    };
    auto fraction = [&](const char* key) {
        if (config.params.count(key)) {
            double v = config.number(key);
            if (!(v >= 0.0 && v <= 1.0))
                diags.push_back(std::string(key) + " must lie in [0,1]");
        }
    };

    const std::string& e = config.experiment;
    if (e == "ruin") {
        fraction("x0");
        positive("stake");
        if (config.integer("trajectories") < 1) diags.push_back("trajectories must be >= 1");
        if (config.flag_or("halving", false) && config.params.count("x0")) {
            double x0v = config.number("x0");
            if (x0v <= 0.0 || x0v >= 1.0)
                diags.push_back("halving variant needs x0 strictly inside (0,1)");
        }
        if (!config.flag_or("halving", false) && config.params.count("stake") &&
            config.params.count("x0")) {
            double q = config.number("x0") / config.number("stake");
            if (std::abs(q - std::round(q)) > 1e-9)
                diags.push_back("x0 must be an integer multiple of stake (halving = false)");
            double q1 = 1.0 / config.number("stake");
            if (std::abs(q1 - std::round(q1)) > 1e-9)
                diags.push_back("1/stake must be an integer (halving = false)");
        }
    } else if (e == "diffusion") {
        positive("lambda");
        fraction("x0");
        if (config.integer("r") < 1) diags.push_back("r must be >= 1");
        if (config.integer("n_cells") < 4) diags.push_back("n_cells must be >= 4");
        positive("t_end");
        if (config.params.count("dt")) {
            double h = 1.0 / static_cast<double>(config.integer("n_cells"));
            int r = static_cast<int>(config.integer("r"));
            double max_d = std::pow(0.25, r);
            double bound = h * h / (2.0 * config.number("lambda") * max_d);
            if (config.number("dt") > bound)
                diags.push_back("dt violates the stability bound dt <= dx^2/(2 lambda max[x(1-x)]^r) = " +
                                std::to_string(bound));
        }
    } else if (e == "grw") {
        positive("lambda");
        positive("a");
        if (config.integer("n") < 1) diags.push_back("n must be >= 1");
        fraction("weight_left");
        if (config.integer("trajectories") < 1) diags.push_back("trajectories must be >= 1");
        if (config.params.count("branch_separation") && config.params.count("a") &&
            config.number("branch_separation") < 10.0 * config.number("a"))
            diags.push_back("branch_separation must be >= 10 a");
    } else if (e == "csl") {
        positive("lambda");
        fraction("x0");
        positive("t_end");
        if (config.integer("trajectories") < 1) diags.push_back("trajectories must be >= 1");
        std::string mode = config.text_or("mode", "cooked");
        if (mode != "cooked" && mode != "linear") diags.push_back("mode must be cooked or linear");
        if (config.params.count("a_l") && config.params.count("a_r")) {
            double d = config.number("a_l") - config.number("a_r");
            if (d == 0.0) diags.push_back("a_l must differ from a_r");
            else if (config.params.count("dt")) {
                double bound = 1e-2 / (config.number("lambda") * d * d);
                if (config.number("dt") > bound)
                    diags.push_back("dt violates the stability bound dt <= 1e-2/(lambda (a_l-a_r)^2) = " +
                                    std::to_string(bound));
            }
        }
    } else if (e == "stuff") {
        std::string sector = config.text_or("sector", "");
        if (sector != "one" && sector != "two") diags.push_back("sector must be one or two");
        if (config.integer("n_cells") < 2) diags.push_back("n_cells must be >= 2");
        positive("width");
        double eps = config.number("epsilon");
        if (!(eps >= 0.0 && eps < 1.0)) diags.push_back("epsilon must lie in [0,1)");
        if (sector == "one")
            for (const char* k : {"center_left", "center_right", "weight_left"})
                if (!config.params.count(k))
                    diags.push_back(std::string("missing required key: ") + k + " (sector = one)");
        if (sector == "two")
            for (const char* k : {"center_in", "center_out"})
                if (!config.params.count(k))
                    diags.push_back(std::string("missing required key: ") + k + " (sector = two)");
    } else if (e == "flow") {
        positive("lambda");
        positive("a");
        positive("dt");
        positive("t_end");
        positive("width");
        if (config.integer("n_cells") < 8) diags.push_back("n_cells must be >= 8");
        if (config.params.count("x_min") && config.params.count("x_max") &&
            config.params.count("n_cells") && config.params.count("a")) {
            double dx = (config.number("x_max") - config.number("x_min")) /
                        static_cast<double>(config.integer("n_cells"));
            if (dx > config.number("a") / 4.0)
                diags.push_back("grid too coarse: need dx <= a/4");
        }
    }
    return diags;
}

} // namespace cli
} // namespace collapsim
