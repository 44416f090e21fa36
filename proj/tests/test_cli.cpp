#include <doctest.h>

#include "collapsim/config.hpp"
#include "collapsim/experiments.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace collapsim;
using namespace collapsim::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
    fs::path p = fs::temp_directory_path() / "collapsim_cli_tests";
    fs::create_directories(p);
    return p;
}

std::string write_file(const std::string& name, const std::string& body) {
    fs::path p = scratch_dir() / name;
    std::ofstream out(p);
    out << body;
    return p.string();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("config parsing: comments, trimming, errors") {
    std::string path = write_file("ok.cfg",
                                  "# a ruin run\n"
                                  "experiment = ruin\n"
                                  "x0 = 0.3   # thirty percent\n"
                                  "stake = 0.01\n"
                                  "trajectories = 100\n");
    auto pairs = parse_config_file(path);
    CHECK(pairs.at("x0") == "0.3");
    CHECK(pairs.at("experiment") == "ruin");

    CHECK_THROWS_AS(parse_config_file(scratch_dir().string() + "/missing.cfg"), IoError);
    std::string bad = write_file("bad.cfg", "x0 0.3\n");
    CHECK_THROWS_AS(parse_config_file(bad), ConfigError);
    std::string dup = write_file("dup.cfg", "x0 = 1\nx0 = 2\n");
    CHECK_THROWS_AS(parse_config_file(dup), ConfigError);
}

TEST_CASE("validate: valid csl config has no diagnostics") {
    ExperimentConfig cfg = make_config("csl", {{"lambda", "1.0"},
                                               {"a_l", "0.7071"},
                                               {"a_r", "-0.7071"},
                                               {"x0", "0.3"},
                                               {"t_end", "2.0"},
                                               {"trajectories", "100"}});
    CHECK(validate_config(cfg).empty());
}

TEST_CASE("validate: missing key is named, unknown keys rejected") {
    ExperimentConfig cfg = make_config("csl", {{"a_l", "0.7"},
                                               {"a_r", "-0.7"},
                                               {"x0", "0.3"},
                                               {"t_end", "2.0"},
                                               {"trajectories", "100"}});
    auto diags = validate_config(cfg);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].find("lambda") != std::string::npos);

    cfg.params["lambda"] = "1.0";
    cfg.params["bogus"] = "3";
    diags = validate_config(cfg);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].find("bogus") != std::string::npos);
}

TEST_CASE("validate: stability bound violations are diagnosed with the bound") {
    // two-state: dt <= 1e-2 / (lambda (a_l - a_r)^2) = 2.5e-3 here
    ExperimentConfig cfg = make_config("csl", {{"lambda", "2.0"},
                                               {"a_l", "1.0"},
                                               {"a_r", "-1.0"},
                                               {"x0", "0.3"},
                                               {"t_end", "2.0"},
                                               {"trajectories", "10"},
                                               {"dt", "0.01"}});
    auto diags = validate_config(cfg);
    REQUIRE(diags.size() == 1);
    double bound = 1e-2 / (2.0 * 4.0); // recomputed independently
    CHECK(diags[0].find("stability") != std::string::npos);
    CHECK(diags[0].find(std::to_string(bound).substr(0, 6)) != std::string::npos);

    // diffusion: dt <= dx^2 / (2 lambda max D)
    ExperimentConfig dcfg = make_config("diffusion", {{"lambda", "1.0"},
                                                      {"x0", "0.3"},
                                                      {"r", "1"},
                                                      {"n_cells", "100"},
                                                      {"t_end", "1.0"},
                                                      {"dt", "0.01"}});
    auto d2 = validate_config(dcfg);
    REQUIRE(d2.size() == 1);
    CHECK(d2[0].find("stability") != std::string::npos);
}

TEST_CASE("run_experiment: degenerate input fails before any file is written") {
    fs::path out = scratch_dir() / "never_created";
    fs::remove_all(out);
    ExperimentConfig cfg = make_config("ruin", {{"x0", "0.3"},
                                                {"stake", "0.01"},
                                                {"trajectories", "0"}});
    cfg.out_dir = out.string();
    CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("run_experiment: ruin end-to-end with deterministic reruns") {
    ExperimentConfig cfg = make_config("ruin", {{"x0", "0.3"},
                                                {"stake", "0.01"},
                                                {"trajectories", "400"}});
    cfg.seed = 5;

    fs::path out1 = scratch_dir() / "run1";
    fs::path out2 = scratch_dir() / "run2";
    fs::remove_all(out1);
    fs::remove_all(out2);

    cfg.out_dir = out1.string();
    RunReport r1 = run_experiment(cfg);
    cfg.out_dir = out2.string();
    RunReport r2 = run_experiment(cfg);

    REQUIRE(!r1.series_files.empty());
    for (const auto& f : r1.series_files) {
        CHECK(fs::exists(out1 / f));
        CHECK(slurp(out1 / f) == slurp(out2 / f)); // byte-identical data files
    }
    CHECK(fs::exists(out1 / "report.json"));

    // a different seed must change the data
    cfg.seed = 6;
    fs::path out3 = scratch_dir() / "run3";
    fs::remove_all(out3);
    cfg.out_dir = out3.string();
    run_experiment(cfg);
    CHECK(slurp(out1 / "outcomes.csv") != slurp(out3 / "outcomes.csv"));
}

TEST_CASE("run_experiment: worker pool size does not change the bytes") {
    ExperimentConfig cfg = make_config("csl", {{"lambda", "1.0"},
                                               {"a_l", "0.70710678118654752"},
                                               {"a_r", "-0.70710678118654752"},
                                               {"x0", "0.3"},
                                               {"t_end", "1.0"},
                                               {"trajectories", "200"},
                                               {"checkpoints", "4"}});
    cfg.seed = 9;

    fs::path seq = scratch_dir() / "seq";
    fs::path par = scratch_dir() / "par";
    fs::remove_all(seq);
    fs::remove_all(par);

    setenv("COLLAPSIM_THREADS", "0", 1);
    cfg.out_dir = seq.string();
    RunReport r1 = run_experiment(cfg);
    setenv("COLLAPSIM_THREADS", "4", 1);
    cfg.out_dir = par.string();
    RunReport r2 = run_experiment(cfg);
    unsetenv("COLLAPSIM_THREADS");

    for (const auto& f : r1.series_files) CHECK(slurp(seq / f) == slurp(par / f));
}

TEST_CASE("collapsim binary: exit codes and checked-in configs") {
    auto run = [](const std::string& args) {
        std::string cmd = std::string(COLLAPSIM_BIN) + " " + args + " > /dev/null 2>&1";
        int rc = std::system(cmd.c_str());
        return WEXITSTATUS(rc);
    };

    // every checked-in config validates
    for (const char* cfg :
         {"ruin_born.cfg", "ruin_halving.cfg", "diffusion_r1_moments.cfg",
          "diffusion_r2_tails.cfg", "grw_pointer_born.cfg", "grw_trigger.cfg",
          "csl_two_state_born.cfg", "csl_linear_weights.cfg", "csl_diffusion_pde.cfg",
          "stuff_halves.cfg", "flow_balance.cfg"}) {
        std::string path = std::string(COLLAPSIM_CONFIG_DIR) + "/" + cfg;
        CHECK_MESSAGE(run("validate --config " + path) == 0, cfg);
    }

    // unreadable config -> 3; invalid config -> 2; a small run -> 0
    CHECK(run("validate --config " + (scratch_dir() / "nope.cfg").string()) == 3);
    std::string bad = write_file("bad_run.cfg",
                                 "experiment = ruin\nx0 = 0.3\nstake = 0.01\n"
                                 "trajectories = 0\n");
    fs::path out = scratch_dir() / "bin_out";
    fs::remove_all(out);
    CHECK(run("ruin --config " + bad + " --out " + out.string()) == 2);
    CHECK_FALSE(fs::exists(out));

    std::string ok = write_file("ok_run.cfg",
                                "experiment = ruin\nx0 = 0.3\nstake = 0.01\n"
                                "trajectories = 200\n");
    CHECK(run("ruin --config " + ok + " --seed 3 --out " + out.string()) == 0);
    CHECK(fs::exists(out / "report.json"));
    CHECK(fs::exists(out / "outcomes.csv"));
}

TEST_CASE("run_experiment: stuff and flow write their reports") {
    ExperimentConfig cfg = make_config("stuff", {{"sector", "one"},
                                                 {"n_cells", "96"},
                                                 {"x_min", "-12"},
                                                 {"x_max", "12"},
                                                 {"v_lo", "-12"},
                                                 {"v_hi", "0"},
                                                 {"epsilon", "1e-3"},
                                                 {"width", "0.5"},
                                                 {"center_left", "-6"},
                                                 {"center_right", "6"},
                                                 {"weight_left", "0.5"},
                                                 {"hydrogen_r_cm", "1e-6"}});
    fs::path out = scratch_dir() / "stuff_out";
    fs::remove_all(out);
    cfg.out_dir = out.string();
    cfg.format = "json";
    RunReport rep = run_experiment(cfg);
    CHECK(fs::exists(out / "stuff.json"));
    std::string report = slurp(out / "report.json");
    CHECK(report.find("hydrogen_log10_p_out") != std::string::npos);

    ExperimentConfig fcfg = make_config("flow", {{"lambda", "1.0"},
                                                 {"a", "1.0"},
                                                 {"n_cells", "48"},
                                                 {"x_min", "-6"},
                                                 {"x_max", "6"},
                                                 {"v_lo", "-6"},
                                                 {"v_hi", "0"},
                                                 {"dt", "1e-3"},
                                                 {"t_end", "0.05"},
                                                 {"width", "0.5"},
                                                 {"center_in", "-3"},
                                                 {"center_out", "3"}});
    fs::path fout = scratch_dir() / "flow_out";
    fs::remove_all(fout);
    fcfg.out_dir = fout.string();
    run_experiment(fcfg);
    CHECK(fs::exists(fout / "flow.csv"));
    CHECK(fs::exists(fout / "report.json"));
}
