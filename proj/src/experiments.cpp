#include "collapsim/experiments.hpp"

#include "collapsim/csl.hpp"
#include "collapsim/grw.hpp"
#include "collapsim/reality.hpp"
#include "collapsim/ruin.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <thread>

namespace collapsim {
namespace cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Series table with deterministic formatting; cells are preformatted strings.
struct Series {
    std::string name; // without extension
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void row(std::initializer_list<std::string> cells) { rows.emplace_back(cells); }
};

std::string write_series(const Series& s, const std::string& dir, const std::string& format) {
    std::string file = s.name + (format == "json" ? ".json" : ".csv");
    fs::path path = fs::path(dir) / file;
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    if (format == "json") {
        json j;
        j["columns"] = s.columns;
        j["rows"] = s.rows;
        out << j.dump(2) << "\n";
    } else {
        for (std::size_t c = 0; c < s.columns.size(); ++c)
            out << (c ? "," : "") << s.columns[c];
        out << "\n";
        for (const auto& r : s.rows) {
            for (std::size_t c = 0; c < r.size(); ++c) out << (c ? "," : "") << r[c];
            out << "\n";
        }
    }
    if (!out) throw IoError("failed writing " + path.string());
    return file;
}

int env_thread_cap() {
    const char* v = std::getenv("COLLAPSIM_THREADS");
    if (!v) return -1;
    return std::atoi(v);
}

// Index-parallel loop; results must be written to per-index slots so the
// merge order is fixed by the index, not the schedule.
void parallel_for(long n, const std::function<void(long)>& fn) {
    int workers = worker_count();
    if (workers <= 1 || n < 2 * workers) {
        for (long i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        long lo = n * w / workers, hi = n * (w + 1) / workers;
        pool.emplace_back([lo, hi, &fn] {
            for (long i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

struct Stat {
    double mean = 0.0, stderr_ = 0.0;
    long n = 0;
};

Stat stat_of(const std::vector<double>& v) {
    Stat s;
    s.n = static_cast<long>(v.size());
    if (v.empty()) return s;
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - m) * (x - m);
    if (v.size() > 1) var /= static_cast<double>(v.size() - 1);
    s.mean = m;
    s.stderr_ = std::sqrt(var / static_cast<double>(v.size()));
    return s;
}

json stat_json(const Stat& s) {
    return json{{"mean", s.mean}, {"stderr", s.stderr_}, {"n", s.n}};
}

// --- experiment bodies; each returns the statistics object and fills series ---

json run_ruin(const ExperimentConfig& cfg, std::vector<Series>& series) {
    ruin::GameConfig game;
    game.x0 = cfg.number("x0");
    game.stake = cfg.number("stake");
    game.halving = cfg.flag_or("halving", false);
    game.max_steps = cfg.integer_or("max_steps", 100000);
    long m = cfg.integer("trajectories");

    std::vector<ruin::GameResult> results(static_cast<std::size_t>(m));
    parallel_for(m, [&](long i) {
        RngStream rng(cfg.seed, static_cast<std::uint64_t>(i));
        results[static_cast<std::size_t>(i)] = ruin::play_game(game, rng, i == 0 ? 10000 : 0);
    });

    Series outcomes{"outcomes", {"game", "winner", "steps", "final_x"}, {}};
    std::vector<double> l_win, steps;
    for (long i = 0; i < m; ++i) {
        const auto& r = results[static_cast<std::size_t>(i)];
        const char* w = r.winner == ruin::Winner::L ? "L"
                        : r.winner == ruin::Winner::R ? "R" : "none";
        outcomes.row({std::to_string(i), w, std::to_string(r.steps), fmt(r.final_x)});
        l_win.push_back(r.winner == ruin::Winner::L ? 1.0 : 0.0);
        steps.push_back(static_cast<double>(r.steps));
    }
    series.push_back(std::move(outcomes));

    long max_steps = 0;
    for (const auto& r : results) max_steps = std::max(max_steps, r.steps);
    int bins = 30;
    double width = std::max(1.0, std::ceil(static_cast<double>(max_steps + 1) / bins));
    std::vector<long> hist(static_cast<std::size_t>(bins), 0);
    for (const auto& r : results) {
        int b = std::min(bins - 1, static_cast<int>(static_cast<double>(r.steps) / width));
        ++hist[static_cast<std::size_t>(b)];
    }
    Series hist_s{"steps_histogram", {"steps_lo", "steps_hi", "count"}, {}};
    for (int b = 0; b < bins; ++b)
        hist_s.row({fmt(b * width), fmt((b + 1) * width),
                    std::to_string(hist[static_cast<std::size_t>(b)])});
    series.push_back(std::move(hist_s));

    if (!results.empty() && !results[0].trajectory.empty()) {
        Series traj{"sample_trajectory", {"step", "x"}, {}};
        const auto& t = results[0].trajectory;
        for (std::size_t k = 0; k < t.size(); ++k)
            traj.row({std::to_string(k + 1), fmt(t[k])});
        series.push_back(std::move(traj));
    }

    json stats{{"l_win_fraction", stat_json(stat_of(l_win))},
               {"steps", stat_json(stat_of(steps))}};
    if (!game.halving)
        stats["ruin_probability"] = ruin::ruin_probability(game.x0, game.stake);
    return stats;
}

json run_diffusion(const ExperimentConfig& cfg, std::vector<Series>& series) {
    int n_cells = static_cast<int>(cfg.integer("n_cells"));
    ruin::DensityProfile rho(n_cells, cfg.number("lambda"),
                             static_cast<int>(cfg.integer("r")), cfg.number("x0"));
    double t_end = cfg.number("t_end");
    double dt = cfg.number_or("dt", 0.8 * rho.stable_dt_bound());
    long checkpoints = cfg.integer_or("checkpoints", 10);

    Series mom{"moments",
               {"t", "mass", "mean_x", "x_one_minus_x", "boundary_mass_0", "boundary_mass_1",
                "band_mass_quarter"},
               {}};
    auto record = [&](const ruin::DensityProfile& p) {
        mom.row({fmt(p.time()), fmt(p.total_mass()), fmt(p.mean_x()),
                 fmt(p.moment_x_one_minus_x()), fmt(p.boundary_mass_at_zero()),
                 fmt(p.boundary_mass_at_one()), fmt(p.band_mass(0.25))});
    };
    record(rho);
    for (long k = 1; k <= checkpoints; ++k) {
        double target = t_end * static_cast<double>(k) / static_cast<double>(checkpoints);
        rho = ruin::evolve_diffusion(rho, dt, target - rho.time());
        record(rho);
    }
    series.push_back(std::move(mom));

    Series prof{"profile", {"x", "mass"}, {}};
    for (int k = 0; k <= rho.n_x(); ++k)
        prof.row({fmt(rho.node(k)), fmt(rho.masses()[static_cast<std::size_t>(k)])});
    series.push_back(std::move(prof));

    return json{{"final_mass", rho.total_mass()},
                {"final_mean_x", rho.mean_x()},
                {"final_x_one_minus_x", rho.moment_x_one_minus_x()},
                {"boundary_mass_0", rho.boundary_mass_at_zero()},
                {"boundary_mass_1", rho.boundary_mass_at_one()}};
}

json run_grw(const ExperimentConfig& cfg, std::vector<Series>& series) {
    grw::GrwParams params{cfg.number("a"), cfg.number("lambda")};
    grw::PointerModel pointer;
    pointer.n = cfg.integer("n");
    pointer.branch_separation = cfg.number("branch_separation");
    pointer.weight_left = cfg.number("weight_left");
    pointer.weight_right = 1.0 - pointer.weight_left;
    long m = cfg.integer("trajectories");

    std::vector<grw::PointerOutcome> out(static_cast<std::size_t>(m));
    parallel_for(m, [&](long i) {
        RngStream rng(cfg.seed, static_cast<std::uint64_t>(i));
        out[static_cast<std::size_t>(i)] = grw::simulate_pointer(pointer, params, rng);
    });

    Series o{"outcomes",
             {"run", "collapse_time", "outcome", "log_weight_winner", "log_weight_loser"},
             {}};
    std::vector<double> times, left;
    double min_tail = 0.0;
    for (long i = 0; i < m; ++i) {
        const auto& r = out[static_cast<std::size_t>(i)];
        o.row({std::to_string(i), fmt(r.collapse_time),
               r.outcome == grw::Branch::Left ? "L" : "R", fmt(r.log_weight_winner),
               fmt(r.log_weight_loser)});
        times.push_back(r.collapse_time);
        left.push_back(r.outcome == grw::Branch::Left ? 1.0 : 0.0);
        min_tail = std::min(min_tail, r.log_weight_loser);
    }
    series.push_back(std::move(o));

    return json{{"collapse_time", stat_json(stat_of(times))},
                {"expected_mean_collapse_time",
                 1.0 / (params.lambda * static_cast<double>(pointer.n))},
                {"left_fraction", stat_json(stat_of(left))},
                {"min_log_tail_weight", min_tail}};
}

json run_csl(const ExperimentConfig& cfg, std::vector<Series>& series) {
    csl::TwoStateCslParams p;
    p.lambda = cfg.number("lambda");
    p.a_l = cfg.number("a_l");
    p.a_r = cfg.number("a_r");
    double x0 = cfg.number("x0");
    double t_end = cfg.number("t_end");
    double dt = cfg.number_or("dt", p.max_dt());
    long m = cfg.integer("trajectories");
    long checkpoints = cfg.integer_or("checkpoints", 10);
    bool cooked = cfg.text_or("mode", "cooked") == "cooked";

    int n_steps = static_cast<int>(std::ceil(t_end / dt - 1e-12));
    int stride = std::max(1, static_cast<int>(n_steps / checkpoints));
    TwoStateVector c0 = TwoStateVector::from_weights(x0);

    // per-trajectory recordings, merged by index
    std::vector<std::vector<double>> xs(static_cast<std::size_t>(m));
    std::vector<std::vector<double>> cohs(static_cast<std::size_t>(m));
    std::vector<std::vector<double>> margins(static_cast<std::size_t>(m));
    std::vector<double> final_x(static_cast<std::size_t>(m));
    std::vector<double> log_norms(static_cast<std::size_t>(m));
    std::vector<double> times;

    parallel_for(m, [&](long i) {
        RngStream rng(cfg.seed, static_cast<std::uint64_t>(i));
        csl::TwoStateTrajectory traj;
        if (cooked) {
            traj = csl::evolve_two_state_cooked(c0, p, dt, t_end, rng, stride);
        } else {
            ScalarNoiseSpec spec{t_end / n_steps, n_steps, p.lambda};
            ScalarNoise raw = ScalarNoise::sample(spec, rng);
            traj = csl::evolve_two_state_linear(c0, p, raw, stride);
        }
        auto& x = xs[static_cast<std::size_t>(i)];
        auto& co = cohs[static_cast<std::size_t>(i)];
        auto& mg = margins[static_cast<std::size_t>(i)];
        for (const auto& st : traj.states) {
            x.push_back(st.branch_fraction());
            co.push_back(st.coherence().real());
            mg.push_back(std::min(st.log_x(), st.log_one_minus_x()));
        }
        final_x[static_cast<std::size_t>(i)] = traj.final_state().branch_fraction();
        log_norms[static_cast<std::size_t>(i)] = traj.final_log_norm();
        if (i == 0) times = traj.times;
    });

    std::size_t nt = times.size();
    Series s{"series",
             {"t", "mean_x", "se_x", "mean_x_one_minus_x", "mean_coherence", "min_log_margin"},
             {}};
    for (std::size_t k = 0; k < nt; ++k) {
        std::vector<double> xk, mk;
        double coh = 0.0, min_margin = 0.0;
        bool first = true;
        for (long i = 0; i < m; ++i) {
            double x = xs[static_cast<std::size_t>(i)][k];
            xk.push_back(x);
            mk.push_back(x * (1.0 - x));
            coh += cohs[static_cast<std::size_t>(i)][k];
            double mg = margins[static_cast<std::size_t>(i)][k];
            min_margin = first ? mg : std::min(min_margin, mg);
            first = false;
        }
        Stat sx = stat_of(xk);
        s.row({fmt(times[k]), fmt(sx.mean), fmt(sx.stderr_), fmt(stat_of(mk).mean),
               fmt(coh / static_cast<double>(m)), fmt(min_margin)});
    }
    series.push_back(std::move(s));

    Series fx{"final_x", {"trajectory", "final_x", "log_norm"}, {}};
    std::vector<double> born;
    double mean_weight = 0.0;
    for (long i = 0; i < m; ++i) {
        fx.row({std::to_string(i), fmt(final_x[static_cast<std::size_t>(i)]),
                fmt(log_norms[static_cast<std::size_t>(i)])});
        born.push_back(final_x[static_cast<std::size_t>(i)] > 0.5 ? 1.0 : 0.0);
        mean_weight += std::exp(log_norms[static_cast<std::size_t>(i)]);
    }
    series.push_back(std::move(fx));

    json stats{{"born_fraction_left", stat_json(stat_of(born))},
               {"gamma", p.gamma()},
               {"mode", cooked ? "cooked" : "linear"}};
    if (!cooked) stats["mean_weight"] = mean_weight / static_cast<double>(m);
    return stats;
}

json run_stuff(const ExperimentConfig& cfg, std::vector<Series>& series) {
    int n_cells = static_cast<int>(cfg.integer("n_cells"));
    Grid1D grid = Grid1D::over(cfg.number("x_min"), cfg.number("x_max"), n_cells);
    double eps = cfg.number("epsilon");
    reality::Region v = reality::Region::from_interval(grid, cfg.number("v_lo"), cfg.number("v_hi"));

    WaveFunction psi = [&] {
        if (cfg.text_or("sector", "one") == "one") {
            double wl = cfg.number("weight_left");
            return WaveFunction::packet_pair(grid, cfg.number("center_left"),
                                             cfg.number("center_right"), cfg.number("width"),
                                             wl, 1.0 - wl);
        }
        WaveFunction in = WaveFunction::gaussian_packet(grid, cfg.number("center_in"),
                                                        cfg.number("width"));
        WaveFunction out_p = WaveFunction::gaussian_packet(grid, cfg.number("center_out"),
                                                           cfg.number("width"));
        return WaveFunction::symmetrized_product(in, out_p);
    }();

    reality::StuffReport rep = reality::make_stuff_report(psi, v, eps);
    Series s{"stuff", {"n", "value", "objective"}, {}};
    for (std::size_t n = 0; n < rep.values.size(); ++n)
        s.row({std::to_string(n), fmt(rep.values[n]),
               rep.values[n] >= 1.0 - eps ? "1" : "0"});
    series.push_back(std::move(s));

    json stats{{"epsilon", eps}, {"values", rep.values}};
    if (rep.objective_n)
        stats["objective_n"] = *rep.objective_n;
    else
        stats["objective_n"] = nullptr;
    if (cfg.params.count("hydrogen_r_cm"))
        stats["hydrogen_log10_p_out"] = reality::hydrogen_stuff_bound(cfg.number("hydrogen_r_cm"));
    return stats;
}

json run_flow(const ExperimentConfig& cfg, std::vector<Series>& series) {
    int n_cells = static_cast<int>(cfg.integer("n_cells"));
    Grid1D grid = Grid1D::over(cfg.number("x_min"), cfg.number("x_max"), n_cells);
    csl::Csl1dParams params{cfg.number("a"), cfg.number("lambda")};
    reality::Region v = reality::Region::from_interval(grid, cfg.number("v_lo"), cfg.number("v_hi"));

    WaveFunction in = WaveFunction::gaussian_packet(grid, cfg.number("center_in"), cfg.number("width"));
    WaveFunction out_p = WaveFunction::gaussian_packet(grid, cfg.number("center_out"), cfg.number("width"));
    WaveFunction psi0 = WaveFunction::symmetrized_product(in, out_p);

    double dt = cfg.number("dt");
    double t_end = cfg.number("t_end");
    int n_steps = static_cast<int>(std::round(t_end / dt));
    RngStream rng(cfg.seed, 0);
    NoiseField noise = NoiseField::sample({grid, dt, n_steps, params.lambda}, rng);

    reality::FlowReport rep = reality::flow_balance(psi0, v, params, noise, t_end);

    Series s{"flow", {"t", "stuff", "source_mid", "dstuff_dt", "residual"}, {}};
    for (std::size_t k = 0; k + 1 < rep.times.size(); ++k) {
        double dpdt = (rep.stuff_series[k + 1] - rep.stuff_series[k]) / rep.dt;
        s.row({fmt(rep.times[k + 1]), fmt(rep.stuff_series[k + 1]), fmt(rep.source_series[k]),
               fmt(dpdt), fmt(rep.residual_series[k])});
    }
    series.push_back(std::move(s));

    return json{{"residual_max", rep.residual},
                {"source_at_t0", rep.source_at_t0},
                {"stuff_initial", rep.stuff_series.front()},
                {"stuff_final", rep.stuff_series.back()},
                {"dt", rep.dt}};
}

} // namespace

int worker_count() {
    int cap = env_thread_cap();
    if (cap == 0) return 1;
    unsigned hw = std::thread::hardware_concurrency();
    int workers = static_cast<int>(hw ? hw : 1);
    workers = std::min(workers, 8);
    if (cap > 0) workers = std::min(workers, cap);
    return std::max(1, workers);
}

RunReport run_experiment(const ExperimentConfig& config) {
    std::vector<std::string> diags = validate_config(config);
    if (!diags.empty()) {
        std::string msg = "invalid config:";
        for (const auto& d : diags) msg += "\n  " + d;
        throw ConfigError(msg);
    }

    auto t0 = std::chrono::steady_clock::now();
    std::vector<Series> series;
    json stats;
    if (config.experiment == "ruin") stats = run_ruin(config, series);
    else if (config.experiment == "diffusion") stats = run_diffusion(config, series);
    else if (config.experiment == "grw") stats = run_grw(config, series);
    else if (config.experiment == "csl") stats = run_csl(config, series);
    else if (config.experiment == "stuff") stats = run_stuff(config, series);
    else if (config.experiment == "flow") stats = run_flow(config, series);
    else throw ConfigError("unknown experiment: " + config.experiment);

    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    if (ec) throw IoError("cannot create out_dir: " + config.out_dir);

    RunReport rep;
    rep.config = config;
    for (const auto& s : series)
        rep.series_files.push_back(write_series(s, config.out_dir, config.format));

    auto t1 = std::chrono::steady_clock::now();
    rep.wall_time_seconds = std::chrono::duration<double>(t1 - t0).count();

    json j;
    j["experiment"] = config.experiment;
    j["seed"] = config.seed;
    j["format"] = config.format;
    json params = json::object();
    for (const auto& [k, v] : config.params) params[k] = v;
    j["params"] = params;
    j["statistics"] = stats;
    j["series_files"] = rep.series_files;
    j["wall_time_seconds"] = rep.wall_time_seconds;

    fs::path rp = fs::path(config.out_dir) / "report.json";
    std::ofstream out(rp);
    if (!out) throw IoError("cannot write " + rp.string());
    out << j.dump(2) << "\n";
    rep.report_file = "report.json";
    return rep;
}

} // namespace cli
} // namespace collapsim
