#include "collapsim/csl.hpp"

#include <algorithm>
#include <cmath>

namespace collapsim {
namespace csl {

namespace {

struct StepPlan {
    int n_steps;
    double dt;
};

StepPlan plan_steps(double dt, double t_end, double dt_max) {
    if (dt > dt_max * (1.0 + 1e-12))
        throw StepTooLarge("evolve_two_state: dt exceeds 1e-2 / (lambda (a_L-a_R)^2)");
    if (t_end <= 0.0) throw NumericalError("evolve_two_state: t_end must be positive");
    int n = static_cast<int>(std::ceil(t_end / dt - 1e-12));
    return {n, t_end / n};
}

// Exact exponential update of both branch magnitudes for one step of noise w:
// log|c_n| += a_n w dt - lambda a_n^2 dt. The quadratic counterterm makes
// E_raw[|c_n|^2] constant, so exp(log_norm) is the importance weight against
// the raw zero-mean law.
inline void linear_step(TwoStateVector& c, const TwoStateCslParams& p, double w, double dt) {
    c.log_mag_l += p.a_l * w * dt - p.lambda * p.a_l * p.a_l * dt;
    c.log_mag_r += p.a_r * w * dt - p.lambda * p.a_r * p.a_r * dt;
}

} // namespace

TwoStateTrajectory evolve_two_state_cooked(const TwoStateVector& c0,
                                           const TwoStateCslParams& p, double dt,
                                           double t_end, RngStream& rng, int stride) {
    p.validate();
    StepPlan plan = plan_steps(dt, t_end, p.max_dt());
    double sigma = std::sqrt(p.lambda / plan.dt);

    TwoStateTrajectory traj;
    TwoStateVector c = c0;
    c.renormalize();
    double log_norm = 0.0;
    traj.times.push_back(0.0);
    traj.states.push_back(c);
    traj.log_norm.push_back(log_norm);

    traj.noise.reserve(static_cast<std::size_t>(plan.n_steps));
    for (int s = 0; s < plan.n_steps; ++s) {
        double x = c.branch_fraction();
        double abar = x * p.a_l + (1.0 - x) * p.a_r;
        double w = rng.normal(2.0 * p.lambda * abar, sigma);
        traj.noise.push_back(w);
        linear_step(c, p, w, plan.dt);
        log_norm += c.renormalize();
        if ((s + 1) % stride == 0 || s + 1 == plan.n_steps) {
            traj.times.push_back((s + 1) * plan.dt);
            traj.states.push_back(c);
            traj.log_norm.push_back(log_norm);
        }
    }
    return traj;
}

TwoStateTrajectory evolve_two_state_linear(const TwoStateVector& c0,
                                           const TwoStateCslParams& p,
                                           const ScalarNoise& noise, int stride) {
    p.validate();
    double dt = noise.spec().dt;
    if (dt > p.max_dt() * (1.0 + 1e-12))
        throw StepTooLarge("evolve_two_state: dt exceeds 1e-2 / (lambda (a_L-a_R)^2)");

    TwoStateTrajectory traj;
    TwoStateVector c = c0;
    c.renormalize();
    double log_norm = 0.0;
    traj.times.push_back(0.0);
    traj.states.push_back(c);
    traj.log_norm.push_back(log_norm);

    traj.noise = noise.values();
    for (int s = 0; s < noise.spec().n_steps; ++s) {
        linear_step(c, p, noise.value(s), dt);
        log_norm += c.renormalize();
        if ((s + 1) % stride == 0 || s + 1 == noise.spec().n_steps) {
            traj.times.push_back((s + 1) * dt);
            traj.states.push_back(c);
            traj.log_norm.push_back(log_norm);
        }
    }
    return traj;
}

ImportanceReport importance_check(double x0, const TwoStateCslParams& p, double dt,
                                  double t_end, int m, RngStream& rng) {
    p.validate();
    if (m < 1000) throw NumericalError("importance_check: M must be >= 1000");
    StepPlan plan = plan_steps(dt, t_end, p.max_dt());

    std::vector<double> lin_x(static_cast<std::size_t>(m));
    std::vector<double> log_w(static_cast<std::size_t>(m));
    std::vector<double> cook_x(static_cast<std::size_t>(m));

    TwoStateVector c0 = TwoStateVector::from_weights(x0);
    ScalarNoiseSpec raw_spec{plan.dt, plan.n_steps, p.lambda};
    for (int i = 0; i < m; ++i) {
        RngStream sub(rng.seed(), rng.next_u64()); // child streams, still deterministic
        ScalarNoise raw = ScalarNoise::sample(raw_spec, sub);
        TwoStateTrajectory lin = evolve_two_state_linear(c0, p, raw, plan.n_steps);
        lin_x[static_cast<std::size_t>(i)] = lin.final_state().branch_fraction();
        log_w[static_cast<std::size_t>(i)] = lin.final_log_norm();

        TwoStateTrajectory cook = evolve_two_state_cooked(c0, p, plan.dt, t_end, sub, plan.n_steps);
        cook_x[static_cast<std::size_t>(i)] = cook.final_state().branch_fraction();
    }

    // Normalized weights; shift by the max log to avoid overflow.
    double max_lw = *std::max_element(log_w.begin(), log_w.end());
    std::vector<double> w(log_w.size());
    double sum_w = 0.0, sum_w2 = 0.0, sum_raw = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = std::exp(log_w[i] - max_lw);
        sum_w += w[i];
        sum_w2 += w[i] * w[i];
        sum_raw += std::exp(log_w[i]);
    }

    ImportanceReport rep;
    rep.m = m;
    rep.mean_weight = sum_raw / m;
    rep.effective_sample_size = sum_w * sum_w / sum_w2;
    if (rep.effective_sample_size < static_cast<double>(m) / 100.0)
        throw DegenerateWeights("importance_check: effective sample size below M/100");

    auto weighted_moment = [&](auto&& f, double& mean, double& se) {
        double s = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * f(lin_x[i]);
        mean = s / sum_w;
        double v = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            double d = f(lin_x[i]) - mean;
            v += w[i] * w[i] * d * d;
        }
        se = std::sqrt(v) / sum_w;
    };
    weighted_moment([](double x) { return x; }, rep.weighted_mean_x, rep.weighted_se_x);
    weighted_moment([](double x) { return x * x; }, rep.weighted_mean_x2, rep.weighted_se_x2);
    {
        double se_unused = 0.0;
        weighted_moment([](double x) { return x > 0.5 ? 1.0 : 0.0; },
                        rep.weighted_born_fraction, se_unused);
    }

    auto plain_moment = [&](auto&& f, double& mean, double& se) {
        double s = 0.0;
        for (double x : cook_x) s += f(x);
        mean = s / m;
        double v = 0.0;
        for (double x : cook_x) {
            double d = f(x) - mean;
            v += d * d;
        }
        se = std::sqrt(v / (static_cast<double>(m) - 1.0) / m);
    };
    plain_moment([](double x) { return x; }, rep.cooked_mean_x, rep.cooked_se_x);
    plain_moment([](double x) { return x * x; }, rep.cooked_mean_x2, rep.cooked_se_x2);
    {
        double se_unused = 0.0;
        plain_moment([](double x) { return x > 0.5 ? 1.0 : 0.0; }, rep.cooked_born_fraction,
                     se_unused);
    }

    rep.mean_diff_in_se = std::abs(rep.weighted_mean_x - rep.cooked_mean_x) /
                          std::sqrt(rep.weighted_se_x * rep.weighted_se_x +
                                    rep.cooked_se_x * rep.cooked_se_x);
    rep.second_diff_in_se = std::abs(rep.weighted_mean_x2 - rep.cooked_mean_x2) /
                            std::sqrt(rep.weighted_se_x2 * rep.weighted_se_x2 +
                                      rep.cooked_se_x2 * rep.cooked_se_x2);

    // Weighted two-sample Kolmogorov-Smirnov distance.
    std::vector<std::size_t> order(w.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return lin_x[a] < lin_x[b]; });
    std::vector<double> cs = cook_x;
    std::sort(cs.begin(), cs.end());
    double fw = 0.0, ks = 0.0;
    std::size_t j = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        double x = lin_x[order[k]];
        fw += w[order[k]] / sum_w;
        while (j < cs.size() && cs[j] <= x) ++j;
        ks = std::max(ks, std::abs(fw - static_cast<double>(j) / m));
    }
    rep.ks_statistic = ks;
    return rep;
}

double diffusion_coefficient(const TwoStateCslParams& p) {
    double d = p.a_l - p.a_r;
    return 2.0 * p.lambda * d * d; // = 4 Gamma
}

CorrespondenceReport diffusion_correspondence(const TwoStateCslParams& p, double x0,
                                              int m, const std::vector<double>& t_grid,
                                              RngStream& rng, int pde_cells) {
    p.validate();
    if (m < 10000) throw NumericalError("diffusion_correspondence: M must be >= 10^4");
    if (t_grid.empty()) throw NumericalError("diffusion_correspondence: empty time grid");

    CorrespondenceReport rep;
    rep.times = t_grid;
    rep.lambda_diff = diffusion_coefficient(p);

    double t_end = t_grid.back();
    double dt = p.max_dt();
    int n_steps = static_cast<int>(std::ceil(t_end / dt - 1e-12));
    dt = t_end / n_steps;
    std::vector<int> checkpoint_step(t_grid.size());
    for (std::size_t k = 0; k < t_grid.size(); ++k)
        checkpoint_step[k] = static_cast<int>(std::round(t_grid[k] / dt));

    std::size_t nt = t_grid.size();
    std::vector<double> sum_m(nt, 0.0), sum_m2(nt, 0.0), sum_x(nt, 0.0);
    std::vector<double> min_margin(nt, 0.0); // log scale, running min

    double sigma = std::sqrt(p.lambda / dt);
    bool first = true;
    for (int i = 0; i < m; ++i) {
        RngStream sub(rng.seed(), rng.next_u64());
        TwoStateVector c = TwoStateVector::from_weights(x0);
        std::size_t k = 0;
        for (int s = 0; s <= n_steps && k < nt; ++s) {
            if (s == checkpoint_step[k]) {
                double x = c.branch_fraction();
                double v = x * (1.0 - x);
                sum_m[k] += v;
                sum_m2[k] += v * v;
                sum_x[k] += x;
                double margin = std::min(c.log_x(), c.log_one_minus_x());
                if (first)
                    min_margin[k] = margin;
                else
                    min_margin[k] = std::min(min_margin[k], margin);
                ++k;
            }
            if (s == n_steps) break;
            double x = c.branch_fraction();
            double abar = x * p.a_l + (1.0 - x) * p.a_r;
            linear_step(c, p, sub.normal(2.0 * p.lambda * abar, sigma), dt);
            c.renormalize();
        }
        first = false;
    }

    for (std::size_t k = 0; k < nt; ++k) {
        double mean = sum_m[k] / m;
        rep.sde_moment.push_back(mean);
        rep.sde_se.push_back(std::sqrt(std::max(0.0, sum_m2[k] / m - mean * mean) / m));
        rep.sde_mean_x.push_back(sum_x[k] / m);
        rep.min_log_margin.push_back(min_margin[k]);
    }

    // r = 2 reference solve at the derived coefficient.
    ruin::DensityProfile rho(pde_cells, rep.lambda_diff, 2, x0);
    double prev_t = 0.0;
    for (double t : t_grid) {
        rho = ruin::evolve_diffusion(rho, 0.8 * rho.stable_dt_bound(), t - prev_t);
        rep.pde_moment.push_back(rho.moment_x_one_minus_x());
        prev_t = t;
    }
    return rep;
}

} // namespace csl
} // namespace collapsim
