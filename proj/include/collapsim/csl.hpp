#pragma once

#include "collapsim/noise.hpp"
#include "collapsim/rng.hpp"
#include "collapsim/ruin.hpp"
#include "collapsim/smeared.hpp"
#include "collapsim/two_state.hpp"
#include "collapsim/wavefunction.hpp"

#include <vector>

namespace collapsim {
namespace csl {

// Two-state abstraction: collapse driven by an operator with eigenvalues
// a_L, a_R on the two branches. The coherence decay rate is
// Gamma = (lambda/2) (a_L - a_R)^2; the default normalization
// (a_L - a_R)^2 = 2 makes Gamma = lambda.
struct TwoStateCslParams {
    double lambda = 1.0;
    double a_l = 1.0 / 1.4142135623730951;  // +1/sqrt(2)
    double a_r = -1.0 / 1.4142135623730951; // -1/sqrt(2)

    double gamma() const {
        double d = a_l - a_r;
        return 0.5 * lambda * d * d;
    }
    // Stability/accuracy gate used by the integrators.
    double max_dt() const {
        double d = a_l - a_r;
        return 1e-2 / (lambda * d * d);
    }
    void validate() const {
        if (lambda <= 0.0) throw NumericalError("TwoStateCslParams: lambda must be positive");
        if (a_l == a_r) throw NumericalError("TwoStateCslParams: a_L must differ from a_R");
    }
};

// One trajectory of the two-state evolution, recorded every `stride` steps
// (t = 0 and t_end always included). States are stored normalized;
// log_norm[k] is the cumulative log squared norm the linear evolution would
// have accumulated (the importance weight against the raw noise law);
// noise[s] is the per-step realization the trajectory evolved under.
struct TwoStateTrajectory {
    std::vector<double> times;
    std::vector<TwoStateVector> states;
    std::vector<double> log_norm;
    std::vector<double> noise;

    const TwoStateVector& final_state() const { return states.back(); }
    double final_log_norm() const { return log_norm.back(); }
};

// Cooked mode: per step the scalar noise is drawn from
// Gaussian(mean 2 lambda <A>, variance lambda/dt), <A> = x a_L + (1-x) a_R
// from the current state; then both branches take the exact exponential
// update and the state is renormalized. Throws StepTooLarge.
TwoStateTrajectory evolve_two_state_cooked(const TwoStateVector& c0,
                                           const TwoStateCslParams& p, double dt,
                                           double t_end, RngStream& rng, int stride = 1);

// Linear mode: the supplied realization drives the same exponential update;
// log_norm tracks the pre-normalization squared norm so that
// E_raw[exp(log_norm)] = 1 exactly (total probability conservation).
TwoStateTrajectory evolve_two_state_linear(const TwoStateVector& c0,
                                           const TwoStateCslParams& p,
                                           const ScalarNoise& noise, int stride = 1);

// --- 1-D one-particle CSL ---

struct Csl1dParams {
    double a = 1.0;
    double lambda = 1.0;

    void validate() const {
        if (a <= 0.0 || lambda <= 0.0)
            throw NumericalError("Csl1dParams: a and lambda must be positive");
    }
};

struct Csl1dTrajectory {
    std::vector<double> times;
    std::vector<WaveFunction> states; // normalized, at recorded times
    std::vector<double> log_norm;
    // Probability weight left of the grid midpoint at each recorded time,
    // with its log kept alongside so tails stay assertable.
    std::vector<double> left_weight;
    std::vector<double> log_left_weight;
    std::vector<double> log_right_weight;
};

// Field evolution of Eq-type d psi = [smeared noise - counterterm] psi dt on
// the grid; exact exponential (geometric) update per step given the noise,
// which is the Stratonovich-consistent map and keeps every amplitude
// strictly positive. Cooked mode samples the per-cell noise with drift
// 2 lambda <A(z)>, Heun-style: the drift is evaluated at the midpoint state
// of a predictor step. Throws GridTooCoarse (dx > a/4) or StepTooLarge.
Csl1dTrajectory evolve_1d_cooked(const WaveFunction& psi0, const Csl1dParams& p,
                                 double dt, double t_end, RngStream& rng, int stride = 1);

Csl1dTrajectory evolve_1d_linear(const WaveFunction& psi0, const Csl1dParams& p,
                                 const NoiseField& noise, int stride = 1);

// --- mode equivalence and the ruin correspondence ---

struct ImportanceReport {
    int m = 0;
    double effective_sample_size = 0.0;
    double weighted_mean_x = 0.0, weighted_se_x = 0.0;
    double weighted_mean_x2 = 0.0, weighted_se_x2 = 0.0;
    double weighted_born_fraction = 0.0; // weighted P(x > 1/2)
    double cooked_mean_x = 0.0, cooked_se_x = 0.0;
    double cooked_mean_x2 = 0.0, cooked_se_x2 = 0.0;
    double cooked_born_fraction = 0.0;
    double mean_diff_in_se = 0.0;   // |mean difference| / combined SE
    double second_diff_in_se = 0.0; // same for the second moment
    double ks_statistic = 0.0;      // weighted vs cooked empirical CDFs
    double mean_weight = 0.0;       // raw average of exp(log_norm), -> 1
};

// Runs M linear trajectories under the raw zero-mean noise, weights each by
// exp(log_norm), and compares the weighted x(t_end) distribution against M
// cooked trajectories. Throws DegenerateWeights if the effective sample size
// drops below M/100.
ImportanceReport importance_check(double x0, const TwoStateCslParams& p, double dt,
                                  double t_end, int m, RngStream& rng);

struct CorrespondenceReport {
    std::vector<double> times;
    std::vector<double> sde_moment;     // E[x(1-x)] from the cooked ensemble
    std::vector<double> sde_se;
    std::vector<double> pde_moment;     // same moment from the r=2 solve
    std::vector<double> sde_mean_x;
    std::vector<double> min_log_margin; // min over trajectories of min(log x, log(1-x))
    double lambda_diff = 0.0;           // PDE coefficient used
};

// The branch weight x(t) of cooked two-state CSL is an Eq-(1.5)-type
// diffusion with r = 2. The drift/variance bookkeeping of the exponential
// update gives the x-process variance rate 4 lambda (a_L-a_R)^2 [x(1-x)]^2,
// i.e. PDE coefficient lambda_diff = 2 lambda (a_L-a_R)^2 = 4 Gamma.
double diffusion_coefficient(const TwoStateCslParams& p);

CorrespondenceReport diffusion_correspondence(const TwoStateCslParams& p, double x0,
                                              int m, const std::vector<double>& t_grid,
                                              RngStream& rng, int pde_cells = 400);

} // namespace csl
} // namespace collapsim
