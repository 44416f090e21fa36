#pragma once

#include "collapsim/rng.hpp"
#include "collapsim/errors.hpp"

#include <vector>

namespace collapsim {
namespace ruin {

enum class Winner { L, R, None }; // None only in the never-ending variant

struct GameConfig {
    double x0 = 0.5;     // L's opening fraction of the total money
    double stake = 0.01; // fraction transferred per toss
    bool halving = false;
    long max_steps = 100000; // cap for the halving variant

    void validate() const;
};

struct GameResult {
    Winner winner = Winner::None;
    long steps = 0;
    double final_x = 0.0;
    std::vector<double> trajectory; // x after each toss, up to trajectory_cap
};

// Fair-coin game; absorbs at x in {0,1} unless halving, in which case the
// stake is halved whenever it would swallow a player's remaining holdings
// ("down to his last dollar, they agree to play for 50 cents") and the game
// runs max_steps with x strictly inside (0,1).
GameResult play_game(const GameConfig& cfg, RngStream& rng, long trajectory_cap = 0);

// Exact solution of P(x) = (P(x-s) + P(x+s))/2 with P(0)=0, P(1)=1 on the
// stake lattice, solved as the tridiagonal absorbing-chain system.
// Throws NonIntegralState if x0 or 1 is off the lattice.
double ruin_probability(double x0, double stake);

// Ensemble density for the Eq-of-motion d rho/dt = lambda d^2/dx^2 [x(1-x)]^r rho.
//
// Masses are carried on the n_x+1 lattice points k/n_x including the endpoints.
// The endpoint coefficients [x(1-x)]^r vanish identically, so the end points
// are zero-flux accumulation cells: mass that jumps in stays, which makes the
// delta-function limit measurable. The interior update is the master equation
// of a symmetric jump chain, so total mass and the mean of x are conserved
// exactly (explicit Euler preserves linear invariants) and the density stays
// nonnegative for any stable step.
class DensityProfile {
public:
    DensityProfile(int n_x, double lambda, int r, double x0);

    int n_x() const { return n_x_; }
    double lambda() const { return lambda_; }
    int r() const { return r_; }
    double h() const { return 1.0 / n_x_; }
    double node(int k) const { return static_cast<double>(k) / n_x_; }
    const std::vector<double>& masses() const { return mass_; }
    double time() const { return time_; }

    // Density view rho_k = mass_k / (node weight); the endpoint nodes carry
    // the accumulated delta masses over half-width cells.
    std::vector<double> densities() const;

    double total_mass() const;
    double mean_x() const;
    double moment_x_one_minus_x() const;
    // Mass within `delta` of either endpoint (inclusive).
    double band_mass(double delta) const;
    double boundary_mass_at_zero() const { return mass_.front(); }
    double boundary_mass_at_one() const { return mass_.back(); }

    double stable_dt_bound() const; // h^2 / (2 lambda max D)

private:
    friend DensityProfile evolve_diffusion(const DensityProfile&, double, double);
    int n_x_;
    double lambda_;
    int r_;
    double time_ = 0.0;
    std::vector<double> mass_;
    std::vector<double> coeff_; // D(x_k) = [x_k(1-x_k)]^r
};

// Advances to time() + t_span with steps of at most dt (the span is divided
// evenly). Throws UnstableStep if dt exceeds the explicit-scheme bound.
DensityProfile evolve_diffusion(const DensityProfile& p, double dt, double t_span);

} // namespace ruin
} // namespace collapsim
