#pragma once

#include "collapsim/rng.hpp"
#include "collapsim/wavefunction.hpp"

#include <optional>
#include <vector>

namespace collapsim {
namespace grw {

struct GrwParams {
    double a = 1.0;      // localization width
    double lambda = 1.0; // hit rate per particle

    void validate() const {
        if (a <= 0.0 || lambda <= 0.0)
            throw NumericalError("GrwParams: a and lambda must be positive");
    }
};

struct HitEvent {
    double time = 0.0;
    double center = 0.0;
};

struct HitResult {
    WaveFunction psi;    // renormalized post-hit state
    double norm_squared; // N^2 before renormalization
};

// Multiplies psi by the hit kernel (pi a^2)^{-1/4} exp(-(x-center)^2 / 2a^2)
// and renormalizes. With this prefactor the pre-normalization N^2(center)
// integrates to 1 over centers for any normalized psi, which is what makes
// the lambda N^2 dx dt rule a total rate of exactly lambda.
HitResult apply_hit(const WaveFunction& psi, double center, const GrwParams& params);

// Post-hit log magnitudes computed without leaving log space: a strictly
// positive amplitude can never come out as exactly zero (the tail persists
// even when exp would underflow).
std::vector<double> hit_log_magnitudes(const WaveFunction& psi, double center,
                                       const GrwParams& params);

// Centers range over the simulation grid extended by 5a on each side.
Grid1D extended_center_grid(const Grid1D& grid, const GrwParams& params);

// N^2(c) per center cell of extended_center_grid (a probability density in c).
std::vector<double> center_density(const WaveFunction& psi, const GrwParams& params);

// Draws a hit center from N^2(c): inverse CDF over the center cells, uniform
// placement within the chosen cell. The second form reuses a precomputed
// density for repeated draws from a static state.
double sample_center(const WaveFunction& psi, const GrwParams& params, RngStream& rng);
double sample_center(const std::vector<double>& density, const Grid1D& center_grid,
                     RngStream& rng);

// One time step of the hit process: with probability lambda dt (times the
// discretized integral of N^2, = 1 up to quadrature error) a hit occurs, its
// center drawn from N^2(c) by inverse CDF. Requires lambda dt <= 1e-2.
std::optional<HitEvent> sample_hit(const WaveFunction& psi, const GrwParams& params,
                                   double dt, double t_now, RngStream& rng);

struct PointerModel {
    long n = 1;                     // particles in the pointer
    double branch_separation = 0.0; // >= 10 a
    double weight_left = 0.5;
    double weight_right = 0.5;

    void validate(const GrwParams& params) const;
};

enum class Branch { Left, Right };

struct PointerOutcome {
    double collapse_time = 0.0;
    Branch outcome = Branch::Left;
    double log_weight_winner = 0.0; // post-hit branch weights, log scale
    double log_weight_loser = 0.0;  // the tail: finite, never -inf
};

// n independent Poisson hit channels: the first hit arrives at an
// Exponential(lambda n) time and collapses the collective two-branch
// coordinate through apply_hit; the surviving branch follows the Born
// weights, with the other branch left as a tail.
PointerOutcome simulate_pointer(const PointerModel& pointer, const GrwParams& params,
                                RngStream& rng);

} // namespace grw
} // namespace collapsim
