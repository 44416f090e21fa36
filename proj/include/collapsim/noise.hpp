#pragma once

#include "collapsim/grid.hpp"
#include "collapsim/rng.hpp"

#include <vector>

namespace collapsim {

// Discretized classical field w(x,t): independent Gaussians per cell and
// step. The raw law has mean zero and variance lambda/(dx dt), the cell-level
// transcription of white-noise covariance lambda delta(x-x') delta(t-t').
struct NoiseSpec {
    Grid1D grid;
    double dt = 0.0;
    int n_steps = 0;
    double lambda = 0.0;

    double variance_per_cell() const { return lambda / (grid.dx * dt); }
};

class NoiseField {
public:
    // drift, when given, is a per-cell mean held constant across steps
    // (the cooked law with a frozen expectation; per-step adaptive drift is
    // handled inside the csl integrators).
    static NoiseField sample(const NoiseSpec& spec, RngStream& rng,
                             const std::vector<double>* drift = nullptr);
    // Average step pairs into a realization at 2 dt (step-halving studies).
    NoiseField coarsened() const;

    const NoiseSpec& spec() const { return spec_; }
    double value(int step, int cell) const {
        return values_[static_cast<std::size_t>(step) * spec_.grid.n_cells + cell];
    }
    const std::vector<double>& values() const { return values_; }

private:
    NoiseField(NoiseSpec spec, std::vector<double> values)
        : spec_(spec), values_(std::move(values)) {}
    NoiseSpec spec_;
    std::vector<double> values_; // immutable realization
};

// Scalar channel (two-state systems): variance lambda/dt per step.
struct ScalarNoiseSpec {
    double dt = 0.0;
    int n_steps = 0;
    double lambda = 0.0;

    double variance() const { return lambda / dt; }
};

class ScalarNoise {
public:
    static ScalarNoise sample(const ScalarNoiseSpec& spec, RngStream& rng,
                              double drift = 0.0);
    // Coarsen a realization by averaging pairs of steps; the result is a
    // valid realization at 2 dt (used for step-halving convergence studies).
    ScalarNoise coarsened() const;

    const ScalarNoiseSpec& spec() const { return spec_; }
    double value(int step) const { return values_[static_cast<std::size_t>(step)]; }
    const std::vector<double>& values() const { return values_; }

private:
    ScalarNoise(ScalarNoiseSpec spec, std::vector<double> values)
        : values_(std::move(values)), spec_(spec) {}
    std::vector<double> values_;
    ScalarNoiseSpec spec_;
};

} // namespace collapsim
