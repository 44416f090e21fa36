#include "collapsim/noise.hpp"

#include <cmath>

namespace collapsim {

NoiseField NoiseField::sample(const NoiseSpec& spec, RngStream& rng,
                              const std::vector<double>* drift) {
    if (spec.dt <= 0.0) throw NumericalError("NoiseField: dt must be positive");
    if (drift && static_cast<int>(drift->size()) != spec.grid.n_cells)
        throw NumericalError("NoiseField: drift size mismatch");
    double sigma = std::sqrt(spec.variance_per_cell());
    std::vector<double> v(static_cast<std::size_t>(spec.n_steps) * spec.grid.n_cells);
    std::size_t k = 0;
    for (int s = 0; s < spec.n_steps; ++s)
        for (int c = 0; c < spec.grid.n_cells; ++c, ++k)
            v[k] = (drift ? (*drift)[c] : 0.0) + sigma * rng.normal();
    return NoiseField(spec, std::move(v));
}

ScalarNoise ScalarNoise::sample(const ScalarNoiseSpec& spec, RngStream& rng,
                                double drift) {
    if (spec.dt <= 0.0) throw NumericalError("ScalarNoise: dt must be positive");
    double sigma = std::sqrt(spec.variance());
    std::vector<double> v(static_cast<std::size_t>(spec.n_steps));
    for (auto& x : v) x = drift + sigma * rng.normal();
    return ScalarNoise(spec, std::move(v));
}

ScalarNoise ScalarNoise::coarsened() const {
    if (spec_.n_steps % 2 != 0)
        throw NumericalError("ScalarNoise::coarsened: need an even step count");
    ScalarNoiseSpec cs{spec_.dt * 2.0, spec_.n_steps / 2, spec_.lambda};
    std::vector<double> v(static_cast<std::size_t>(cs.n_steps));
    for (int s = 0; s < cs.n_steps; ++s)
        v[static_cast<std::size_t>(s)] = 0.5 * (value(2 * s) + value(2 * s + 1));
    return ScalarNoise(cs, std::move(v));
}

NoiseField NoiseField::coarsened() const {
    if (spec_.n_steps % 2 != 0)
        throw NumericalError("NoiseField::coarsened: need an even step count");
    NoiseSpec cs{spec_.grid, spec_.dt * 2.0, spec_.n_steps / 2, spec_.lambda};
    std::vector<double> v(static_cast<std::size_t>(cs.n_steps) * cs.grid.n_cells);
    for (int s = 0; s < cs.n_steps; ++s)
        for (int c = 0; c < cs.grid.n_cells; ++c)
            v[static_cast<std::size_t>(s) * cs.grid.n_cells + c] =
                0.5 * (value(2 * s, c) + value(2 * s + 1, c));
    return NoiseField(cs, std::move(v));
}

} // namespace collapsim
