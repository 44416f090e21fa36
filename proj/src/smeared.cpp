#include "collapsim/smeared.hpp"

#include <algorithm>
#include <cmath>

namespace collapsim {
namespace csl {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

SmearedOperator::SmearedOperator(const Grid1D& grid, double a) : grid_(grid), a_(a) {
    if (a <= 0.0) throw NumericalError("SmearedOperator: a must be positive");
    if (grid.dx > a / 4.0 + 1e-15)
        throw GridTooCoarse("SmearedOperator: need dx <= a/4");

    band_ = std::min(grid.n_cells - 1, static_cast<int>(std::ceil(7.0 * a / grid.dx)));
    double pref = std::pow(kPi * a * a, -0.25);
    kernel_.resize(static_cast<std::size_t>(band_) + 1);
    for (std::size_t k = 0; k < kernel_.size(); ++k) {
        double u = static_cast<double>(k) * grid.dx;
        kernel_[k] = pref * std::exp(-u * u / (2.0 * a * a));
    }

    counterterm_.assign(static_cast<std::size_t>(grid.n_cells), 0.0);
    for (int i = 0; i < grid.n_cells; ++i) {
        double s = 0.0;
        int lo = std::max(0, i - band_), hi = std::min(grid.n_cells - 1, i + band_);
        for (int j = lo; j <= hi; ++j) {
            double g = weight(i, j);
            s += g * g;
        }
        counterterm_[static_cast<std::size_t>(i)] = s * grid.dx;
    }
}

std::vector<double> SmearedOperator::pair_overlap_matrix() const {
    std::size_t n = static_cast<std::size_t>(grid_.n_cells);
    std::vector<double> phi(n * n, 0.0);
    for (int i = 0; i < grid_.n_cells; ++i) {
        for (int j = 0; j <= i; ++j) {
            if (i - j > 2 * band_) continue; // supports cannot overlap
            int lo = std::max(0, i - band_), hi = std::min(grid_.n_cells - 1, j + band_);
            double s = 0.0;
            for (int z = lo; z <= hi; ++z) s += weight(i, z) * weight(j, z);
            s *= grid_.dx;
            phi[static_cast<std::size_t>(i) * n + j] = s;
            phi[static_cast<std::size_t>(j) * n + i] = s;
        }
    }
    return phi;
}

std::vector<double> SmearedOperator::expectation(const WaveFunction& psi) const {
    if (psi.sector() != Sector::OneParticle)
        throw BadSector("SmearedOperator::expectation: one-particle states only");
    std::vector<double> ev(static_cast<std::size_t>(grid_.n_cells), 0.0);
    for (int j = 0; j < grid_.n_cells; ++j) {
        double s = 0.0;
        int lo = std::max(0, j - band_), hi = std::min(grid_.n_cells - 1, j + band_);
        for (int i = lo; i <= hi; ++i) s += weight(i, j) * std::norm(psi.at(i));
        ev[static_cast<std::size_t>(j)] = s * grid_.dx;
    }
    return ev;
}

double SmearedOperator::eigenvalue_spread_squared(const WaveFunction& psi1,
                                                  const WaveFunction& psi2) const {
    std::vector<double> e1 = expectation(psi1);
    std::vector<double> e2 = expectation(psi2);
    double s = 0.0;
    for (std::size_t j = 0; j < e1.size(); ++j) {
        double d = e1[j] - e2[j];
        s += d * d;
    }
    return s * grid_.dx;
}

} // namespace csl
} // namespace collapsim
