#pragma once

#include "collapsim/grid.hpp"
#include "collapsim/wavefunction.hpp"

#include <cstdlib>
#include <vector>

namespace collapsim {
namespace csl {

// Discretized smeared number operator: for each center z the position-diagonal
// weights g(x - z) = (pi a^2)^{-1/4} exp(-(x-z)^2 / 2a^2). The kernel's square
// integrates to exactly 1, which is what turns the counterterm of the linear
// evolution into a plain -lambda.
class SmearedOperator {
public:
    SmearedOperator(const Grid1D& grid, double a);

    const Grid1D& grid() const { return grid_; }
    double a() const { return a_; }

    // Cells farther apart than the band carry weight exactly zero; the
    // truncated kernel IS the discretized operator, so every identity built
    // from it (counterterms, expectations, overlaps) is exact. The cut at
    // 7a keeps the discarded tail below e^{-24} of the peak.
    int band() const { return band_; }

    // g(x_i - z_j); i indexes particle cells, j noise cells (same grid).
    double weight(int i, int j) const {
        int d = std::abs(i - j);
        return d <= band_ ? kernel_[static_cast<std::size_t>(d)] : 0.0;
    }

    // S_i = sum_j g(x_i - z_j)^2 dz, the discrete counterterm (= 1 up to
    // edge truncation). Using exactly these sums in the integrators makes
    // the norm martingale identity hold discretely.
    double counterterm(int i) const { return counterterm_[static_cast<std::size_t>(i)]; }

    // Phi_ij = sum_z g(z - x_i) g(z - x_j) dz as an n x n row-major matrix
    // (= exp(-(x_i-x_j)^2/4a^2) up to edge truncation). Exact discrete sums,
    // so identities built from them hold to roundoff.
    std::vector<double> pair_overlap_matrix() const;

    // <A(z_j)> for a normalized one-particle state.
    std::vector<double> expectation(const WaveFunction& psi) const;

    // Collapse-driving spread between two normalized one-particle states:
    // sum_z [<A(z)>_1 - <A(z)>_2]^2 dz. For well separated packets this is
    // 2 (1 - e^{-l^2/4a^2}), the effective (a_L - a_R)^2 of the two-state
    // reduction.
    double eigenvalue_spread_squared(const WaveFunction& psi1,
                                     const WaveFunction& psi2) const;

private:
    Grid1D grid_;
    double a_;
    int band_;
    std::vector<double> kernel_;      // g by |i-j| up to band
    std::vector<double> counterterm_; // per cell
};

} // namespace csl
} // namespace collapsim
