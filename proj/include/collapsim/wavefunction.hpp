#pragma once

#include "collapsim/grid.hpp"

#include <complex>
#include <vector>

namespace collapsim {

enum class Sector { OneParticle, TwoParticle };

// Complex amplitudes on a uniform grid; one-particle psi(x_i) or symmetric
// two-particle psi(x_i, x_j) stored row-major. The squared norm is
// sum |psi|^2 dx^d with d the sector dimension.
class WaveFunction {
public:
    WaveFunction(Grid1D grid, Sector sector);

    const Grid1D& grid() const { return grid_; }
    Sector sector() const { return sector_; }
    int n_particles() const { return sector_ == Sector::OneParticle ? 1 : 2; }

    std::complex<double>& at(int i) { return amp_[static_cast<std::size_t>(i)]; }
    std::complex<double> at(int i) const { return amp_[static_cast<std::size_t>(i)]; }
    std::complex<double>& at(int i, int j);
    std::complex<double> at(int i, int j) const;

    const std::vector<std::complex<double>>& amplitudes() const { return amp_; }
    std::vector<std::complex<double>>& amplitudes() { return amp_; }

    double measure() const; // dx^d
    double norm_squared() const;
    void normalize();       // throws ZeroNorm if the squared norm underflows

    // Normalized Gaussian packet exp(-(x-center)^2 / 4 width^2), i.e. |psi|^2
    // has standard deviation `width`.
    static WaveFunction gaussian_packet(const Grid1D& grid, double center, double width);

    // Two packets with post-normalization probability weights (w_left, w_right).
    static WaveFunction packet_pair(const Grid1D& grid, double center_left,
                                    double center_right, double width,
                                    double weight_left, double weight_right);

    // Symmetrized two-particle product (phi1(x1) phi2(x2) + phi2(x1) phi1(x2)) / sqrt(2),
    // normalized. phi1, phi2 must share the grid.
    static WaveFunction symmetrized_product(const WaveFunction& phi1,
                                            const WaveFunction& phi2);

private:
    Grid1D grid_;
    Sector sector_;
    std::vector<std::complex<double>> amp_;
};

// Pure-function form: returns a normalized copy.
WaveFunction normalized(const WaveFunction& psi);

// |<a|b>|^2 for normalized a, b on the same grid/sector.
double fidelity(const WaveFunction& a, const WaveFunction& b);

// One-particle probability weight on [x_lo, x_hi).
double interval_weight(const WaveFunction& psi, double x_lo, double x_hi);

} // namespace collapsim
