#include "collapsim/wavefunction.hpp"

#include <cmath>

namespace collapsim {

WaveFunction::WaveFunction(Grid1D grid, Sector sector)
    : grid_(grid), sector_(sector) {
    std::size_t n = static_cast<std::size_t>(grid_.n_cells);
    amp_.assign(sector_ == Sector::OneParticle ? n : n * n, {0.0, 0.0});
}

std::complex<double>& WaveFunction::at(int i, int j) {
    if (sector_ != Sector::TwoParticle) throw BadSector("at(i,j) needs the two-particle sector");
    return amp_[static_cast<std::size_t>(i) * grid_.n_cells + j];
}

std::complex<double> WaveFunction::at(int i, int j) const {
    if (sector_ != Sector::TwoParticle) throw BadSector("at(i,j) needs the two-particle sector");
    return amp_[static_cast<std::size_t>(i) * grid_.n_cells + j];
}

double WaveFunction::measure() const {
    return sector_ == Sector::OneParticle ? grid_.dx : grid_.dx * grid_.dx;
}

double WaveFunction::norm_squared() const {
    double s = 0.0;
    for (const auto& a : amp_) s += std::norm(a);
    return s * measure();
}

void WaveFunction::normalize() {
    double n2 = norm_squared();
    if (n2 <= 0.0 || !std::isfinite(n2)) throw ZeroNorm("normalize: squared norm underflowed");
    double inv = 1.0 / std::sqrt(n2);
    for (auto& a : amp_) a *= inv;
}

WaveFunction WaveFunction::gaussian_packet(const Grid1D& grid, double center, double width) {
    WaveFunction psi(grid, Sector::OneParticle);
    for (int i = 0; i < grid.n_cells; ++i) {
        double u = (grid.center(i) - center) / (2.0 * width);
        psi.at(i) = std::exp(-u * u);
    }
    psi.normalize();
    return psi;
}

WaveFunction WaveFunction::packet_pair(const Grid1D& grid, double center_left,
                                       double center_right, double width,
                                       double weight_left, double weight_right) {
    WaveFunction left = gaussian_packet(grid, center_left, width);
    WaveFunction right = gaussian_packet(grid, center_right, width);
    WaveFunction psi(grid, Sector::OneParticle);
    double cl = std::sqrt(weight_left), cr = std::sqrt(weight_right);
    for (int i = 0; i < grid.n_cells; ++i)
        psi.at(i) = cl * left.at(i) + cr * right.at(i);
    psi.normalize();
    return psi;
}

WaveFunction WaveFunction::symmetrized_product(const WaveFunction& phi1,
                                               const WaveFunction& phi2) {
    if (phi1.grid() != phi2.grid()) throw NumericalError("symmetrized_product: grid mismatch");
    const Grid1D& g = phi1.grid();
    WaveFunction psi(g, Sector::TwoParticle);
    for (int i = 0; i < g.n_cells; ++i) {
        for (int j = 0; j <= i; ++j) {
            std::complex<double> v = phi1.at(i) * phi2.at(j) + phi2.at(i) * phi1.at(j);
            psi.at(i, j) = v;
            psi.at(j, i) = v; // symmetry exact by construction
        }
    }
    psi.normalize();
    return psi;
}

WaveFunction normalized(const WaveFunction& psi) {
    WaveFunction out = psi;
    out.normalize();
    return out;
}

double fidelity(const WaveFunction& a, const WaveFunction& b) {
    std::complex<double> ip{0.0, 0.0};
    const auto& av = a.amplitudes();
    const auto& bv = b.amplitudes();
    for (std::size_t k = 0; k < av.size(); ++k) ip += std::conj(av[k]) * bv[k];
    ip *= a.measure();
    return std::norm(ip);
}

double interval_weight(const WaveFunction& psi, double x_lo, double x_hi) {
    if (psi.sector() != Sector::OneParticle)
        throw BadSector("interval_weight: one-particle only");
    double s = 0.0;
    const Grid1D& g = psi.grid();
    for (int i = 0; i < g.n_cells; ++i) {
        double x = g.center(i);
        if (x >= x_lo && x < x_hi) s += std::norm(psi.at(i));
    }
    return s * g.dx;
}

} // namespace collapsim
