#include "collapsim/ruin.hpp"

#include <algorithm>
#include <cmath>

namespace collapsim {
namespace ruin {

namespace {

// Nearest integer with a relative tolerance; -1 if off-lattice.
long lattice_index(double value, double stake) {
    double q = value / stake;
    double r = std::round(q);
    if (std::abs(q - r) > 1e-9 * std::max(1.0, std::abs(q))) return -1;
    return static_cast<long>(r);
}

} // namespace

void GameConfig::validate() const {
    if (!(x0 >= 0.0 && x0 <= 1.0)) throw NumericalError("GameConfig: x0 outside [0,1]");
    if (!(stake > 0.0)) throw NumericalError("GameConfig: stake must be positive");
    if (halving) {
        // a never-ending game needs both players solvent at the start
        if (x0 <= 0.0 || x0 >= 1.0)
            throw NumericalError("GameConfig: halving variant needs x0 strictly inside (0,1)");
    } else {
        if (lattice_index(x0, stake) < 0 || lattice_index(1.0, stake) < 0)
            throw NonIntegralState("GameConfig: x0 and 1 must be multiples of the stake");
    }
}

GameResult play_game(const GameConfig& cfg, RngStream& rng, long trajectory_cap) {
    cfg.validate();
    GameResult res;

    if (!cfg.halving) {
        // Integer holdings in stake units: exact absorption.
        long k = lattice_index(cfg.x0, cfg.stake);
        long K = lattice_index(1.0, cfg.stake);
        while (k > 0 && k < K) {
            k += rng.bernoulli(0.5) ? 1 : -1;
            ++res.steps;
            if (res.steps <= trajectory_cap)
                res.trajectory.push_back(static_cast<double>(k) / K);
        }
        res.final_x = static_cast<double>(k) / K;
        res.winner = (k == K) ? Winner::L : Winner::R;
        return res;
    }

    // Never-ending variant: the stake keeps halving ahead of either player's
    // holdings, so x never reaches 0 or 1.
    double x = cfg.x0;
    double stake = cfg.stake;
    for (long s = 0; s < cfg.max_steps; ++s) {
        double margin = std::min(x, 1.0 - x);
        while (2.0 * stake > margin) stake *= 0.5;
        x += rng.bernoulli(0.5) ? stake : -stake;
        ++res.steps;
        if (res.steps <= trajectory_cap) res.trajectory.push_back(x);
    }
    res.final_x = x;
    res.winner = Winner::None;
    return res;
}

double ruin_probability(double x0, double stake) {
    long k0 = lattice_index(x0, stake);
    long K = lattice_index(1.0, stake);
    if (k0 < 0 || K < 1 || k0 > K)
        throw NonIntegralState("ruin_probability: x0 not on the stake lattice");
    if (k0 == 0) return 0.0;
    if (k0 == K) return 1.0;

    // Interior states k = 1..K-1: P_k - (P_{k-1} + P_{k+1})/2 = rhs with
    // boundary values folded into the right-hand side. Thomas sweep in long
    // double keeps the solve well inside the 1e-12 gate.
    std::size_t n = static_cast<std::size_t>(K - 1);
    std::vector<long double> diag(n, 1.0L), rhs(n, 0.0L);
    rhs[n - 1] = 0.5L; // P(1) = 1
    const long double off = -0.5L;
    for (std::size_t i = 1; i < n; ++i) {
        long double m = off / diag[i - 1];
        diag[i] -= m * off;
        rhs[i] -= m * rhs[i - 1];
    }
    std::vector<long double> p(n);
    p[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
        p[i] = (rhs[i] - off * p[i + 1]) / diag[i];
    return static_cast<double>(p[static_cast<std::size_t>(k0 - 1)]);
}

DensityProfile::DensityProfile(int n_x, double lambda, int r, double x0)
    : n_x_(n_x), lambda_(lambda), r_(r) {
    if (n_x < 4) throw NumericalError("DensityProfile: n_x too small");
    if (lambda <= 0.0) throw NumericalError("DensityProfile: lambda must be positive");
    if (r < 1) throw NumericalError("DensityProfile: r must be >= 1");
    if (!(x0 >= 0.0 && x0 <= 1.0)) throw NumericalError("DensityProfile: x0 outside [0,1]");

    mass_.assign(static_cast<std::size_t>(n_x_) + 1, 0.0);
    // Single-node unit mass when x0 is on the lattice; otherwise split over
    // the bracketing nodes so the initial mean is exactly x0.
    double pos = x0 * n_x_;
    int k = static_cast<int>(std::floor(pos));
    double theta = pos - k;
    if (theta < 1e-12 || k >= n_x_) {
        mass_[static_cast<std::size_t>(std::min(k, n_x_))] = 1.0;
    } else {
        mass_[static_cast<std::size_t>(k)] = 1.0 - theta;
        mass_[static_cast<std::size_t>(k) + 1] = theta;
    }

    coeff_.resize(mass_.size());
    for (std::size_t i = 0; i < coeff_.size(); ++i) {
        double x = node(static_cast<int>(i));
        coeff_[i] = std::pow(x * (1.0 - x), r_);
    }
}

std::vector<double> DensityProfile::densities() const {
    std::vector<double> rho(mass_.size());
    for (std::size_t i = 0; i < mass_.size(); ++i) {
        double w = (i == 0 || i + 1 == mass_.size()) ? 0.5 * h() : h();
        rho[i] = mass_[i] / w;
    }
    return rho;
}

double DensityProfile::total_mass() const {
    double s = 0.0;
    for (double m : mass_) s += m;
    return s;
}

double DensityProfile::mean_x() const {
    double s = 0.0;
    for (std::size_t i = 0; i < mass_.size(); ++i) s += node(static_cast<int>(i)) * mass_[i];
    return s;
}

double DensityProfile::moment_x_one_minus_x() const {
    double s = 0.0;
    for (std::size_t i = 0; i < mass_.size(); ++i) {
        double x = node(static_cast<int>(i));
        s += x * (1.0 - x) * mass_[i];
    }
    return s;
}

double DensityProfile::band_mass(double delta) const {
    double s = 0.0;
    for (std::size_t i = 0; i < mass_.size(); ++i) {
        double x = node(static_cast<int>(i));
        if (x <= delta || x >= 1.0 - delta) s += mass_[i];
    }
    return s;
}

double DensityProfile::stable_dt_bound() const {
    double maxD = 0.0;
    for (double d : coeff_) maxD = std::max(maxD, d);
    return h() * h() / (2.0 * lambda_ * maxD);
}

DensityProfile evolve_diffusion(const DensityProfile& p, double dt, double t_span) {
    if (dt > p.stable_dt_bound() * (1.0 + 1e-12))
        throw UnstableStep("evolve_diffusion: dt exceeds h^2/(2 lambda max D)");
    if (t_span < 0.0) throw NumericalError("evolve_diffusion: negative time span");

    DensityProfile out = p;
    if (t_span == 0.0) return out;
    long steps = static_cast<long>(std::ceil(t_span / dt - 1e-12));
    double step = t_span / static_cast<double>(steps);
    double c = out.lambda_ * step / (out.h() * out.h());

    std::vector<double>& m = out.mass_;
    const std::vector<double>& D = out.coeff_;
    std::size_t n = m.size() - 1;
    std::vector<double> u(m.size());
    for (long s = 0; s < steps; ++s) {
        for (std::size_t i = 0; i <= n; ++i) u[i] = D[i] * m[i];
        // u vanishes at both ends, so the interior stencil plus the two
        // gain-only end rows is exactly the jump-chain master equation.
        double gain0 = c * u[1], gainN = c * u[n - 1];
        for (std::size_t i = 1; i < n; ++i)
            m[i] += c * (u[i + 1] - 2.0 * u[i] + u[i - 1]);
        m[0] += gain0;
        m[n] += gainN;
    }
    out.time_ = p.time_ + t_span;
    return out;
}

} // namespace ruin
} // namespace collapsim
