#include "collapsim/grw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace collapsim {
namespace grw {

namespace {

constexpr double kPi = 3.14159265358979323846;

// log of the hit kernel (pi a^2)^{-1/4} exp(-u^2 / 2a^2)
inline double log_hit_kernel(double u, double a) {
    return -0.25 * std::log(kPi * a * a) - u * u / (2.0 * a * a);
}

double logsumexp(const std::vector<double>& v) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

} // namespace

HitResult apply_hit(const WaveFunction& psi, double center, const GrwParams& params) {
    params.validate();
    if (psi.sector() != Sector::OneParticle)
        throw BadSector("apply_hit: one-particle states only");
    const Grid1D& g = psi.grid();
    WaveFunction out(g, Sector::OneParticle);
    double pref = std::pow(kPi * params.a * params.a, -0.25);
    double inv2a2 = 1.0 / (2.0 * params.a * params.a);
    double n2 = 0.0;
    for (int i = 0; i < g.n_cells; ++i) {
        double u = g.center(i) - center;
        std::complex<double> v = pref * std::exp(-u * u * inv2a2) * psi.at(i);
        out.at(i) = v;
        n2 += std::norm(v);
    }
    n2 *= g.dx;
    if (n2 <= 0.0 || !std::isfinite(n2))
        throw ZeroNorm("apply_hit: hit center too far from all support");
    double inv = 1.0 / std::sqrt(n2);
    for (int i = 0; i < g.n_cells; ++i) out.at(i) *= inv;
    return HitResult{std::move(out), n2};
}

std::vector<double> hit_log_magnitudes(const WaveFunction& psi, double center,
                                       const GrwParams& params) {
    params.validate();
    const Grid1D& g = psi.grid();
    std::vector<double> lw(static_cast<std::size_t>(g.n_cells));
    for (int i = 0; i < g.n_cells; ++i)
        lw[static_cast<std::size_t>(i)] =
            std::log(std::abs(psi.at(i))) + log_hit_kernel(g.center(i) - center, params.a);
    // log N^2 = logsumexp(2 log|psi'|) + log dx
    std::vector<double> sq(lw);
    for (double& x : sq) x *= 2.0;
    double log_n2 = logsumexp(sq) + std::log(g.dx);
    for (double& x : lw) x -= 0.5 * log_n2;
    return lw;
}

Grid1D extended_center_grid(const Grid1D& grid, const GrwParams& params) {
    int pad = static_cast<int>(std::ceil(5.0 * params.a / grid.dx));
    return Grid1D(grid.x_min - pad * grid.dx, grid.dx, grid.n_cells + 2 * pad);
}

std::vector<double> center_density(const WaveFunction& psi, const GrwParams& params) {
    params.validate();
    if (psi.sector() != Sector::OneParticle)
        throw BadSector("center_density: one-particle states only");
    const Grid1D& g = psi.grid();
    Grid1D cg = extended_center_grid(g, params);
    double pref = 1.0 / std::sqrt(kPi * params.a * params.a);
    double inva2 = 1.0 / (params.a * params.a);
    std::vector<double> density(static_cast<std::size_t>(cg.n_cells), 0.0);
    for (int c = 0; c < cg.n_cells; ++c) {
        double xc = cg.center(c);
        double s = 0.0;
        for (int i = 0; i < g.n_cells; ++i) {
            double u = g.center(i) - xc;
            s += std::exp(-u * u * inva2) * std::norm(psi.at(i));
        }
        density[static_cast<std::size_t>(c)] = pref * s * g.dx;
    }
    return density;
}

namespace {

double draw_center(const std::vector<double>& density, const Grid1D& cg, RngStream& rng) {
    double total = 0.0;
    for (double d : density) total += d;
    double u = rng.uniform() * total;
    double acc = 0.0;
    int cell = cg.n_cells - 1;
    for (int c = 0; c < cg.n_cells; ++c) {
        acc += density[static_cast<std::size_t>(c)];
        if (u < acc) {
            cell = c;
            break;
        }
    }
    return cg.x_min + (cell + rng.uniform()) * cg.dx;
}

} // namespace

double sample_center(const WaveFunction& psi, const GrwParams& params, RngStream& rng) {
    std::vector<double> density = center_density(psi, params);
    return draw_center(density, extended_center_grid(psi.grid(), params), rng);
}

double sample_center(const std::vector<double>& density, const Grid1D& center_grid,
                     RngStream& rng) {
    return draw_center(density, center_grid, rng);
}

std::optional<HitEvent> sample_hit(const WaveFunction& psi, const GrwParams& params,
                                   double dt, double t_now, RngStream& rng) {
    params.validate();
    if (params.lambda * dt > 1e-2)
        throw StepTooLarge("sample_hit: lambda dt must be <= 1e-2");
    std::vector<double> density = center_density(psi, params);
    Grid1D cg = extended_center_grid(psi.grid(), params);
    double total = 0.0;
    for (double d : density) total += d;
    total *= cg.dx; // = integral of N^2 over centers, 1 up to quadrature error

    if (!rng.bernoulli(params.lambda * dt * total)) return std::nullopt;
    return HitEvent{t_now, draw_center(density, cg, rng)};
}

void PointerModel::validate(const GrwParams& params) const {
    params.validate();
    if (n < 1) throw NumericalError("PointerModel: n must be >= 1");
    if (std::abs(weight_left + weight_right - 1.0) > 1e-9)
        throw NumericalError("PointerModel: branch weights must sum to 1");
    if (branch_separation < 10.0 * params.a)
        throw NumericalError("PointerModel: branch separation must be >= 10 a");
}

PointerOutcome simulate_pointer(const PointerModel& pointer, const GrwParams& params,
                                RngStream& rng) {
    pointer.validate(params);

    // Collective two-branch coordinate: narrow packets at +-separation/2.
    double half = 0.5 * pointer.branch_separation;
    double width = 0.5 * params.a;
    double dx = 0.25 * params.a;
    Grid1D g = Grid1D::over(-half - 5.0 * params.a, half + 5.0 * params.a,
                            static_cast<int>(std::ceil((pointer.branch_separation + 10.0 * params.a) / dx)));
    WaveFunction psi = WaveFunction::packet_pair(g, -half, half, width,
                                                 pointer.weight_left, pointer.weight_right);

    PointerOutcome res;
    // Any of the n channels fires first: Exponential(lambda n).
    res.collapse_time = rng.exponential(params.lambda * static_cast<double>(pointer.n));

    // Draw the hit center from N^2(c) and collapse.
    double center = sample_center(psi, params, rng);

    // Branch weights after the hit, in log space so the tail stays finite.
    std::vector<double> lm = hit_log_magnitudes(psi, center, params);
    std::vector<double> left, right;
    for (int i = 0; i < g.n_cells; ++i) {
        double lw = 2.0 * lm[static_cast<std::size_t>(i)] + std::log(g.dx);
        (g.center(i) < 0.0 ? left : right).push_back(lw);
    }
    double log_wl = logsumexp(left), log_wr = logsumexp(right);
    if (log_wl >= log_wr) {
        res.outcome = Branch::Left;
        res.log_weight_winner = log_wl;
        res.log_weight_loser = log_wr;
    } else {
        res.outcome = Branch::Right;
        res.log_weight_winner = log_wr;
        res.log_weight_loser = log_wl;
    }
    return res;
}

} // namespace grw
} // namespace collapsim
