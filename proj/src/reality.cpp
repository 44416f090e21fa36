#include "collapsim/reality.hpp"

#include <algorithm>
#include <cmath>

namespace collapsim {
namespace reality {

Region::Region(const Grid1D& grid, std::vector<std::pair<int, int>> intervals)
    : grid_(grid), intervals_(std::move(intervals)) {
    std::sort(intervals_.begin(), intervals_.end());
    mask_.assign(static_cast<std::size_t>(grid_.n_cells), 0);
    int prev_hi = -1;
    for (auto& [lo, hi] : intervals_) {
        if (lo < 0 || hi > grid_.n_cells || lo >= hi)
            throw NumericalError("Region: interval outside the grid");
        if (lo < prev_hi) throw NumericalError("Region: intervals must be disjoint");
        prev_hi = hi;
        for (int i = lo; i < hi; ++i) mask_[static_cast<std::size_t>(i)] = 1;
    }
}

Region Region::from_interval(const Grid1D& grid, double x_lo, double x_hi) {
    int lo = grid.n_cells, hi = 0;
    for (int i = 0; i < grid.n_cells; ++i) {
        double x = grid.center(i);
        if (x >= x_lo && x < x_hi) {
            lo = std::min(lo, i);
            hi = std::max(hi, i + 1);
        }
    }
    if (lo >= hi) throw NumericalError("Region::from_interval: no cells in range");
    return Region(grid, {{lo, hi}});
}

Region Region::complement() const {
    std::vector<std::pair<int, int>> out;
    int start = -1;
    for (int i = 0; i < grid_.n_cells; ++i) {
        bool outside = mask_[static_cast<std::size_t>(i)] == 0;
        if (outside && start < 0) start = i;
        if (!outside && start >= 0) {
            out.emplace_back(start, i);
            start = -1;
        }
    }
    if (start >= 0) out.emplace_back(start, grid_.n_cells);
    return Region(grid_, std::move(out));
}

int Region::cells_inside() const {
    int n = 0;
    for (char c : mask_) n += c;
    return n;
}

double stuff(const WaveFunction& psi, const Region& v, int n) {
    if (!(psi.grid() == v.grid())) throw NumericalError("stuff: region grid mismatch");
    int n_particles = psi.n_particles();
    if (n < 0 || n > n_particles) throw BadSector("stuff: n exceeds the particle number");

    double norm2 = psi.norm_squared();
    if (norm2 <= 0.0) throw ZeroNorm("stuff: state has zero norm");

    const Grid1D& g = psi.grid();
    if (n_particles == 1) {
        double s = 0.0;
        for (int i = 0; i < g.n_cells; ++i)
            if (v.contains(i) == (n == 1)) s += std::norm(psi.at(i));
        return s * g.dx / norm2;
    }

    // N = 2: (2 choose n) int_V^n int_Vbar^{2-n} |psi|^2, using the symmetry
    // of the amplitudes.
    double s = 0.0;
    for (int i = 0; i < g.n_cells; ++i) {
        bool vi = v.contains(i);
        for (int j = 0; j < g.n_cells; ++j) {
            bool vj = v.contains(j);
            int inside = (vi ? 1 : 0) + (vj ? 1 : 0);
            if (inside == n) s += std::norm(psi.at(i, j));
        }
    }
    return s * g.dx * g.dx / norm2;
}

bool is_objective(const WaveFunction& psi, const Region& v, int n, double epsilon) {
    if (!(epsilon >= 0.0 && epsilon < 1.0))
        throw NumericalError("is_objective: epsilon outside [0,1)");
    return stuff(psi, v, n) >= 1.0 - epsilon;
}

StuffReport make_stuff_report(const WaveFunction& psi, const Region& v, double epsilon) {
    StuffReport rep;
    rep.epsilon = epsilon;
    for (int n = 0; n <= psi.n_particles(); ++n) rep.values.push_back(stuff(psi, v, n));
    for (int n = 0; n <= psi.n_particles(); ++n)
        if (rep.values[static_cast<std::size_t>(n)] >= 1.0 - epsilon) {
            rep.objective_n = n;
            break;
        }
    return rep;
}

double hydrogen_stuff_bound(double r_v_cm) {
    if (r_v_cm <= 0.0) throw NumericalError("hydrogen_stuff_bound: radius must be positive");
    double rho = r_v_cm / kBohrRadiusCm;
    // log P(out) = -2 rho + log(1 + 2 rho + 2 rho^2); exact closed form of the
    // exterior integral of |psi_100|^2.
    double log_p = -2.0 * rho + std::log1p(2.0 * rho * (1.0 + rho));
    return log_p / std::log(10.0);
}

namespace {

// Two-particle log-magnitude state; phases frozen.
struct PairState {
    int n;
    double dx;
    std::vector<double> log_mag; // n*n, symmetric
    std::vector<double> phase;

    double log_norm_squared() const {
        double m = -std::numeric_limits<double>::infinity();
        for (double x : log_mag) m = std::max(m, 2.0 * x);
        double s = 0.0;
        for (double x : log_mag) s += std::exp(2.0 * x - m);
        return m + std::log(s) + 2.0 * std::log(dx);
    }

    void renormalize() {
        double ln = log_norm_squared();
        for (double& x : log_mag) x -= 0.5 * ln;
    }

    std::vector<double> probabilities() const {
        std::vector<double> p(log_mag.size());
        double ldx2 = dx * dx;
        for (std::size_t k = 0; k < p.size(); ++k)
            p[k] = std::exp(2.0 * log_mag[k]) * ldx2;
        return p;
    }
};

} // namespace

FlowReport flow_balance(const WaveFunction& psi0, const Region& v,
                        const csl::Csl1dParams& params, const NoiseField& noise,
                        double t_end) {
    params.validate();
    if (psi0.sector() != Sector::TwoParticle)
        throw BadSector("flow_balance: two-particle states only");
    if (!(noise.spec().grid == psi0.grid()))
        throw NumericalError("flow_balance: noise grid must match the state grid");
    if (!(psi0.grid() == v.grid()))
        throw NumericalError("flow_balance: region grid mismatch");

    csl::SmearedOperator op(psi0.grid(), params.a);
    const Grid1D& g = psi0.grid();
    int n = g.n_cells;
    double dt = noise.spec().dt;
    int steps = static_cast<int>(std::round(t_end / dt));
    if (steps > noise.spec().n_steps)
        throw NumericalError("flow_balance: noise realization shorter than t_end");

    std::vector<double> phi_pair = op.pair_overlap_matrix();

    PairState st;
    st.n = n;
    st.dx = g.dx;
    st.log_mag.resize(static_cast<std::size_t>(n) * n);
    st.phase.resize(st.log_mag.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            std::size_t k = static_cast<std::size_t>(i) * n + j;
            st.log_mag[k] = std::log(std::abs(psi0.at(i, j)));
            st.phase[k] = std::arg(psi0.at(i, j));
        }
    st.renormalize();

    // straddle mask: exactly one argument inside V
    std::vector<char> straddle(st.log_mag.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            straddle[static_cast<std::size_t>(i) * n + j] = v.contains(i) != v.contains(j);

    auto stuff_of = [&](const PairState& s) {
        std::vector<double> p = s.probabilities();
        double acc = 0.0, tot = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k) {
            tot += p[k];
            if (straddle[k]) acc += p[k];
        }
        return acc / tot;
    };

    // f_ij = phi_i + phi_j - lambda S2_ij, the per-configuration log-derivative
    // rate; F = 2 f up to configuration-independent terms, which cancel in the
    // source difference.
    auto rate_field = [&](const std::vector<double>& smeared) {
        std::vector<double> f(st.log_mag.size());
        for (int i = 0; i < n; ++i) {
            double si = op.counterterm(i);
            for (int j = 0; j < n; ++j) {
                std::size_t k = static_cast<std::size_t>(i) * n + j;
                double s2 = si + op.counterterm(j) + 2.0 * phi_pair[k];
                f[k] = smeared[static_cast<std::size_t>(i)] + smeared[static_cast<std::size_t>(j)] -
                       params.lambda * s2;
            }
        }
        return f;
    };

    auto source_of = [&](const PairState& s, const std::vector<double>& f) {
        std::vector<double> p = s.probabilities();
        double tot = 0.0, in = 0.0, all = 0.0, pv = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k) {
            tot += p[k];
            all += f[k] * p[k];
            if (straddle[k]) {
                in += f[k] * p[k];
                pv += p[k];
            }
        }
        return 2.0 * (in / tot - (pv / tot) * (all / tot));
    };

    auto apply = [&](PairState& s, const std::vector<double>& f, double h) {
        for (std::size_t k = 0; k < s.log_mag.size(); ++k) s.log_mag[k] += f[k] * h;
        s.renormalize();
    };

    // per-cell smeared noise for one step
    std::vector<double> w(static_cast<std::size_t>(n));
    auto smear = [&](int step) {
        int band = op.band();
        std::vector<double> phi(static_cast<std::size_t>(n), 0.0);
        for (int i = 0; i < n; ++i) {
            int lo = std::max(0, i - band), hi = std::min(n - 1, i + band);
            double acc = 0.0;
            for (int j = lo; j <= hi; ++j) acc += op.weight(i, j) * noise.value(step, j);
            phi[static_cast<std::size_t>(i)] = acc * g.dx;
        }
        return phi;
    };

    FlowReport rep;
    rep.dt = dt;
    rep.times.push_back(0.0);
    rep.stuff_series.push_back(stuff_of(st));

    for (int s = 0; s < steps; ++s) {
        std::vector<double> f = rate_field(smear(s));
        double p_before = rep.stuff_series.back();

        if (s == 0) {
            PairState init = st;
            rep.source_at_t0 = source_of(init, f);
        }

        PairState mid = st;
        apply(mid, f, 0.5 * dt);
        double source_mid = source_of(mid, f);
        apply(mid, f, 0.5 * dt); // second half: exponential flows compose exactly
        st = std::move(mid);

        double p_after = stuff_of(st);
        rep.times.push_back((s + 1) * dt);
        rep.stuff_series.push_back(p_after);
        rep.source_series.push_back(source_mid);
        rep.current_series.push_back(0.0); // H = 0: J1 = J2 = 0
        rep.residual_series.push_back(std::abs((p_after - p_before) / dt - source_mid));
    }
    rep.residual = 0.0;
    for (double r : rep.residual_series) rep.residual = std::max(rep.residual, r);
    return rep;
}

} // namespace reality
} // namespace collapsim
