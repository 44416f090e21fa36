#include "collapsim/csl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace collapsim {
namespace csl {

namespace {

double logsumexp(const std::vector<double>& v) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

// One-particle field state in log-magnitude form; phases are frozen (H = 0,
// real noise, position-diagonal generator).
struct FieldState {
    const SmearedOperator* op;
    std::vector<double> log_mag;
    std::vector<double> phase;
    double log_norm = 0.0;

    explicit FieldState(const SmearedOperator& so, const WaveFunction& psi0) : op(&so) {
        int n = so.grid().n_cells;
        log_mag.resize(static_cast<std::size_t>(n));
        phase.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            log_mag[static_cast<std::size_t>(i)] = std::log(std::abs(psi0.at(i)));
            phase[static_cast<std::size_t>(i)] = std::arg(psi0.at(i));
        }
        renormalize_only();
    }

    double log_norm_squared() const {
        std::vector<double> sq(log_mag);
        for (double& x : sq) x *= 2.0;
        return logsumexp(sq) + std::log(op->grid().dx);
    }

    void renormalize_only() {
        double ln = log_norm_squared();
        for (double& x : log_mag) x -= 0.5 * ln;
    }

    // Normalized cell probabilities |psi|^2 dx.
    std::vector<double> probabilities() const {
        std::vector<double> p(log_mag.size());
        double dx = op->grid().dx;
        for (std::size_t i = 0; i < p.size(); ++i)
            p[i] = std::exp(2.0 * log_mag[i]) * dx;
        return p;
    }

    // phi_i = sum_j g(x_i - z_j) w_j dz
    std::vector<double> smear(const std::vector<double>& w) const {
        int n = op->grid().n_cells, band = op->band();
        std::vector<double> phi(static_cast<std::size_t>(n), 0.0);
        for (int i = 0; i < n; ++i) {
            int lo = std::max(0, i - band), hi = std::min(n - 1, i + band);
            double s = 0.0;
            for (int j = lo; j <= hi; ++j) s += op->weight(i, j) * w[static_cast<std::size_t>(j)];
            phi[static_cast<std::size_t>(i)] = s * op->grid().dx;
        }
        return phi;
    }

    // <A(z_j)> from cell probabilities.
    std::vector<double> expectation(const std::vector<double>& p) const {
        int n = op->grid().n_cells, band = op->band();
        std::vector<double> ev(static_cast<std::size_t>(n), 0.0);
        for (int j = 0; j < n; ++j) {
            int lo = std::max(0, j - band), hi = std::min(n - 1, j + band);
            double s = 0.0;
            for (int i = lo; i <= hi; ++i) s += op->weight(i, j) * p[static_cast<std::size_t>(i)];
            ev[static_cast<std::size_t>(j)] = s;
        }
        return ev;
    }

    void apply(const std::vector<double>& w, double lambda, double dt) {
        std::vector<double> phi = smear(w);
        for (std::size_t i = 0; i < log_mag.size(); ++i)
            log_mag[i] += (phi[i] - lambda * op->counterterm(static_cast<int>(i))) * dt;
        double ln = log_norm_squared();
        log_norm += ln;
        for (double& x : log_mag) x -= 0.5 * ln;
    }

    WaveFunction to_wavefunction() const {
        WaveFunction psi(op->grid(), Sector::OneParticle);
        for (std::size_t i = 0; i < log_mag.size(); ++i)
            psi.at(static_cast<int>(i)) = std::polar(std::exp(log_mag[i]), phase[i]);
        return psi;
    }

    void record(Csl1dTrajectory& traj, double t) const {
        traj.times.push_back(t);
        traj.states.push_back(to_wavefunction());
        traj.log_norm.push_back(log_norm);
        double mid = 0.5 * (op->grid().x_min + op->grid().x_max());
        std::vector<double> left, right;
        double ldx = std::log(op->grid().dx);
        for (std::size_t i = 0; i < log_mag.size(); ++i) {
            double lw = 2.0 * log_mag[i] + ldx;
            (op->grid().center(static_cast<int>(i)) < mid ? left : right).push_back(lw);
        }
        double ll = logsumexp(left), lr = logsumexp(right);
        traj.log_left_weight.push_back(ll);
        traj.log_right_weight.push_back(lr);
        traj.left_weight.push_back(std::exp(ll));
    }
};

double max_dt_1d(const SmearedOperator& op, double lambda) {
    double max_s = 0.0;
    for (int i = 0; i < op.grid().n_cells; ++i) max_s = std::max(max_s, op.counterterm(i));
    return 1e-2 / (lambda * 2.0 * max_s); // spectral range of the two-branch reduction
}

} // namespace

Csl1dTrajectory evolve_1d_cooked(const WaveFunction& psi0, const Csl1dParams& p,
                                 double dt, double t_end, RngStream& rng, int stride) {
    p.validate();
    if (psi0.sector() != Sector::OneParticle)
        throw BadSector("evolve_1d: one-particle states only");
    SmearedOperator op(psi0.grid(), p.a);
    if (dt > max_dt_1d(op, p.lambda) * (1.0 + 1e-12))
        throw StepTooLarge("evolve_1d: dt exceeds 1e-2 / (lambda spectral-range)");
    int n_steps = static_cast<int>(std::ceil(t_end / dt - 1e-12));
    double h = t_end / n_steps;

    int n = op.grid().n_cells;
    double sigma = std::sqrt(p.lambda / (op.grid().dx * h));
    FieldState st(op, psi0);

    Csl1dTrajectory traj;
    st.record(traj, 0.0);

    std::vector<double> w(static_cast<std::size_t>(n));
    for (int s = 0; s < n_steps; ++s) {
        std::vector<double> pr = st.probabilities();
        std::vector<double> a0 = st.expectation(pr);
        std::vector<double> xi(static_cast<std::size_t>(n));
        for (auto& v : xi) v = rng.normal();

        // Predictor with the current-state drift, then midpoint drift with
        // the same noise increments (Stratonovich / Heun-type evaluation).
        for (int i = 0; i < n; ++i)
            w[static_cast<std::size_t>(i)] =
                2.0 * p.lambda * a0[static_cast<std::size_t>(i)] + sigma * xi[static_cast<std::size_t>(i)];
        FieldState pred = st;
        pred.apply(w, p.lambda, h);
        std::vector<double> a1 = pred.expectation(pred.probabilities());
        for (int i = 0; i < n; ++i)
            w[static_cast<std::size_t>(i)] =
                p.lambda * (a0[static_cast<std::size_t>(i)] + a1[static_cast<std::size_t>(i)]) +
                sigma * xi[static_cast<std::size_t>(i)];
        st.apply(w, p.lambda, h);

        if ((s + 1) % stride == 0 || s + 1 == n_steps) st.record(traj, (s + 1) * h);
    }
    return traj;
}

Csl1dTrajectory evolve_1d_linear(const WaveFunction& psi0, const Csl1dParams& p,
                                 const NoiseField& noise, int stride) {
    p.validate();
    if (psi0.sector() != Sector::OneParticle)
        throw BadSector("evolve_1d: one-particle states only");
    if (!(noise.spec().grid == psi0.grid()))
        throw NumericalError("evolve_1d: noise grid must match the state grid");
    SmearedOperator op(psi0.grid(), p.a);
    double dt = noise.spec().dt;
    if (dt > max_dt_1d(op, p.lambda) * (1.0 + 1e-12))
        throw StepTooLarge("evolve_1d: dt exceeds 1e-2 / (lambda spectral-range)");

    int n = op.grid().n_cells;
    FieldState st(op, psi0);
    Csl1dTrajectory traj;
    st.record(traj, 0.0);

    std::vector<double> w(static_cast<std::size_t>(n));
    for (int s = 0; s < noise.spec().n_steps; ++s) {
        for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = noise.value(s, i);
        st.apply(w, p.lambda, dt);
        if ((s + 1) % stride == 0 || s + 1 == noise.spec().n_steps)
            st.record(traj, (s + 1) * dt);
    }
    return traj;
}

} // namespace csl
} // namespace collapsim
