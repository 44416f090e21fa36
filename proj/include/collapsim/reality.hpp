#pragma once

#include "collapsim/csl.hpp"
#include "collapsim/noise.hpp"
#include "collapsim/wavefunction.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace collapsim {
namespace reality {

// Union of disjoint [lo, hi) cell-index ranges on a grid; the complement is
// derivable exactly because regions are unions of whole cells.
class Region {
public:
    Region(const Grid1D& grid, std::vector<std::pair<int, int>> intervals);

    // Cells whose centers fall in [x_lo, x_hi).
    static Region from_interval(const Grid1D& grid, double x_lo, double x_hi);

    const Grid1D& grid() const { return grid_; }
    const std::vector<std::pair<int, int>>& intervals() const { return intervals_; }
    Region complement() const;
    bool contains(int cell) const { return mask_[static_cast<std::size_t>(cell)] != 0; }
    int cells_inside() const;

private:
    Grid1D grid_;
    std::vector<std::pair<int, int>> intervals_;
    std::vector<char> mask_;
};

// <psi| P_n^V |psi> in the symmetric-wavefunction form
// (N choose n) int_V..int_Vbar |psi|^2, for N in {1, 2}. The state is
// normalized internally, so sum_n stuff(V, n) partitions 1 exactly.
double stuff(const WaveFunction& psi, const Region& v, int n);

// stuff(V, n) >= 1 - epsilon: n particles are objectively in V.
bool is_objective(const WaveFunction& psi, const Region& v, int n, double epsilon);

struct StuffReport {
    std::vector<double> values; // index n = 0..N
    double epsilon = 0.0;
    std::optional<int> objective_n;
};

StuffReport make_stuff_report(const WaveFunction& psi, const Region& v,
                              double epsilon = 1e-6);

// Hydrogen ground state, sphere of radius r_V around the nucleus: returns
// log10 of the exterior probability 1 - <P_1^V> = e^{-2p}(1 + 2p + 2p^2),
// p = r_V / a0, evaluated in log space so it never underflows.
double hydrogen_stuff_bound(double r_v_cm);

constexpr double kBohrRadiusCm = 5.29e-9;

struct FlowReport {
    std::vector<double> times;        // recorded state times (step boundaries)
    std::vector<double> stuff_series; // <P_1^V> at those times
    std::vector<double> source_series; // Eq-(5.9)-type source at step midpoints
    std::vector<double> current_series; // surface currents: identically 0 (H = 0)
    std::vector<double> residual_series; // |dP/dt - source| per step
    double source_at_t0 = 0.0;
    double residual = 0.0;       // max over steps
    double dt = 0.0;             // the step the residual scales with (first order)
};

// Two-particle CSL evolution under the supplied noise realization, checking
// the stuff-flow balance: the finite-difference d/dt of <P_1^V> against the
// collapse source term (integral of F |psi|^2 over V x Vbar + Vbar x V minus
// <P_1^V> times the full-domain integral), evaluated at the Stratonovich
// midpoint of each step. With H = 0 the surface currents vanish and the
// residual is pure time-discretization, first order in dt.
FlowReport flow_balance(const WaveFunction& psi0, const Region& v,
                        const csl::Csl1dParams& params, const NoiseField& noise,
                        double t_end);

} // namespace reality
} // namespace collapsim
