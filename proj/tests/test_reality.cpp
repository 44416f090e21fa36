#include <doctest.h>

#include "collapsim/reality.hpp"

#include <cmath>
#include <complex>

using namespace collapsim;
using namespace collapsim::reality;

namespace {

WaveFunction random_state(RngStream& rng, const Grid1D& g, Sector sector) {
    WaveFunction psi(g, sector);
    if (sector == Sector::OneParticle) {
        for (int i = 0; i < g.n_cells; ++i) psi.at(i) = {rng.normal(), rng.normal()};
    } else {
        for (int i = 0; i < g.n_cells; ++i)
            for (int j = 0; j <= i; ++j) {
                std::complex<double> v{rng.normal(), rng.normal()};
                psi.at(i, j) = v;
                psi.at(j, i) = v;
            }
    }
    psi.normalize();
    return psi;
}

} // namespace

TEST_CASE("region: complement partitions the grid") {
    Grid1D g = Grid1D::over(0.0, 1.0, 10);
    Region v(g, {{2, 4}, {7, 9}});
    Region vb = v.complement();
    CHECK(v.cells_inside() + vb.cells_inside() == 10);
    for (int i = 0; i < 10; ++i) CHECK(v.contains(i) != vb.contains(i));
    CHECK_THROWS(Region(g, {{2, 5}, {4, 7}})); // overlap
    CHECK_THROWS(Region(g, {{8, 12}}));        // outside
}

TEST_CASE("stuff: full support, Eq-(5.5) halves, complement identity") {
    Grid1D g = Grid1D::over(-12.0, 12.0, 192);
    Region left_half = Region::from_interval(g, -12.0, 0.0);

    WaveFunction inside = WaveFunction::gaussian_packet(g, -6.0, 0.5);
    CHECK(stuff(inside, left_half, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(stuff(inside, left_half, 0) == doctest::Approx(0.0).scale(1).epsilon(1e-12));
    CHECK(is_objective(inside, left_half, 1, 1e-6));

    WaveFunction equal = WaveFunction::packet_pair(g, -6.0, 6.0, 0.5, 0.5, 0.5);
    CHECK(stuff(equal, left_half, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(stuff(equal, left_half, 1) == doctest::Approx(0.5).epsilon(1e-12));
    Region right_half = left_half.complement();
    CHECK(stuff(equal, right_half, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(stuff(equal, right_half, 1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_FALSE(is_objective(equal, left_half, 0, 1e-3));
    CHECK_FALSE(is_objective(equal, left_half, 1, 1e-3));

    StuffReport rep = make_stuff_report(equal, left_half, 1e-3);
    CHECK_FALSE(rep.objective_n.has_value());

    RngStream rng(12);
    for (int rep_i = 0; rep_i < 10; ++rep_i) {
        WaveFunction psi = random_state(rng, g, Sector::OneParticle);
        CHECK(stuff(psi, left_half, 1) + stuff(psi, left_half.complement(), 1) ==
              doctest::Approx(1.0).epsilon(1e-10));
    }

    CHECK_THROWS_AS(stuff(inside, left_half, 2), BadSector);
}

TEST_CASE("stuff: two-particle product state by direct quadrature") {
    Grid1D g = Grid1D::over(-8.0, 8.0, 64);
    Region v = Region::from_interval(g, -8.0, 0.0);
    WaveFunction in_v = WaveFunction::gaussian_packet(g, -4.0, 0.5);
    WaveFunction out_v = WaveFunction::gaussian_packet(g, 4.0, 0.5);
    WaveFunction psi = WaveFunction::symmetrized_product(in_v, out_v);

    // direct quadrature oracle on the product form:
    // 2 int_V int_Vbar |psi|^2 = wV(phi1) wVbar(phi2) + wV(phi2) wVbar(phi1)
    // (cross terms vanish for disjoint supports)
    double w1v = interval_weight(in_v, -8.0, 0.0), w1o = 1.0 - w1v;
    double w2v = interval_weight(out_v, -8.0, 0.0), w2o = 1.0 - w2v;
    double oracle = w1v * w2o + w2v * w1o;
    CHECK(stuff(psi, v, 1) == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(stuff(psi, v, 1) == doctest::Approx(1.0).epsilon(1e-10));

    StuffReport rep = make_stuff_report(psi, v, 1e-6);
    REQUIRE(rep.objective_n.has_value());
    CHECK(*rep.objective_n == 1);
}

TEST_CASE("stuff: sum over n is conserved on random states") {
    Grid1D g = Grid1D::over(-4.0, 4.0, 48);
    Region v = Region::from_interval(g, -1.5, 2.0);
    RngStream rng(34);
    for (int rep = 0; rep < 20; ++rep) {
        Sector sec = rep % 2 == 0 ? Sector::OneParticle : Sector::TwoParticle;
        WaveFunction psi = random_state(rng, g, sec);
        double total = 0.0;
        for (int n = 0; n <= psi.n_particles(); ++n) total += stuff(psi, v, n);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("stuff: cell-summed 1-stuff is not conserved (paper witnesses)") {
    Grid1D g = Grid1D::over(0.0, 1.0, 8);

    // two particles in distinct cells: cell-summed 1-stuff = N = 2, exactly
    WaveFunction distinct(g, Sector::TwoParticle);
    distinct.at(2, 5) = 1.0;
    distinct.at(5, 2) = 1.0;
    distinct.normalize();
    double total = 0.0;
    for (int c = 0; c < 8; ++c) total += stuff(distinct, Region(g, {{c, c + 1}}), 1);
    CHECK(total == 2.0);

    // both particles in one cell: every cell's 1-stuff is 0, exactly
    WaveFunction together(g, Sector::TwoParticle);
    together.at(3, 3) = 1.0;
    together.normalize();
    total = 0.0;
    for (int c = 0; c < 8; ++c) total += stuff(together, Region(g, {{c, c + 1}}), 1);
    CHECK(total == 0.0);

    // while sum_n stuff stays 1 in any region for both witnesses
    Region v(g, {{0, 4}});
    double s1 = 0.0, s2 = 0.0;
    for (int n = 0; n <= 2; ++n) {
        s1 += stuff(distinct, v, n);
        s2 += stuff(together, v, n);
    }
    CHECK(s1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("stuff: monotone nesting of the vacuum amount") {
    Grid1D g = Grid1D::over(-4.0, 4.0, 48);
    RngStream rng(56);
    for (int rep = 0; rep < 10; ++rep) {
        WaveFunction psi = random_state(rng, g, Sector::OneParticle);
        Region small = Region(g, {{10, 20}});
        Region big = Region(g, {{8, 30}});
        CHECK(stuff(psi, small, 0) >= stuff(psi, big, 0) - 1e-12);
    }
}

TEST_CASE("is_objective: exact eigenstate at epsilon = 0") {
    Grid1D g = Grid1D::over(0.0, 1.0, 8);
    WaveFunction psi(g, Sector::OneParticle);
    psi.at(2) = 1.0;
    psi.normalize();
    Region v(g, {{0, 4}});
    CHECK(is_objective(psi, v, 1, 0.0)); // Eq-(5.1) limit
    CHECK_THROWS(is_objective(psi, v, 1, 1.0));
}

TEST_CASE("is_objective: post-collapse CSL trajectory with persistent tail") {
    csl::Csl1dParams p{1.0, 1.0};
    double l = 10.0;
    Grid1D g = Grid1D::over(-l / 2.0 - 4.0, l / 2.0 + 4.0, 72);
    WaveFunction psi0 = WaveFunction::packet_pair(g, -l / 2.0, l / 2.0, 0.5, 0.5, 0.5);
    RngStream rng(778);
    csl::Csl1dTrajectory traj = csl::evolve_1d_cooked(psi0, p, 5e-3, 10.0, rng, 2000);

    const WaveFunction& fin = traj.states.back();
    double mid = 0.0;
    Region left = Region::from_interval(g, g.x_min, mid);
    Region right = Region::from_interval(g, mid, g.x_max());
    const Region& winner = traj.left_weight.back() > 0.5 ? left : right;
    CHECK(is_objective(fin, winner, 1, 1e-6));
    // the losing branch is a tail, not a zero
    CHECK(std::isfinite(traj.log_left_weight.back()));
    CHECK(std::isfinite(traj.log_right_weight.back()));
}

TEST_CASE("hydrogen stuff bound") {
    // r_V = a0: closed form 5 e^{-2} ~ 0.6767, log10 = -0.169619
    CHECK(hydrogen_stuff_bound(kBohrRadiusCm) == doctest::Approx(-0.169619).epsilon(1e-4));
    // r_V -> 0: the particle is surely outside, log10 P(out) -> 0
    CHECK(hydrogen_stuff_bound(1e-13) > -1e-3);
    CHECK(hydrogen_stuff_bound(1e-13) <= 0.0);
    // r_V = 1e-6 cm: far beyond double underflow, computed in log space;
    // frozen value -159.34, recorded against the paper's -169
    double b = hydrogen_stuff_bound(1e-6);
    CHECK(b <= -150.0);
    CHECK(b == doctest::Approx(-159.34).epsilon(1e-3));
}

TEST_CASE("flow balance: vanishing source for objective configurations") {
    csl::Csl1dParams p{1.0, 1.0};
    Grid1D g = Grid1D::over(-8.0, 8.0, 64);
    Region v = Region::from_interval(g, g.x_min, 0.0);
    WaveFunction in_v = WaveFunction::gaussian_packet(g, -4.0, 0.4);
    WaveFunction out_v = WaveFunction::gaussian_packet(g, 4.0, 0.4);
    WaveFunction psi0 = WaveFunction::symmetrized_product(in_v, out_v);

    double dt = 1e-3;
    int steps = 50;
    RngStream rng(991);
    NoiseField noise = NoiseField::sample({g, dt, steps, p.lambda}, rng);
    FlowReport rep = flow_balance(psi0, v, p, noise, steps * dt);
    CHECK(rep.stuff_series.front() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(rep.source_at_t0) < 1e-8);
    for (double c : rep.current_series) CHECK(c == 0.0); // H = 0
}

TEST_CASE("flow balance: static when noise is zero and collapse is off") {
    Grid1D g = Grid1D::over(-6.0, 6.0, 48);
    Region v = Region::from_interval(g, g.x_min, 0.0);
    WaveFunction straddle1 = WaveFunction::gaussian_packet(g, -0.5, 0.8);
    WaveFunction straddle2 = WaveFunction::gaussian_packet(g, 0.5, 0.8);
    WaveFunction psi0 = WaveFunction::symmetrized_product(straddle1, straddle2);

    // lambda -> 0 limit: the noise variance vanishes with it, the
    // counterterm becomes negligible, nothing moves
    double dt = 1e-3;
    int steps = 20;
    RngStream rng(992);
    NoiseField zero = NoiseField::sample({g, dt, steps, 1e-30}, rng);
    FlowReport rep = flow_balance(psi0, v, {1.0, 1e-30}, zero, steps * dt);
    CHECK(std::abs(rep.stuff_series.back() - rep.stuff_series.front()) < 1e-12);
    CHECK(rep.residual < 1e-9);
}

TEST_CASE("flow balance: residual is first order in dt (step halving)") {
    csl::Csl1dParams p{1.0, 0.5};
    Grid1D g = Grid1D::over(-5.0, 5.0, 48);
    Region v = Region::from_interval(g, g.x_min, 0.0);
    // both packets straddle the boundary of V
    WaveFunction s1 = WaveFunction::gaussian_packet(g, -0.6, 0.7);
    WaveFunction s2 = WaveFunction::gaussian_packet(g, 0.6, 0.7);
    WaveFunction psi0 = WaveFunction::symmetrized_product(s1, s2);

    double t_end = 0.2;
    double dt_fine = 1.25e-4;
    int fine_steps = static_cast<int>(std::round(t_end / dt_fine));
    RngStream rng(993);
    NoiseField fine = NoiseField::sample({g, dt_fine, fine_steps, p.lambda}, rng);
    NoiseField coarse = fine.coarsened();

    FlowReport rf = flow_balance(psi0, v, p, fine, t_end);
    FlowReport rc = flow_balance(psi0, v, p, coarse, t_end);
    double ratio = rc.residual / rf.residual;
    CHECK(ratio > 1.6);
    CHECK(ratio < 2.4);
}
