#include <doctest.h>

#include "collapsim/noise.hpp"
#include "collapsim/rng.hpp"
#include "collapsim/two_state.hpp"
#include "collapsim/wavefunction.hpp"

#include <cmath>
#include <complex>

using namespace collapsim;

namespace {

WaveFunction random_state(RngStream& rng, const Grid1D& g, Sector sector) {
    WaveFunction psi(g, sector);
    if (sector == Sector::OneParticle) {
        for (int i = 0; i < g.n_cells; ++i)
            psi.at(i) = {rng.normal(), rng.normal()};
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

TEST_CASE("rng streams are bit-reproducible and distinct") {
    RngStream a(42, 7), b(42, 7), c(42, 8);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 1000; ++i) {
        auto va = a.next_u64();
        if (va != b.next_u64()) all_equal = false;
        if (va != c.next_u64()) any_diff = true;
    }
    CHECK(all_equal);
    CHECK(any_diff);

    RngStream d(42, 7);
    RngStream e(42, 7);
    for (int i = 0; i < 100; ++i) CHECK(d.normal() == e.normal());
}

TEST_CASE("normalize: idempotent, scale invariant, ratio preserving") {
    Grid1D g = Grid1D::over(-10.0, 10.0, 128);
    RngStream rng(1);

    for (int rep = 0; rep < 10; ++rep) {
        WaveFunction psi = random_state(rng, g, Sector::OneParticle);
        CHECK(psi.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
        WaveFunction again = normalized(psi);
        for (int i = 0; i < g.n_cells; ++i)
            CHECK(std::abs(again.at(i) - psi.at(i)) < 1e-13);

        WaveFunction scaled = psi;
        for (auto& a : scaled.amplitudes()) a *= 3.0;
        scaled.normalize();
        for (int i = 0; i < g.n_cells; ++i)
            CHECK(std::abs(scaled.at(i) - psi.at(i)) < 1e-13);
    }

    // two-packet weights stay in ratio 3:7; oracle is direct summation over
    // the two halves of the grid
    WaveFunction pair(g, Sector::OneParticle);
    WaveFunction l = WaveFunction::gaussian_packet(g, -5.0, 0.5);
    WaveFunction r = WaveFunction::gaussian_packet(g, 5.0, 0.5);
    for (int i = 0; i < g.n_cells; ++i)
        pair.at(i) = 2.0 * (std::sqrt(0.3) * l.at(i) + std::sqrt(0.7) * r.at(i));
    pair.normalize();
    double wl = interval_weight(pair, -10.0, 0.0);
    double wr = interval_weight(pair, 0.0, 10.0);
    CHECK(wl == doctest::Approx(0.3).epsilon(1e-9));
    CHECK(wr == doctest::Approx(0.7).epsilon(1e-9));

    WaveFunction zero(g, Sector::OneParticle);
    CHECK_THROWS_AS(zero.normalize(), ZeroNorm);
}

TEST_CASE("two-particle amplitudes stay exactly symmetric") {
    Grid1D g = Grid1D::over(-4.0, 4.0, 32);
    RngStream rng(3);
    WaveFunction psi = random_state(rng, g, Sector::TwoParticle);
    psi.normalize();
    for (int i = 0; i < g.n_cells; ++i)
        for (int j = 0; j < g.n_cells; ++j)
            CHECK(psi.at(i, j) == psi.at(j, i));

    WaveFunction p1 = WaveFunction::gaussian_packet(g, -2.0, 0.4);
    WaveFunction p2 = WaveFunction::gaussian_packet(g, 2.0, 0.4);
    WaveFunction sym = WaveFunction::symmetrized_product(p1, p2);
    for (int i = 0; i < g.n_cells; ++i)
        for (int j = 0; j < g.n_cells; ++j)
            CHECK(sym.at(i, j) == sym.at(j, i));
}

TEST_CASE("noise: law of large numbers and variance convention") {
    Grid1D g(0.0, 1.0, 100);
    NoiseSpec spec{g, 0.01, 1000, 1.0};
    CHECK(spec.variance_per_cell() == doctest::Approx(100.0)); // lambda/(dx dt)

    RngStream rng(11);
    NoiseField field = NoiseField::sample(spec, rng);
    double sum = 0.0, sum2 = 0.0;
    std::size_t n = field.values().size();
    for (double v : field.values()) {
        sum += v;
        sum2 += v * v;
    }
    double mean = sum / static_cast<double>(n);
    double var = sum2 / static_cast<double>(n) - mean * mean;
    double sigma = std::sqrt(spec.variance_per_cell());
    CHECK(std::abs(mean) < 4.0 * sigma / std::sqrt(static_cast<double>(n)));
    CHECK(var == doctest::Approx(spec.variance_per_cell()).epsilon(0.05));

    // constant drift 2 lambda <A>: empirical-moment oracle
    std::vector<double> drift(static_cast<std::size_t>(g.n_cells), 2.0 * 1.0 * 0.75);
    NoiseField cooked = NoiseField::sample(spec, rng, &drift);
    double msum = 0.0;
    for (double v : cooked.values()) msum += v;
    double cm = msum / static_cast<double>(cooked.values().size());
    CHECK(std::abs(cm - 1.5) < 4.0 * sigma / std::sqrt(static_cast<double>(n)));

    // same (seed, stream) reproduces the realization bit-for-bit
    RngStream r1(5, 3), r2(5, 3);
    NoiseField f1 = NoiseField::sample(spec, r1);
    NoiseField f2 = NoiseField::sample(spec, r2);
    CHECK(f1.values() == f2.values());
}

TEST_CASE("two-state vector: log representation") {
    TwoStateVector c = TwoStateVector::from_weights(0.3);
    CHECK(c.branch_fraction() == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(std::exp(c.log_x()) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(std::exp(c.log_one_minus_x()) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(std::abs(c.coherence()) == doctest::Approx(std::sqrt(0.21)).epsilon(1e-12));

    // extreme log gap: x saturates but stays in [0,1] and logs stay finite
    c.log_mag_l = -500.0;
    c.log_mag_r = 0.0;
    CHECK(c.branch_fraction() == 0.0);
    CHECK(std::isfinite(c.log_x()));
    CHECK(c.log_x() == doctest::Approx(-1000.0));

    TwoStateVector pure = TwoStateVector::from_weights(1.0);
    CHECK(pure.branch_fraction() == 1.0);
    CHECK(pure.log_norm_squared() == doctest::Approx(0.0));
}
