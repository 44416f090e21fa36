#pragma once

#include "collapsim/errors.hpp"

#include <cmath>
#include <complex>

namespace collapsim {

// Two-state amplitude pair c_L |L> + c_R |R> kept as natural-log magnitudes
// plus phases. Branch weights can shrink below double-precision range of the
// raw amplitudes without ever becoming zero, so tails stay assertable.
struct TwoStateVector {
    double log_mag_l = 0.0;
    double log_mag_r = 0.0;
    double phase_l = 0.0;
    double phase_r = 0.0;

    // State with branch weights (x0, 1-x0); log(0) = -inf encodes an exact
    // eigenstate at x0 in {0, 1}.
    static TwoStateVector from_weights(double x0) {
        if (!(x0 >= 0.0 && x0 <= 1.0)) throw NumericalError("from_weights: x0 outside [0,1]");
        TwoStateVector c;
        c.log_mag_l = 0.5 * std::log(x0);
        c.log_mag_r = 0.5 * std::log(1.0 - x0);
        return c;
    }

    // log of the squared norm |c_L|^2 + |c_R|^2, stable for any magnitudes.
    double log_norm_squared() const {
        double a = 2.0 * log_mag_l, b = 2.0 * log_mag_r;
        double m = std::max(a, b);
        if (!std::isfinite(m)) return m; // both zero -> -inf
        return m + std::log(std::exp(a - m) + std::exp(b - m));
    }

    // x = |c_L|^2 / (|c_L|^2 + |c_R|^2), computed as a logistic of the
    // log-magnitude gap; exp saturates to 0 or inf, so x stays in [0,1].
    double branch_fraction() const {
        double d = 2.0 * (log_mag_r - log_mag_l);
        return 1.0 / (1.0 + std::exp(d));
    }

    // log x and log(1-x) without leaving log space.
    double log_x() const { return 2.0 * log_mag_l - log_norm_squared(); }
    double log_one_minus_x() const { return 2.0 * log_mag_r - log_norm_squared(); }

    // Normalized coherence c_L conj(c_R); magnitude sqrt(x(1-x)).
    std::complex<double> coherence() const {
        double mag = std::exp(log_mag_l + log_mag_r - log_norm_squared());
        return std::polar(mag, phase_l - phase_r);
    }

    // Subtracts log_norm_squared()/2 from both magnitudes; returns the log
    // norm that was removed.
    double renormalize() {
        double ln = log_norm_squared();
        log_mag_l -= 0.5 * ln;
        log_mag_r -= 0.5 * ln;
        return ln;
    }
};

} // namespace collapsim
