#pragma once

#include "collapsim/errors.hpp"

namespace collapsim {

// Uniform 1-D grid of cells; amplitudes and densities live at cell centers
// x_min + (i + 1/2) dx.
struct Grid1D {
    double x_min = 0.0;
    double dx = 1.0;
    int n_cells = 2;

    Grid1D() = default;
    Grid1D(double x_min_, double dx_, int n_cells_)
        : x_min(x_min_), dx(dx_), n_cells(n_cells_) {
        if (dx <= 0.0) throw NumericalError("Grid1D: dx must be positive");
        if (n_cells < 2) throw NumericalError("Grid1D: need at least 2 cells");
    }

    static Grid1D over(double lo, double hi, int n_cells) {
        return Grid1D(lo, (hi - lo) / n_cells, n_cells);
    }

    double center(int i) const { return x_min + (i + 0.5) * dx; }
    double x_max() const { return x_min + dx * n_cells; }

    bool operator==(const Grid1D&) const = default;
};

} // namespace collapsim
