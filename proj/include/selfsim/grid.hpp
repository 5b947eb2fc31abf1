#pragma once

#include <stdexcept>
#include <vector>

namespace selfsim {

/// Uniform node-centered mesh on [0, L] with N cells (N+1 nodes).
struct Grid1D {
    double length = 0.0;
    int cells = 0;
    double spacing = 0.0;

    int nodes() const { return cells + 1; }
    double xi(int i) const { return i * spacing; }

    bool operator==(const Grid1D&) const = default;
};

inline Grid1D make_grid(double length, int cells) {
    if (!(length > 0.0)) {
        throw std::invalid_argument("grid length must be positive");
    }
    if (cells < 16) {
        throw std::invalid_argument("grid must have at least 16 cells");
    }
    return Grid1D{length, cells, length / cells};
}

/// Nodal values of theta at a fixed time tau.
struct FieldState {
    Grid1D grid;
    std::vector<double> theta;
    double tau = 0.0;
};

} // namespace selfsim
