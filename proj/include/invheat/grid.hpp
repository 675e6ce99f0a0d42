#pragma once

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace invheat {

/// Reduce a coordinate into the representative interval [0,1) of the torus.
inline double wrap_unit(double v) {
    double r = v - std::floor(v);
    if (r >= 1.0) r = 0.0;  // guards v = -eps rounding up
    return r;
}

/// Wrap-around distance between two points on the unit circle.
inline double periodic_distance(double p, double q) {
    double d = std::fabs(wrap_unit(p) - wrap_unit(q));
    return std::min(d, 1.0 - d);
}

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

/// Per-axis wrap distances; sum gives the Manhattan metric, max the Chebyshev one.
inline Point2 periodic_distance(const Point2& p, const Point2& q) {
    return {periodic_distance(p.x, q.x), periodic_distance(p.y, q.y)};
}

/// Uniform periodic discretization of the unit circle. Node j (1-based)
/// sits at (j-1)*dx; node J wraps around to node 1.
struct Grid1D {
    int nodes;
    double dx;

    explicit Grid1D(int J) : nodes(J), dx(1.0 / J) {
        if (J < 3) throw std::invalid_argument("Grid1D: need at least 3 nodes");
    }

    double node_x(int j) const { return (j - 1) * dx; }
};

/// Uniform periodic discretization of the unit torus, same spacing on
/// both axes. Node (i,j) flattens to (i-1)*J + j, 1-based.
struct Grid2D {
    int nodes_per_axis;
    double dx;

    explicit Grid2D(int J) : nodes_per_axis(J), dx(1.0 / J) {
        if (J < 3) throw std::invalid_argument("Grid2D: need at least 3 nodes per axis");
    }

    double node_x(int i) const { return (i - 1) * dx; }
    double node_y(int j) const { return (j - 1) * dx; }
    int flat_index(int i, int j) const { return (i - 1) * nodes_per_axis + j; }
    int total_nodes() const { return nodes_per_axis * nodes_per_axis; }
};

namespace detail {
// Nearest node on one periodic axis, 0-based. Equidistant ties go to the
// node below p, which keeps the wrap tie (between node J and node 1) on
// node J as well as interior ties on the lower index.
inline int snap_axis(double p, int J) {
    p = wrap_unit(p);
    double scaled = p * J;
    int lo = static_cast<int>(std::floor(scaled));
    if (lo >= J) lo = J - 1;
    double frac = scaled - lo;
    int j = (frac <= 0.5) ? lo : lo + 1;
    return j % J;
}
}  // namespace detail

/// Index (1-based) of the grid node nearest to p under wrap distance.
inline int snap_to_grid(double p, const Grid1D& g) {
    return detail::snap_axis(p, g.nodes) + 1;
}

struct Node2 {
    int i;  // x index, 1-based
    int j;  // y index, 1-based
};

/// Per-axis independent snapping on the torus.
inline Node2 snap_to_grid(const Point2& p, const Grid2D& g) {
    return {detail::snap_axis(p.x, g.nodes_per_axis) + 1,
            detail::snap_axis(p.y, g.nodes_per_axis) + 1};
}

}  // namespace invheat
