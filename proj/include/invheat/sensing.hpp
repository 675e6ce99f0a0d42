#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "invheat/grid.hpp"
#include "invheat/integrate.hpp"

namespace invheat {

/// Position samples of one sensor at the shared measurement times.
struct SensorPath {
    int sensor_id = 0;
    int dim = 1;
    std::vector<double> times;
    std::vector<Point2> positions;  // y unused in 1D
};

/// Single sensor circulating the unit circle at constant speed, sampled at
/// t_m = m * T / M (t=0 excluded), returning to its start at t = T.
inline SensorPath path_circle_1d(int M, double T_final = 1.0) {
    if (M < 1) throw std::invalid_argument("path_circle_1d: need M >= 1");
    SensorPath p;
    p.sensor_id = 1;
    p.dim = 1;
    for (int m = 1; m <= M; ++m) {
        double t = m * T_final / M;
        p.times.push_back(t);
        p.positions.push_back({wrap_unit(t / T_final), 0.0});
    }
    return p;
}

namespace detail {
/// Point on the axis-aligned square [cx-h, cx+h] x [cy-h, cy+h] at arc
/// length `arc` from the top-left corner, traversed down the left edge
/// first (counterclockwise).
inline Point2 square_orbit_point(double h, double arc) {
    const double side = 2.0 * h;
    const double per = 4.0 * side;
    arc = std::fmod(arc, per);
    if (arc < 0) arc += per;
    const double cx = 0.5, cy = 0.5;
    if (arc < side) return {cx - h, cy + h - arc};                 // left edge, downward
    if (arc < 2 * side) return {cx - h + (arc - side), cy - h};    // bottom edge, rightward
    if (arc < 3 * side) return {cx + h, cy - h + (arc - 2 * side)};  // right edge, upward
    return {cx + h - (arc - 3 * side), cy + h};                    // top edge, leftward
}
}  // namespace detail

/// Four sensors on concentric square orbits of side 1/5..4/5 centered at
/// (1/2, 1/2); sensor k (innermost = 1) completes 2^(4-k) cycles by t=1,
/// starting at its top-left corner. Sampled at t_m = m / M.
inline std::vector<SensorPath> path_orbits_2d(int M) {
    if (M < 1) throw std::invalid_argument("path_orbits_2d: need M >= 1");
    std::vector<SensorPath> paths;
    for (int k = 1; k <= 4; ++k) {
        double h = k / 10.0;
        double per = 8.0 * h;
        int cycles = 1 << (4 - k);
        SensorPath p;
        p.sensor_id = k;
        p.dim = 2;
        for (int m = 1; m <= M; ++m) {
            double t = static_cast<double>(m) / M;
            p.times.push_back(t);
            p.positions.push_back(detail::square_orbit_point(h, per * cycles * t));
        }
        paths.push_back(std::move(p));
    }
    return paths;
}

/// K static sensors on the equidistant lattice ((i-1)/sqrt(K), (j-1)/sqrt(K)).
/// sqrt(K) must divide the grid size so the lattice lands on nodes exactly.
inline std::vector<SensorPath> path_static_grid_2d(int K, int M, int grid_nodes_per_axis) {
    int root = static_cast<int>(std::lround(std::sqrt(double(K))));
    if (root * root != K) throw std::invalid_argument("path_static_grid_2d: K must be a perfect square");
    if (grid_nodes_per_axis % root != 0)
        throw std::invalid_argument("path_static_grid_2d: sqrt(K) must divide the grid size");
    std::vector<SensorPath> paths;
    int id = 1;
    for (int i = 1; i <= root; ++i) {
        for (int j = 1; j <= root; ++j) {
            SensorPath p;
            p.sensor_id = id++;
            p.dim = 2;
            Point2 pos{(i - 1) / double(root), (j - 1) / double(root)};
            for (int m = 1; m <= M; ++m) {
                p.times.push_back(static_cast<double>(m) / M);
                p.positions.push_back(pos);
            }
            paths.push_back(std::move(p));
        }
    }
    return paths;
}

struct MeasurementRecord {
    int sensor_id;
    double t;
    double x;
    double y;      // NaN-free: 0 and unused in 1D
    int node;      // 1-based flat index of the snapped node
    double temperature;
};

struct MeasurementSet {
    int dim = 1;
    std::vector<MeasurementRecord> records;

    void write_csv(const std::filesystem::path& path) const {
        std::ofstream f(path);
        if (!f) throw std::runtime_error("MeasurementSet::write_csv: cannot open " + path.string());
        f << "sensor_id, t, x, y, node, temperature\n";
        char buf[128];
        for (const auto& r : records) {
            if (dim == 1)
                std::snprintf(buf, sizeof buf, "%d, %.17g, %.17g, , %d, %.17g", r.sensor_id, r.t,
                              r.x, r.node, r.temperature);
            else
                std::snprintf(buf, sizeof buf, "%d, %.17g, %.17g, %.17g, %d, %.17g", r.sensor_id,
                              r.t, r.x, r.y, r.node, r.temperature);
            f << buf << '\n';
        }
    }

    static MeasurementSet read_csv(const std::filesystem::path& path) {
        std::ifstream f(path);
        if (!f) throw std::runtime_error("MeasurementSet::read_csv: cannot open " + path.string());
        MeasurementSet ms;
        std::string line;
        std::getline(f, line);  // header
        bool any_y = false;
        while (std::getline(f, line)) {
            if (line.empty()) continue;
            std::stringstream ss(line);
            std::string cell;
            std::vector<std::string> cells;
            while (std::getline(ss, cell, ',')) cells.push_back(cell);
            if (cells.size() != 6) throw std::runtime_error("MeasurementSet::read_csv: bad row");
            MeasurementRecord r;
            r.sensor_id = std::stoi(cells[0]);
            r.t = std::stod(cells[1]);
            r.x = std::stod(cells[2]);
            std::string ys = cells[3];
            ys.erase(std::remove_if(ys.begin(), ys.end(), ::isspace), ys.end());
            r.y = ys.empty() ? 0.0 : std::stod(ys);
            if (!ys.empty()) any_y = true;
            r.node = std::stoi(cells[4]);
            r.temperature = std::stod(cells[5]);
            ms.records.push_back(r);
        }
        ms.dim = any_y ? 2 : 1;
        return ms;
    }
};

namespace detail {
template <typename GridT>
inline int snapped_flat_index(const Point2& p, const GridT& g) {
    if constexpr (std::is_same_v<GridT, Grid1D>) {
        return snap_to_grid(p.x, g);
    } else {
        Node2 n = snap_to_grid(p, g);
        return g.flat_index(n.i, n.j);
    }
}

template <typename GridT>
inline MeasurementSet measure_impl(const Trajectory& traj, const std::vector<SensorPath>& paths,
                                   const GridT& g, double noise_sd, std::uint64_t seed) {
    MeasurementSet ms;
    ms.dim = std::is_same_v<GridT, Grid1D> ? 1 : 2;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (const auto& path : paths) {
        for (size_t m = 0; m < path.times.size(); ++m) {
            double t = path.times[m];
            int col = traj.index_of_time(t);
            if (col < 0)
                throw std::invalid_argument("measure: measurement time missing from trajectory");
            int node = snapped_flat_index(path.positions[m], g);
            double temp = traj.states(node - 1, col);
            if (noise_sd > 0.0) temp += noise_sd * gauss(rng);
            ms.records.push_back({path.sensor_id, t, path.positions[m].x, path.positions[m].y,
                                  node, temp});
        }
    }
    return ms;
}
}  // namespace detail

/// Extract the snapped-node temperature at each sensor sample, optionally
/// with seeded additive Gaussian noise on the temperature only.
inline MeasurementSet measure(const Trajectory& traj, const std::vector<SensorPath>& paths,
                              const Grid1D& g, double noise_sd = 0.0, std::uint64_t seed = 0) {
    return detail::measure_impl(traj, paths, g, noise_sd, seed);
}

inline MeasurementSet measure(const Trajectory& traj, const std::vector<SensorPath>& paths,
                              const Grid2D& g, double noise_sd = 0.0, std::uint64_t seed = 0) {
    return detail::measure_impl(traj, paths, g, noise_sd, seed);
}

}  // namespace invheat
