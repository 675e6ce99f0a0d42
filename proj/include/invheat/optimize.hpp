#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "invheat/inverse.hpp"

namespace invheat {

struct GDConfig {
    double gamma = 20.0;               // step size (1D default; 2D presets override)
    double epsilon = 1e-7;             // gradient-norm^2 threshold for mode expansion (1D)
    int max_epoch = 500;
    int max_frequency = 9;             // caps dim theta at 2N+1 in 1D
    double initial_log_conductivity = std::log(1e-2);
};

struct HistoryRow {
    int epoch;
    int dim_theta;
    double loss;
    double relative_error;
    double grad_norm2;
};

struct OptimizerResult {
    Eigen::VectorXd theta;
    std::vector<HistoryRow> history;
};

inline void write_training_log(const std::filesystem::path& path,
                               const std::vector<HistoryRow>& history) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_training_log: cannot open " + path.string());
    f << "epoch, dim_theta, loss, relative_error, grad_norm2\n";
    char buf[160];
    for (const auto& r : history) {
        std::snprintf(buf, sizeof buf, "%d, %d, %.17g, %.17g, %.17g", r.epoch, r.dim_theta, r.loss,
                      r.relative_error, r.grad_norm2);
        f << buf << '\n';
    }
}

/// Adaptive Fourier-series gradient descent over the 1D log-conductivity
/// coefficients: each epoch either appends one zero coefficient (when the
/// squared gradient norm stalls below epsilon and the frequency cap allows)
/// or takes one plain descent step. Runs exactly max_epoch epochs.
inline OptimizerResult adaptive_fs_gd(const GDConfig& cfg, const InverseProblem1D& problem,
                                      const Eigen::VectorXd& a_truth) {
    Eigen::VectorXd theta(1);
    theta[0] = cfg.initial_log_conductivity;
    const int cap = 2 * cfg.max_frequency + 1;

    OptimizerResult res;
    for (int epoch = 1; epoch <= cfg.max_epoch; ++epoch) {
        double loss = 0.0;
        Eigen::VectorXd g = problem.gradient(theta, &loss);
        double gn2 = g.squaredNorm();
        double err = relative_error(problem.conductivity(theta), a_truth);
        res.history.push_back({epoch, static_cast<int>(theta.size()), loss, err, gn2});

        if (gn2 < cfg.epsilon && theta.size() < cap) {
            Eigen::VectorXd widened(theta.size() + 1);
            widened << theta, 0.0;
            theta = std::move(widened);
        } else {
            theta -= cfg.gamma * g;
        }
    }
    res.theta = theta;
    return res;
}

/// Plain gradient descent over the 2D pixel log-conductivity.
inline OptimizerResult gd_2d(const GDConfig& cfg, const InverseProblem2D& problem,
                             const Eigen::VectorXd& a_truth_flat) {
    Eigen::VectorXd theta = Eigen::VectorXd::Constant(problem.grid().total_nodes(),
                                                      cfg.initial_log_conductivity);
    OptimizerResult res;
    for (int epoch = 1; epoch <= cfg.max_epoch; ++epoch) {
        double loss = 0.0;
        Eigen::VectorXd g = problem.gradient(theta, &loss);
        double err = relative_error(problem.conductivity(theta), a_truth_flat);
        res.history.push_back({epoch, static_cast<int>(theta.size()), loss, err, g.squaredNorm()});
        theta -= cfg.gamma * g;
    }
    res.theta = theta;
    return res;
}

}  // namespace invheat
