#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <stdexcept>
#include <vector>

#include "invheat/field.hpp"
#include "invheat/heat_operator.hpp"
#include "invheat/integrate.hpp"
#include "invheat/sensing.hpp"

namespace invheat {

namespace detail {

struct Observation {
    double t;
    int node0;  // 0-based
    double value;
};

/// Mean-square misfit of the simulated measurements against the observed
/// ones, with the gradient in conductivity space obtained by the discrete
/// adjoint of the RK4 scheme: one forward pass storing every step state,
/// one backward pass re-deriving the stage vectors and accumulating the
/// dA/da products. Cost is a constant multiple of a forward solve,
/// independent of the parameter count.
class MisfitEngine {
public:
    MisfitEngine(Eigen::VectorXd u0, HeatSource f, std::vector<Observation> obs)
        : u0_(std::move(u0)), f_(std::move(f)), obs_(std::move(obs)) {
        if (obs_.empty()) throw std::invalid_argument("MisfitEngine: no observations");
        t_end_ = 0.0;
        for (const auto& o : obs_) t_end_ = std::max(t_end_, o.t);
    }

    double loss(const HeatOperator& A) const {
        auto fine = fine_grid(A);
        Eigen::MatrixXd states = rk4_states(A, u0_, f_, fine);
        return loss_from_states(states, fine);
    }

    double loss_and_grad(const HeatOperator& A, Eigen::VectorXd& grad_a) const {
        auto fine = fine_grid(A);
        Eigen::MatrixXd states = rk4_states(A, u0_, f_, fine);
        const int n = A.size();
        const int S = static_cast<int>(fine.size());
        const double norm = 2.0 / static_cast<double>(obs_.size());

        // residual injections grouped per fine-grid column
        std::vector<std::vector<std::pair<int, double>>> inject(S);
        double loss = 0.0;
        for (const auto& o : obs_) {
            int c = column_of(fine, o.t);
            double r = o.value - states(o.node0, c);
            loss += r * r;
            inject[c].push_back({o.node0, -norm * r});
        }
        loss /= static_cast<double>(obs_.size());

        grad_a = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd lambda = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd k1(n), k2(n), k3(n), tmp(n), kb1(n), kb2(n), kb3(n), kb4(n), Ak(n);
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);

        for (const auto& [node, g] : inject[S - 1]) lambda[node] += g;
        for (int s = S - 1; s >= 1; --s) {
            double t = fine[s - 1];
            double h = fine[s] - fine[s - 1];
            const Eigen::VectorXd u = states.col(s - 1);

            // replay the forward stages from the checkpointed step state
            A.apply(u, k1);
            k1 += f_(t) * ones;
            tmp = u + 0.5 * h * k1;
            A.apply(tmp, k2);
            k2 += f_(t + 0.5 * h) * ones;
            Eigen::VectorXd v3 = u + 0.5 * h * k2;
            A.apply(v3, k3);
            k3 += f_(t + 0.5 * h) * ones;
            Eigen::VectorXd v4 = u + h * k3;
            Eigen::VectorXd v2 = tmp;

            kb4 = (h / 6.0) * lambda;
            A.apply(kb4, Ak);
            kb3 = (h / 3.0) * lambda + h * Ak;
            A.apply(kb3, Ak);
            kb2 = (h / 3.0) * lambda + 0.5 * h * Ak;
            A.apply(kb2, Ak);
            kb1 = (h / 6.0) * lambda + 0.5 * h * Ak;

            A.accumulate_conductivity_grad(kb1, u, grad_a);
            A.accumulate_conductivity_grad(kb2, v2, grad_a);
            A.accumulate_conductivity_grad(kb3, v3, grad_a);
            A.accumulate_conductivity_grad(kb4, v4, grad_a);

            A.apply(kb1 + kb2 + kb3 + kb4, Ak);
            lambda += Ak;
            for (const auto& [node, g] : inject[s - 1]) lambda[node] += g;
        }
        return loss;
    }

private:
    std::vector<double> fine_grid(const HeatOperator& A) const {
        std::vector<double> times;
        times.reserve(obs_.size());
        for (const auto& o : obs_) times.push_back(o.t);
        return build_time_grid(t_end_, accurate_step(A), std::move(times));
    }

    static int column_of(const std::vector<double>& fine, double t) {
        auto it = std::lower_bound(fine.begin(), fine.end(), t - 1e-12);
        if (it == fine.end() || std::fabs(*it - t) > 1e-12)
            throw std::logic_error("MisfitEngine: observation time missing from fine grid");
        return static_cast<int>(it - fine.begin());
    }

    double loss_from_states(const Eigen::MatrixXd& states, const std::vector<double>& fine) const {
        double loss = 0.0;
        for (const auto& o : obs_) {
            double r = o.value - states(o.node0, column_of(fine, o.t));
            loss += r * r;
        }
        return loss / static_cast<double>(obs_.size());
    }

    Eigen::VectorXd u0_;
    HeatSource f_;
    std::vector<Observation> obs_;
    double t_end_;
};

inline std::vector<Observation> to_observations(const MeasurementSet& ms) {
    std::vector<Observation> obs;
    obs.reserve(ms.records.size());
    for (const auto& r : ms.records) obs.push_back({r.t, r.node - 1, r.temperature});
    return obs;
}

}  // namespace detail

/// 1D misfit under the Fourier log-conductivity parameterization.
class InverseProblem1D {
public:
    InverseProblem1D(Grid1D grid, Eigen::VectorXd u0, HeatSource f, const MeasurementSet& observed)
        : grid_(grid), engine_(std::move(u0), std::move(f), detail::to_observations(observed)) {}

    const Grid1D& grid() const { return grid_; }

    double loss(const Eigen::VectorXd& theta) const {
        return engine_.loss(operator_for(theta));
    }

    /// Gradient of the loss in theta, chaining the conductivity-space
    /// adjoint gradient through a = exp(Fourier series).
    Eigen::VectorXd gradient(const Eigen::VectorXd& theta, double* loss_out = nullptr) const {
        Eigen::VectorXd a = eval_fourier_log(theta, grid_);
        Eigen::VectorXd grad_a;
        double l = engine_.loss_and_grad(HeatOperator::assemble_1d(a, grid_), grad_a);
        if (loss_out) *loss_out = l;
        Eigen::VectorXd grad_theta = Eigen::VectorXd::Zero(theta.size());
        for (int p = 0; p < theta.size(); ++p) {
            double s = 0.0;
            for (int j = 0; j < grid_.nodes; ++j)
                s += grad_a[j] * a[j] * fourier_log_basis(p, j * grid_.dx);
            grad_theta[p] = s;
        }
        return grad_theta;
    }

    Eigen::VectorXd conductivity(const Eigen::VectorXd& theta) const {
        return eval_fourier_log(theta, grid_);
    }

private:
    HeatOperator operator_for(const Eigen::VectorXd& theta) const {
        return HeatOperator::assemble_1d(eval_fourier_log(theta, grid_), grid_);
    }

    Grid1D grid_;
    detail::MisfitEngine engine_;
};

/// 2D misfit under the pixel log-conductivity parameterization
/// (theta has J^2 entries, a = exp(theta) elementwise).
class InverseProblem2D {
public:
    InverseProblem2D(Grid2D grid, Eigen::VectorXd u0, HeatSource f, const MeasurementSet& observed)
        : grid_(grid), engine_(std::move(u0), std::move(f), detail::to_observations(observed)) {}

    const Grid2D& grid() const { return grid_; }

    double loss(const Eigen::VectorXd& theta) const {
        return engine_.loss(operator_for(theta));
    }

    Eigen::VectorXd gradient(const Eigen::VectorXd& theta, double* loss_out = nullptr) const {
        Eigen::VectorXd a = theta.array().exp();
        Eigen::VectorXd grad_a;
        double l = engine_.loss_and_grad(operator_for(theta), grad_a);
        if (loss_out) *loss_out = l;
        return grad_a.array() * a.array();
    }

    Eigen::VectorXd conductivity(const Eigen::VectorXd& theta) const {
        return theta.array().exp();
    }

private:
    HeatOperator operator_for(const Eigen::VectorXd& theta) const {
        if (theta.size() != grid_.total_nodes())
            throw std::invalid_argument("InverseProblem2D: theta must have J^2 entries");
        const int J = grid_.nodes_per_axis;
        Eigen::MatrixXd a(J, J);
        for (int i = 0; i < J; ++i)
            for (int j = 0; j < J; ++j) a(i, j) = std::exp(theta[i * J + j]);
        return HeatOperator::assemble_2d(a, grid_);
    }

    Grid2D grid_;
    detail::MisfitEngine engine_;
};

/// ||rec - truth|| / ||truth||; Euclidean over nodes, which is the
/// Frobenius norm for the flattened 2D field.
inline double relative_error(const Eigen::VectorXd& rec, const Eigen::VectorXd& truth) {
    if (rec.size() != truth.size())
        throw std::invalid_argument("relative_error: shape mismatch");
    double denom = truth.norm();
    if (denom == 0.0) throw std::invalid_argument("relative_error: zero-norm truth");
    return (rec - truth).norm() / denom;
}

}  // namespace invheat
