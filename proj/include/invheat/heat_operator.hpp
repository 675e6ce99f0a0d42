#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "invheat/grid.hpp"

namespace invheat {

/// Semi-discrete divergence-form heat operator A(a) on the periodic grid.
/// 1D: tridiagonal plus wrap corners; 2D: five-point stencil on the torus,
/// flattened row-major ((i-1)*J + j). Symmetric with zero row sums by
/// construction. Stored as the conductivity stencil, never densified except
/// on request, so matrix-vector products stay O(grid size).
class HeatOperator {
public:
    static HeatOperator assemble_1d(const Eigen::VectorXd& a, const Grid1D& g) {
        if (a.size() != g.nodes)
            throw std::invalid_argument("assemble_1d: conductivity length != grid nodes");
        if ((a.array() <= 0.0).any())
            throw std::invalid_argument("assemble_1d: conductivity must be strictly positive");
        HeatOperator op;
        op.dim_ = 1;
        op.axis_nodes_ = g.nodes;
        op.dx_ = g.dx;
        op.a_ = a;
        return op;
    }

    static HeatOperator assemble_2d(const Eigen::MatrixXd& a, const Grid2D& g) {
        const int J = g.nodes_per_axis;
        if (a.rows() != J || a.cols() != J)
            throw std::invalid_argument("assemble_2d: conductivity shape != grid");
        if ((a.array() <= 0.0).any())
            throw std::invalid_argument("assemble_2d: conductivity must be strictly positive");
        HeatOperator op;
        op.dim_ = 2;
        op.axis_nodes_ = J;
        op.dx_ = g.dx;
        op.a_.resize(J * J);
        for (int i = 0; i < J; ++i)
            for (int j = 0; j < J; ++j) op.a_[i * J + j] = a(i, j);
        return op;
    }

    int dim() const { return dim_; }
    int size() const { return dim_ == 1 ? axis_nodes_ : axis_nodes_ * axis_nodes_; }
    int axis_nodes() const { return axis_nodes_; }
    double dx() const { return dx_; }
    const Eigen::VectorXd& conductivity() const { return a_; }
    double max_conductivity() const { return a_.maxCoeff(); }

    /// out = A u (stencil application, periodic wrap).
    void apply(const Eigen::VectorXd& u, Eigen::VectorXd& out) const {
        if (u.size() != size()) throw std::invalid_argument("HeatOperator::apply: dimension mismatch");
        const double inv_dx2 = 1.0 / (dx_ * dx_);
        const int J = axis_nodes_;
        out.resize(size());
        if (dim_ == 1) {
            for (int j = 0; j < J; ++j) {
                int jp = (j + 1) % J;
                int jm = (j + J - 1) % J;
                out[j] = (a_[j] * (u[jp] - u[j]) - a_[jm] * (u[j] - u[jm])) * inv_dx2;
            }
        } else {
            for (int i = 0; i < J; ++i) {
                int ip = (i + 1) % J;
                int im = (i + J - 1) % J;
                for (int j = 0; j < J; ++j) {
                    int jp = (j + 1) % J;
                    int jm = (j + J - 1) % J;
                    int n = i * J + j;
                    double uc = u[n];
                    out[n] = (a_[n] * (u[ip * J + j] - uc) - a_[im * J + j] * (uc - u[im * J + j]) +
                              a_[n] * (u[i * J + jp] - uc) - a_[i * J + jm] * (uc - u[i * J + jm])) *
                             inv_dx2;
                }
            }
        }
    }

    Eigen::VectorXd apply(const Eigen::VectorXd& u) const {
        Eigen::VectorXd out;
        apply(u, out);
        return out;
    }

    Eigen::MatrixXd dense() const {
        const int n = size();
        Eigen::MatrixXd M(n, n);
        Eigen::VectorXd e = Eigen::VectorXd::Zero(n), col;
        for (int j = 0; j < n; ++j) {
            e[j] = 1.0;
            apply(e, col);
            M.col(j) = col;
            e[j] = 0.0;
        }
        return M;
    }

    /// Accumulate kbar^T (dA/da) v into grad (conductivity space). A is
    /// linear in a; each a entry couples exactly the stencil edges it sits
    /// on, giving the local products below.
    void accumulate_conductivity_grad(const Eigen::VectorXd& kbar, const Eigen::VectorXd& v,
                                      Eigen::VectorXd& grad) const {
        const double inv_dx2 = 1.0 / (dx_ * dx_);
        const int J = axis_nodes_;
        if (dim_ == 1) {
            for (int j = 0; j < J; ++j) {
                int jp = (j + 1) % J;
                grad[j] += (kbar[j] - kbar[jp]) * (v[jp] - v[j]) * inv_dx2;
            }
        } else {
            for (int i = 0; i < J; ++i) {
                int ip = (i + 1) % J;
                for (int j = 0; j < J; ++j) {
                    int jp = (j + 1) % J;
                    int n = i * J + j;
                    grad[n] += ((kbar[n] - kbar[ip * J + j]) * (v[ip * J + j] - v[n]) +
                                (kbar[n] - kbar[i * J + jp]) * (v[i * J + jp] - v[n])) *
                               inv_dx2;
                }
            }
        }
    }

private:
    int dim_ = 1;
    int axis_nodes_ = 0;
    double dx_ = 0.0;
    Eigen::VectorXd a_;  // 2D flattened row-major (x index major)
};

}  // namespace invheat
