#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "invheat/heat_operator.hpp"
#include "invheat/integrate.hpp"

namespace invheat {

/// Eigendecomposition of the (symmetric, negative semidefinite) heat
/// operator. Eigenvalues ascend; the null mode lambda = 0 with constant
/// eigenvector sits last. The 1/dx^2 scale is already inside A, so all
/// time constants below read directly as t* = -1/lambda.
struct EigenSystem {
    Eigen::VectorXd lambdas;
    Eigen::MatrixXd vectors;  // columns, orthonormal

    int size() const { return static_cast<int>(lambdas.size()); }
};

inline EigenSystem eigensystem(const HeatOperator& A) {
    Eigen::MatrixXd M = A.dense();
    detail::require_symmetric(M, "eigensystem");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    return {es.eigenvalues(), es.eigenvectors()};
}

/// |t exp(lambda_k t) (e_node^T v_k)(v_k^T u0)| sampled over t_grid. Mode
/// indices are 1-based ascending; the null mode (k = size) yields the
/// all-zero curve.
struct SensitivityCurve {
    int mode;
    std::vector<std::pair<double, double>> samples;
};

inline SensitivityCurve sensitivity_curve(const EigenSystem& es, int k, const Eigen::VectorXd& u0,
                                          int node, const std::vector<double>& t_grid) {
    if (k < 1 || k > es.size()) throw std::invalid_argument("sensitivity_curve: mode out of range");
    if (node < 1 || node > es.size()) throw std::invalid_argument("sensitivity_curve: bad node");
    SensitivityCurve c{k, {}};
    if (k == es.size()) {
        for (double t : t_grid) c.samples.push_back({t, 0.0});
        return c;
    }
    double lam = es.lambdas[k - 1];
    double coeff = es.vectors(node - 1, k - 1) * es.vectors.col(k - 1).dot(u0);
    for (double t : t_grid) c.samples.push_back({t, std::fabs(t * std::exp(lam * t) * coeff)});
    return c;
}

enum class Recoverability { recoverable, degenerate };

/// Degenerate iff the initial condition is spatially constant and the
/// forcing is spatially constant: the dynamics then carry no information
/// about the conductivity.
inline Recoverability check_recoverable(const Eigen::VectorXd& u0, bool f_spatially_constant) {
    bool u0_constant = (u0.maxCoeff() - u0.minCoeff()) < 1e-12;
    return (u0_constant && f_spatially_constant) ? Recoverability::degenerate
                                                 : Recoverability::recoverable;
}

/// State at time t split into conserved mean, accumulated scalar forcing,
/// and decaying transient; the three sum to the spectral-oracle state.
struct EquilibriumSplit {
    Eigen::VectorXd mean_term;
    Eigen::VectorXd forcing_term;
    Eigen::VectorXd transient_term;
};

inline EquilibriumSplit equilibrium_decomposition(const EigenSystem& es, const Eigen::VectorXd& u0,
                                                  const HeatSource& f, double t) {
    const int n = es.size();
    if (u0.size() != n)
        throw std::invalid_argument("equilibrium_decomposition: u0 dimension mismatch");
    EquilibriumSplit sp;
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    sp.mean_term = (u0.sum() / n) * ones;
    sp.forcing_term = f.integral(t) * ones;
    sp.transient_term = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < n - 1; ++j)  // skip the null mode (last, lambda = 0)
        sp.transient_term +=
            std::exp(es.lambdas[j] * t) * es.vectors.col(j) * es.vectors.col(j).dot(u0);
    return sp;
}

/// Per-mode report row: eigenvalue, sensitivity peak time t* = -1/lambda,
/// and the reported high-sensitivity window [0.05 t*, 3 t*].
struct SensitivityReportRow {
    int k;
    double lambda;
    double t_star;     // infinity encoded as 0 for the null mode
    double window_lo;
    double window_hi;
};

inline std::vector<SensitivityReportRow> sensitivity_report(const EigenSystem& es, int max_modes = -1) {
    std::vector<SensitivityReportRow> rows;
    int n = es.size();
    // slowest (closest to zero) non-null modes first, then the null mode row
    int count = (max_modes < 0) ? n - 1 : std::min(max_modes, n - 1);
    for (int r = 0; r < count; ++r) {
        int idx = n - 2 - r;  // ascending order, null mode at n-1
        double lam = es.lambdas[idx];
        double ts = lam < 0.0 ? -1.0 / lam : 0.0;
        rows.push_back({idx + 1, lam, ts, 0.05 * ts, 3.0 * ts});
    }
    rows.push_back({n, es.lambdas[n - 1], 0.0, 0.0, 0.0});
    return rows;
}

inline void write_sensitivity_report(const std::filesystem::path& path,
                                     const std::vector<SensitivityReportRow>& rows) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_sensitivity_report: cannot open " + path.string());
    f << "k, lambda_k, t_star, window_lo, window_hi\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%d, %.17g, %.17g, %.17g, %.17g", r.k, r.lambda, r.t_star,
                      r.window_lo, r.window_hi);
        f << buf << '\n';
    }
}

}  // namespace invheat
