#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "invheat/heat_operator.hpp"

namespace invheat {

/// Spatially constant external heat source f(t). The running integral
/// int_0^t f is available in closed form for the built-in kinds and by
/// Simpson quadrature for custom ones.
class HeatSource {
public:
    enum class Kind { zero, sin_pi_t, sin_2pi_t, custom };

    HeatSource() : kind_(Kind::zero) {}
    explicit HeatSource(Kind k) : kind_(k) {
        if (k == Kind::custom) throw std::invalid_argument("HeatSource: custom kind needs a function");
    }
    explicit HeatSource(std::function<double(double)> fn) : kind_(Kind::custom), fn_(std::move(fn)) {}

    Kind kind() const { return kind_; }

    double operator()(double t) const {
        switch (kind_) {
            case Kind::zero: return 0.0;
            case Kind::sin_pi_t: return std::sin(std::numbers::pi * t);
            case Kind::sin_2pi_t: return std::sin(2.0 * std::numbers::pi * t);
            case Kind::custom: return fn_(t);
        }
        return 0.0;
    }

    /// int_0^t f(tau) dtau.
    double integral(double t) const {
        switch (kind_) {
            case Kind::zero: return 0.0;
            case Kind::sin_pi_t: return (1.0 - std::cos(std::numbers::pi * t)) / std::numbers::pi;
            case Kind::sin_2pi_t:
                return (1.0 - std::cos(2.0 * std::numbers::pi * t)) / (2.0 * std::numbers::pi);
            case Kind::custom: {
                const int n = 2000;  // composite Simpson, even count
                double h = t / n;
                double s = fn_(0.0) + fn_(t);
                for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * fn_(i * h);
                return s * h / 3.0;
            }
        }
        return 0.0;
    }

private:
    Kind kind_;
    std::function<double(double)> fn_;
};

/// Temperature states at an ascending list of times; one column per time.
struct Trajectory {
    std::vector<double> times;
    Eigen::MatrixXd states;  // rows = grid nodes, cols = times

    /// Index of time t in the grid (exact up to 1e-12), -1 if absent.
    int index_of_time(double t) const {
        auto it = std::lower_bound(times.begin(), times.end(), t - 1e-12);
        if (it == times.end() || std::fabs(*it - t) > 1e-12) return -1;
        return static_cast<int>(it - times.begin());
    }

    void write_csv(const std::filesystem::path& path) const {
        std::ofstream f(path);
        if (!f) throw std::runtime_error("Trajectory::write_csv: cannot open " + path.string());
        f << 't';
        for (int j = 0; j < states.rows(); ++j) f << ", u_" << (j + 1);
        f << '\n';
        char buf[32];
        for (size_t c = 0; c < times.size(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", times[c]);
            f << buf;
            for (int j = 0; j < states.rows(); ++j) {
                std::snprintf(buf, sizeof buf, "%.17g", states(j, static_cast<int>(c)));
                f << ", " << buf;
            }
            f << '\n';
        }
    }
};

/// Explicit-stability step bound for the assembled diffusion operator.
inline double stable_step(const HeatOperator& A) {
    return A.dx() * A.dx() / (4.0 * A.max_conductivity());
}

/// Integration step: the stability bound shrunk by a safety factor so the
/// RK4 truncation error stays below ~1e-6 relative (the fastest modes sit
/// well inside the accuracy region instead of on the stability edge).
inline double accurate_step(const HeatOperator& A) { return 0.1 * stable_step(A); }

/// Ascending time grid from 0 to t_end containing every `required` time,
/// with consecutive gaps at most dt_max. Deterministic construction.
inline std::vector<double> build_time_grid(double t_end, double dt_max,
                                           std::vector<double> required = {}) {
    if (t_end <= 0.0) throw std::invalid_argument("build_time_grid: t_end must be positive");
    required.push_back(0.0);
    required.push_back(t_end);
    std::sort(required.begin(), required.end());
    std::vector<double> anchors;
    for (double t : required) {
        if (t < -1e-12 || t > t_end + 1e-12)
            throw std::invalid_argument("build_time_grid: required time outside [0, t_end]");
        if (anchors.empty() || t - anchors.back() > 1e-12) anchors.push_back(t);
    }
    std::vector<double> grid;
    grid.push_back(anchors.front());
    for (size_t k = 1; k < anchors.size(); ++k) {
        double a = anchors[k - 1], b = anchors[k];
        int n = std::max(1, static_cast<int>(std::ceil((b - a) / dt_max - 1e-12)));
        for (int s = 1; s < n; ++s) grid.push_back(a + (b - a) * s / n);
        grid.push_back(b);
    }
    return grid;
}

/// Classical RK4 over the given fine grid, one step per consecutive pair
/// (the caller guarantees the gaps satisfy the stability bound). Returns
/// the state at every grid time, which the discrete adjoint replays.
inline Eigen::MatrixXd rk4_states(const HeatOperator& A, const Eigen::VectorXd& u0,
                                  const HeatSource& f, const std::vector<double>& grid) {
    if (u0.size() != A.size()) throw std::invalid_argument("rk4_states: u0 dimension mismatch");
    const int n = A.size();
    const int steps = static_cast<int>(grid.size());
    Eigen::MatrixXd states(n, steps);
    states.col(0) = u0;
    Eigen::VectorXd u = u0, k1(n), k2(n), k3(n), k4(n), tmp(n);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    for (int s = 1; s < steps; ++s) {
        double t = grid[s - 1];
        double h = grid[s] - grid[s - 1];
        if (h <= 0.0) throw std::invalid_argument("rk4_states: non-monotone time grid");
        A.apply(u, k1);
        k1 += f(t) * ones;
        tmp = u + 0.5 * h * k1;
        A.apply(tmp, k2);
        k2 += f(t + 0.5 * h) * ones;
        tmp = u + 0.5 * h * k2;
        A.apply(tmp, k3);
        k3 += f(t + 0.5 * h) * ones;
        tmp = u + h * k3;
        A.apply(tmp, k4);
        k4 += f(t + h) * ones;
        u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        states.col(s) = u;
    }
    return states;
}

/// Integrate u' = A u + f(t) 1 from t=0, reporting the state at each time of
/// t_grid (which must start at 0 and ascend). Internally substeps each gap
/// to satisfy the explicit stability bound.
inline Trajectory integrate(const HeatOperator& A, const Eigen::VectorXd& u0, const HeatSource& f,
                            const std::vector<double>& t_grid) {
    if (t_grid.empty() || std::fabs(t_grid.front()) > 1e-12)
        throw std::invalid_argument("integrate: t_grid must start at 0");
    for (size_t k = 1; k < t_grid.size(); ++k)
        if (t_grid[k] <= t_grid[k - 1]) throw std::invalid_argument("integrate: non-monotone t_grid");
    std::vector<double> fine =
        t_grid.size() == 1 ? std::vector<double>{0.0}
                           : build_time_grid(t_grid.back(), accurate_step(A), t_grid);
    Eigen::MatrixXd all = rk4_states(A, u0, f, fine);
    Trajectory traj;
    traj.times = t_grid;
    traj.states.resize(A.size(), static_cast<int>(t_grid.size()));
    for (size_t k = 0; k < t_grid.size(); ++k) {
        auto it = std::lower_bound(fine.begin(), fine.end(), t_grid[k] - 1e-12);
        traj.states.col(static_cast<int>(k)) = all.col(static_cast<int>(it - fine.begin()));
    }
    return traj;
}

namespace detail {
inline void require_symmetric(const Eigen::MatrixXd& M, const char* who) {
    double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw std::invalid_argument(std::string(who) + ": operator is not symmetric");
}
}  // namespace detail

/// Independent solution path: symmetric eigendecomposition plus the closed
/// Duhamel form. The forcing is spatially constant, and A 1 = 0, so the
/// inhomogeneous term reduces to 1 * int_0^t f.
inline Trajectory integrate_spectral_oracle(const HeatOperator& A, const Eigen::VectorXd& u0,
                                            const HeatSource& f, const std::vector<double>& t_grid) {
    if (u0.size() != A.size())
        throw std::invalid_argument("integrate_spectral_oracle: u0 dimension mismatch");
    Eigen::MatrixXd M = A.dense();
    detail::require_symmetric(M, "integrate_spectral_oracle");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    const Eigen::VectorXd& lam = es.eigenvalues();
    const Eigen::MatrixXd& Q = es.eigenvectors();
    Eigen::VectorXd c = Q.transpose() * u0;
    Trajectory traj;
    traj.times = t_grid;
    traj.states.resize(A.size(), static_cast<int>(t_grid.size()));
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(A.size());
    for (size_t k = 0; k < t_grid.size(); ++k) {
        double t = t_grid[k];
        Eigen::VectorXd decayed = (lam.array() * t).exp() * c.array();
        traj.states.col(static_cast<int>(k)) = Q * decayed + f.integral(t) * ones;
    }
    return traj;
}

/// Truncated Fourier-Galerkin trajectory: modes -N..N of the 1D dynamics
/// u_hat' = -4 pi^2 D a_hat(Z) D u_hat + f_hat. Serves as the second
/// independent oracle against the finite-difference path.
struct ModeTrajectory {
    std::vector<double> times;
    Eigen::MatrixXcd modes;  // rows = 2N+1 modes (index n+N), cols = times
    int n_modes;

    /// Evaluate the truncated series at the grid nodes.
    Eigen::MatrixXd to_physical(const Grid1D& g) const {
        Eigen::MatrixXd out(g.nodes, modes.cols());
        for (int j = 0; j < g.nodes; ++j) {
            double x = j * g.dx;
            for (int c = 0; c < modes.cols(); ++c) {
                std::complex<double> s = 0.0;
                for (int n = -n_modes; n <= n_modes; ++n)
                    s += modes(n + n_modes, c) *
                         std::exp(std::complex<double>(0.0, 2.0 * std::numbers::pi * n * x));
                out(j, c) = s.real();
            }
        }
        return out;
    }
};

/// Discrete Fourier coefficient a_hat(k) from the J grid samples.
inline std::complex<double> dft_coefficient(const Eigen::VectorXd& a, int k) {
    const int J = static_cast<int>(a.size());
    std::complex<double> s = 0.0;
    for (int j = 0; j < J; ++j)
        s += a[j] * std::exp(std::complex<double>(0.0, -2.0 * std::numbers::pi * k * j / double(J)));
    return s / double(J);
}

inline ModeTrajectory fourier_galerkin_1d(const Eigen::VectorXd& a, const Grid1D& g,
                                          const Eigen::VectorXcd& u0_hat, const HeatSource& f,
                                          int n_modes, const std::vector<double>& t_grid) {
    if (n_modes < 1) throw std::invalid_argument("fourier_galerkin_1d: need n_modes >= 1");
    if (2 * n_modes + 1 > g.nodes)
        throw std::invalid_argument("fourier_galerkin_1d: too many modes for the grid (aliasing)");
    const int dim = 2 * n_modes + 1;
    if (u0_hat.size() != dim)
        throw std::invalid_argument("fourier_galerkin_1d: u0_hat must have 2*n_modes+1 entries");

    // B(n,m) = -4 pi^2 n m a_hat(n-m); f enters only mode 0.
    Eigen::MatrixXcd B(dim, dim);
    for (int n = -n_modes; n <= n_modes; ++n)
        for (int m = -n_modes; m <= n_modes; ++m)
            B(n + n_modes, m + n_modes) =
                -4.0 * std::numbers::pi * std::numbers::pi * double(n) * double(m) *
                dft_coefficient(a, n - m);

    double lam_bound = 4.0 * std::numbers::pi * std::numbers::pi * n_modes * n_modes * a.maxCoeff();
    double dt_max = 0.5 / std::max(lam_bound, 1e-12);
    std::vector<double> fine = build_time_grid(t_grid.back(), dt_max, t_grid);

    ModeTrajectory mt;
    mt.n_modes = n_modes;
    mt.times = t_grid;
    mt.modes.resize(dim, static_cast<int>(t_grid.size()));

    Eigen::VectorXcd u = u0_hat, k1, k2, k3, k4;
    auto rhs = [&](const Eigen::VectorXcd& v, double t) -> Eigen::VectorXcd {
        Eigen::VectorXcd r = B * v;
        r[n_modes] += f(t);
        return r;
    };
    size_t out = 0;
    auto emit = [&](double t, const Eigen::VectorXcd& v) {
        while (out < t_grid.size() && std::fabs(t_grid[out] - t) <= 1e-12)
            mt.modes.col(static_cast<int>(out++)) = v;
    };
    emit(fine[0], u);
    for (size_t s = 1; s < fine.size(); ++s) {
        double t = fine[s - 1], h = fine[s] - fine[s - 1];
        k1 = rhs(u, t);
        k2 = rhs(u + 0.5 * h * k1, t + 0.5 * h);
        k3 = rhs(u + 0.5 * h * k2, t + 0.5 * h);
        k4 = rhs(u + h * k3, t + h);
        u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        emit(fine[s], u);
    }
    return mt;
}

}  // namespace invheat
