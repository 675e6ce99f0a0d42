#include <catch2/catch_amalgamated.hpp>

#include <numbers>
#include <random>

#include "invheat/field.hpp"
#include "invheat/integrate.hpp"

using namespace invheat;
using std::numbers::pi;

namespace {
Eigen::VectorXd sin_2pix(int J) {
    Eigen::VectorXd u(J);
    for (int j = 0; j < J; ++j) u[j] = std::sin(2.0 * pi * j / double(J));
    return u;
}

Eigen::VectorXd random_positive(int n, std::mt19937& rng, double lo = 0.005, double hi = 0.03) {
    std::uniform_real_distribution<double> unif(lo, hi);
    Eigen::VectorXd a(n);
    for (int i = 0; i < n; ++i) a[i] = unif(rng);
    return a;
}
}  // namespace

TEST_CASE("constant conductivity decays sin(2 pi x) as a pure exponential") {
    const int J = 100;
    const double c = 0.01;
    Grid1D g(J);
    HeatOperator A = HeatOperator::assemble_1d(Eigen::VectorXd::Constant(J, c), g);
    Eigen::VectorXd u0 = sin_2pix(J);

    // u0 is an exact eigenvector of the circulant operator
    double mu = 2.0 * c * (std::cos(2.0 * pi * g.dx) - 1.0) / (g.dx * g.dx);
    CHECK((A.apply(u0) - mu * u0).norm() < 1e-9 * u0.norm());

    Trajectory traj = integrate(A, u0, HeatSource(), {0.0, 0.1, 0.5, 1.0});
    for (int k = 1; k < 4; ++k) {
        double t = traj.times[k];
        Eigen::VectorXd expect = std::exp(mu * t) * u0;
        CHECK((traj.states.col(k) - expect).norm() / expect.norm() < 1e-6);
    }
}

TEST_CASE("constant initial state under sin(pi t) forcing stays constant") {
    Grid1D g(20);
    std::mt19937 rng(2);
    HeatOperator A = HeatOperator::assemble_1d(random_positive(20, rng), g);
    Eigen::VectorXd u0 = Eigen::VectorXd::Constant(20, 3.0);
    Trajectory traj = integrate(A, u0, HeatSource(HeatSource::Kind::sin_pi_t), {0.0, 0.3, 0.7, 1.0});
    for (size_t k = 0; k < traj.times.size(); ++k) {
        double t = traj.times[k];
        double expect = 3.0 + (1.0 - std::cos(pi * t)) / pi;
        for (int j = 0; j < 20; ++j)
            CHECK(traj.states(j, static_cast<int>(k)) == Catch::Approx(expect).margin(1e-9));
    }
}

TEST_CASE("zero forcing conserves the spatial mean") {
    std::mt19937 rng(3);
    Grid1D g(30);
    HeatOperator A = HeatOperator::assemble_1d(random_positive(30, rng), g);
    Eigen::VectorXd u0(30);
    std::normal_distribution<double> gauss;
    for (int j = 0; j < 30; ++j) u0[j] = gauss(rng);
    Trajectory traj = integrate(A, u0, HeatSource(), {0.0, 0.25, 0.5, 1.0});
    double m0 = u0.mean();
    for (int k = 0; k < 4; ++k) CHECK(std::fabs(traj.states.col(k).mean() - m0) < 1e-10);
}

TEST_CASE("spatially constant forcing shifts the mean by its integral") {
    std::mt19937 rng(4);
    Grid1D g(25);
    HeatOperator A = HeatOperator::assemble_1d(random_positive(25, rng), g);
    Eigen::VectorXd u0(25);
    std::normal_distribution<double> gauss;
    for (int j = 0; j < 25; ++j) u0[j] = gauss(rng);
    HeatSource f(HeatSource::Kind::sin_2pi_t);
    Trajectory traj = integrate(A, u0, f, {0.0, 0.4, 0.9});
    for (size_t k = 0; k < traj.times.size(); ++k)
        CHECK(traj.states.col(static_cast<int>(k)).mean() ==
              Catch::Approx(u0.mean() + f.integral(traj.times[k])).margin(1e-9));
}

TEST_CASE("RK4 and spectral Duhamel agree on random problems") {
    std::mt19937 rng(5);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 12; ++trial) {
        int J = 8 + static_cast<int>(rng() % 25);
        Grid1D g(J);
        HeatOperator A = HeatOperator::assemble_1d(random_positive(J, rng), g);
        Eigen::VectorXd u0(J);
        for (int j = 0; j < J; ++j) u0[j] = gauss(rng);
        HeatSource f(trial % 2 ? HeatSource::Kind::sin_pi_t : HeatSource::Kind::zero);
        std::vector<double> times{0.0, 0.2, 0.6, 1.0};
        Trajectory rk = integrate(A, u0, f, times);
        Trajectory sp = integrate_spectral_oracle(A, u0, f, times);
        for (int k = 1; k < 4; ++k)
            CHECK((rk.states.col(k) - sp.states.col(k)).norm() <=
                  1e-6 * std::max(1.0, sp.states.col(k).norm()));
    }
}

TEST_CASE("spectral oracle exposes the null mode and nonpositive spectrum") {
    std::mt19937 rng(6);
    Grid1D g(16);
    HeatOperator A = HeatOperator::assemble_1d(random_positive(16, rng), g);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A.dense());
    CHECK(es.eigenvalues().maxCoeff() == Catch::Approx(0.0).margin(1e-9));
    CHECK(es.eigenvalues().minCoeff() < 0.0);
    Eigen::VectorXd v = es.eigenvectors().col(15);
    Eigen::VectorXd expect = Eigen::VectorXd::Constant(16, 1.0 / 4.0);
    CHECK(std::min((v - expect).norm(), (v + expect).norm()) < 1e-8);
}

TEST_CASE("dissipativity: centered norm is non-increasing without forcing") {
    std::mt19937 rng(7);
    Grid1D g(40);
    HeatOperator A = HeatOperator::assemble_1d(random_positive(40, rng), g);
    Eigen::VectorXd u0(40);
    std::normal_distribution<double> gauss;
    for (int j = 0; j < 40; ++j) u0[j] = gauss(rng);
    std::vector<double> times;
    for (int k = 0; k <= 20; ++k) times.push_back(k * 0.05);
    Trajectory traj = integrate(A, u0, HeatSource(), times);
    double mean0 = u0.mean();
    double prev = 1e300;
    for (size_t k = 0; k < times.size(); ++k) {
        double n = (traj.states.col(static_cast<int>(k)).array() - mean0).matrix().norm();
        CHECK(n <= prev + 1e-12);
        prev = n;
    }
}

TEST_CASE("empirical Lipschitz dependence of the solution on conductivity") {
    std::mt19937 rng(8);
    Grid1D g(50);
    Eigen::VectorXd a = random_positive(50, rng, 0.01, 0.02);
    Eigen::VectorXd u0 = sin_2pix(50);
    HeatSource f(HeatSource::Kind::sin_pi_t);
    std::vector<double> times;
    for (int k = 0; k <= 10; ++k) times.push_back(k * 0.1);
    Trajectory base = integrate(HeatOperator::assemble_1d(a, g), u0, f, times);

    std::normal_distribution<double> gauss;
    Eigen::VectorXd direction(50);
    for (int j = 0; j < 50; ++j) direction[j] = gauss(rng);
    direction /= direction.cwiseAbs().maxCoeff();

    double ratio_min = 1e300, ratio_max = 0.0;
    for (double eps : {1e-4, 3e-4, 1e-3, 3e-3, 1e-2}) {
        Eigen::VectorXd b = a + eps * a.cwiseAbs().maxCoeff() * direction;
        Trajectory pert = integrate(HeatOperator::assemble_1d(b, g), u0, f, times);
        double diff_l2l2 = (pert.states - base.states).norm() * std::sqrt(g.dx * 0.1);
        double ratio = diff_l2l2 / (b - a).cwiseAbs().maxCoeff();
        ratio_min = std::min(ratio_min, ratio);
        ratio_max = std::max(ratio_max, ratio);
    }
    CHECK(ratio_max / ratio_min < 10.0);
}

TEST_CASE("Fourier-Galerkin oracle: constant conductivity decouples the modes") {
    const int J = 64, N = 8;
    const double c = 0.012;
    Grid1D g(J);
    Eigen::VectorXcd u0_hat = Eigen::VectorXcd::Zero(2 * N + 1);
    // u0 = sin(2 pi x): u_hat(0) = -(i/2)(e_1 - e_{-1})
    u0_hat[N + 1] = std::complex<double>(0.0, -0.5);
    u0_hat[N - 1] = std::complex<double>(0.0, 0.5);
    std::vector<double> times{0.0, 0.5, 1.0};
    ModeTrajectory mt = fourier_galerkin_1d(Eigen::VectorXd::Constant(J, c), g, u0_hat,
                                            HeatSource(), N, times);
    for (size_t k = 0; k < times.size(); ++k) {
        double decay = std::exp(-4.0 * pi * pi * c * times[k]);
        CHECK(std::abs(mt.modes(N + 1, static_cast<int>(k)) -
                       std::complex<double>(0.0, -0.5) * decay) < 1e-9);
        CHECK(std::abs(mt.modes(N - 1, static_cast<int>(k)) -
                       std::complex<double>(0.0, 0.5) * decay) < 1e-9);
        // all other modes stay zero
        for (int n = 0; n < 2 * N + 1; ++n)
            if (n != N + 1 && n != N - 1)
                CHECK(std::abs(mt.modes(n, static_cast<int>(k))) < 1e-12);
    }
}

TEST_CASE("Fourier-Galerkin and FDM agree for smooth conductivity") {
    const int J = 100, N = 16;
    Grid1D g(J);
    Eigen::VectorXd theta(3);
    theta << std::log(0.015), 0.2, -0.1;
    Eigen::VectorXd a = eval_fourier_log(theta, g);
    Eigen::VectorXd u0 = sin_2pix(J);
    HeatSource f(HeatSource::Kind::sin_pi_t);

    std::vector<double> times{0.0, 0.5, 1.0};
    Trajectory fdm = integrate(HeatOperator::assemble_1d(a, g), u0, f, times);

    Eigen::VectorXcd u0_hat = Eigen::VectorXcd::Zero(2 * N + 1);
    u0_hat[N + 1] = std::complex<double>(0.0, -0.5);
    u0_hat[N - 1] = std::complex<double>(0.0, 0.5);
    ModeTrajectory mt = fourier_galerkin_1d(a, g, u0_hat, f, N, times);
    Eigen::MatrixXd phys = mt.to_physical(g);

    // the FDM is first-order accurate in space; O(dx) agreement
    for (int k = 1; k < 3; ++k) {
        double rel = (phys.col(k) - fdm.states.col(k)).norm() /
                     std::max(1.0, fdm.states.col(k).norm());
        CHECK(rel < 5.0 * g.dx);
    }
}

TEST_CASE("fourier_galerkin_1d rejects aliasing mode counts") {
    Grid1D g(10);
    Eigen::VectorXcd u0_hat = Eigen::VectorXcd::Zero(13);
    CHECK_THROWS_AS(
        fourier_galerkin_1d(Eigen::VectorXd::Constant(10, 0.01), g, u0_hat, HeatSource(), 6, {1.0}),
        std::invalid_argument);
}

TEST_CASE("integrate validates its time grid") {
    Grid1D g(5);
    HeatOperator A = HeatOperator::assemble_1d(Eigen::VectorXd::Constant(5, 0.01), g);
    Eigen::VectorXd u0 = Eigen::VectorXd::Zero(5);
    CHECK_THROWS_AS(integrate(A, u0, HeatSource(), {0.5, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(integrate(A, u0, HeatSource(), {0.0, 0.5, 0.4}), std::invalid_argument);
    Eigen::VectorXd bad = Eigen::VectorXd::Zero(4);
    CHECK_THROWS_AS(integrate(A, bad, HeatSource(), {0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("trajectory CSV header and shape") {
    Grid1D g(4);
    HeatOperator A = HeatOperator::assemble_1d(Eigen::VectorXd::Constant(4, 0.01), g);
    Trajectory traj = integrate(A, sin_2pix(4), HeatSource(), {0.0, 1.0});
    auto path = std::filesystem::temp_directory_path() / "invheat_traj.csv";
    traj.write_csv(path);
    std::ifstream f(path);
    std::string header;
    std::getline(f, header);
    CHECK(header == "t, u_1, u_2, u_3, u_4");
    int rows = 0;
    std::string line;
    while (std::getline(f, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 2);
}
