#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "invheat/field.hpp"

using namespace invheat;

TEST_CASE("eval_fourier_log constants") {
    Grid1D g(10);
    Eigen::VectorXd theta(1);
    theta << 0.0;
    CHECK(eval_fourier_log(theta, g).isApprox(Eigen::VectorXd::Ones(10)));
    theta << std::log(0.01);
    CHECK(eval_fourier_log(theta, g).isApprox(Eigen::VectorXd::Constant(10, 0.01), 1e-14));
}

TEST_CASE("eval_fourier_log single sine mode at the four quarter nodes") {
    Grid1D g(4);
    Eigen::VectorXd theta(3);
    theta << 0.0, 1.0, 0.0;
    Eigen::VectorXd a = eval_fourier_log(theta, g);
    // sin(2 pi x) at x = 0, .25, .5, .75 is 0, 1, 0, -1
    CHECK(a[0] == Catch::Approx(1.0));
    CHECK(a[1] == Catch::Approx(std::exp(1.0)));
    CHECK(a[2] == Catch::Approx(1.0));
    CHECK(a[3] == Catch::Approx(std::exp(-1.0)));
}

TEST_CASE("eval_fourier_log is invariant under zero padding") {
    Grid1D g(50);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Eigen::VectorXd theta(7);
    for (int i = 0; i < 7; ++i) theta[i] = unif(rng);
    Eigen::VectorXd padded(10);
    padded << theta, 0.0, 0.0, 0.0;
    CHECK(eval_fourier_log(theta, g) == eval_fourier_log(padded, g));
}

TEST_CASE("random theta always yields a strictly positive field") {
    Grid1D g(33);
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> unif(-5.0, 5.0);
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd theta(1 + trial % 9);
        for (int i = 0; i < theta.size(); ++i) theta[i] = unif(rng);
        CHECK((eval_fourier_log(theta, g).array() > 0.0).all());
    }
}

TEST_CASE("built-in 1D truths match their closed forms") {
    Grid1D g(100);
    Eigen::VectorXd h = make_truth_1d("heaviside", g);
    CHECK(h[25] == Catch::Approx(0.01));  // x = 0.25
    CHECK(h[75] == Catch::Approx(0.02));  // x = 0.75
    CHECK(h[50] == Catch::Approx(0.02));  // breakpoint x = 0.5 takes the upper branch

    Grid1D g3(3);
    Eigen::VectorXd s = make_truth_1d("PieceLinear3S", g3);
    CHECK(s[1] == Catch::Approx((6.0 / 3.0 - 1.0) / 100.0));  // x = 1/3 -> 0.01

    Eigen::VectorXd w = make_truth_1d("piecelinear4w", g);
    CHECK(w[0] == Catch::Approx(0.02));  // 2 - 4x at x = 0

    CHECK_THROWS_AS(make_truth_1d("nope", g), std::invalid_argument);
}

TEST_CASE("image_to_conductivity affine map") {
    Eigen::MatrixXd p(2, 2);
    p << 0.0, 1.0, 0.5, 0.25;
    Eigen::MatrixXd a = image_to_conductivity(p);
    CHECK(a(0, 0) == Catch::Approx(0.01));
    CHECK(a(0, 1) == Catch::Approx(0.02));
    CHECK(a(1, 0) == Catch::Approx(0.015));

    // affine: a(p) - a(0) = p/100 elementwise
    Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(2, 2);
    CHECK((a - image_to_conductivity(zero)).isApprox(p / 100.0, 1e-14));

    p(0, 0) = 1.5;
    CHECK_THROWS_AS(image_to_conductivity(p), std::invalid_argument);
}

namespace {
// Independent reference: direct per-pixel 2D bilinear interpolation with
// half-pixel centers, no separability.
Eigen::MatrixXd reference_bilinear(const Eigen::MatrixXd& in, int out) {
    const int n = static_cast<int>(in.rows());
    const double s = static_cast<double>(n) / out;
    Eigen::MatrixXd res(out, out);
    for (int r = 0; r < out; ++r)
        for (int c = 0; c < out; ++c) {
            double sr = std::clamp((r + 0.5) * s - 0.5, 0.0, double(n - 1));
            double sc = std::clamp((c + 0.5) * s - 0.5, 0.0, double(n - 1));
            int r0 = static_cast<int>(sr), c0 = static_cast<int>(sc);
            int r1 = std::min(r0 + 1, n - 1), c1 = std::min(c0 + 1, n - 1);
            double fr = sr - r0, fc = sc - c0;
            res(r, c) = in(r0, c0) * (1 - fr) * (1 - fc) + in(r1, c0) * fr * (1 - fc) +
                        in(r0, c1) * (1 - fr) * fc + in(r1, c1) * fr * fc;
        }
    return res;
}
}  // namespace

TEST_CASE("resize_bilinear preserves constants and matches the reference") {
    Eigen::MatrixXd zeros = Eigen::MatrixXd::Zero(28, 28);
    CHECK(resize_bilinear(zeros, 32).isZero(0.0));
    Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(28, 28);
    CHECK(resize_bilinear(ones, 32).isApprox(Eigen::MatrixXd::Ones(32, 32), 1e-14));

    Eigen::MatrixXd impulse = Eigen::MatrixXd::Zero(28, 28);
    impulse(13, 9) = 1.0;
    CHECK(resize_bilinear(impulse, 32).isApprox(reference_bilinear(impulse, 32), 1e-13));

    std::mt19937 rng(9);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::MatrixXd rand28(28, 28);
    for (int r = 0; r < 28; ++r)
        for (int c = 0; c < 28; ++c) rand28(r, c) = unif(rng);
    CHECK(resize_bilinear(rand28, 32).isApprox(reference_bilinear(rand28, 32), 1e-13));

    Eigen::MatrixXd rect(3, 4);
    CHECK_THROWS_AS(resize_bilinear(rect, 8), std::invalid_argument);
}

TEST_CASE("PGM round trip and CSV loading") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "invheat_field_test";
    fs::create_directories(dir);

    Eigen::MatrixXd img(4, 4);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) img(r, c) = (r * 4 + c) / 15.0;
    write_pgm(dir / "t.pgm", img);
    Eigen::MatrixXd back = load_grayscale(dir / "t.pgm");
    CHECK((back - img).cwiseAbs().maxCoeff() < 1.0 / 255.0);

    {
        std::ofstream csv(dir / "t.csv");
        csv << "0.0,0.5\n1.0,0.25\n";
    }
    Eigen::MatrixXd m = load_grayscale(dir / "t.csv");
    REQUIRE(m.rows() == 2);
    CHECK(m(0, 1) == Catch::Approx(0.5));
    CHECK(m(1, 0) == Catch::Approx(1.0));

    CHECK_THROWS(load_grayscale(dir / "missing.pgm"));
}

TEST_CASE("bundled digit images load as 28x28 grayscale") {
    Eigen::MatrixXd d0 = load_grayscale(std::filesystem::path(INVHEAT_DATA_DIR) / "digit0.pgm");
    REQUIRE(d0.rows() == 28);
    REQUIRE(d0.cols() == 28);
    CHECK(d0.minCoeff() >= 0.0);
    CHECK(d0.maxCoeff() <= 1.0);
    CHECK(d0.maxCoeff() > 0.5);  // there is an actual digit in there
}
