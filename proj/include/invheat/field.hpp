#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "invheat/grid.hpp"

namespace invheat {

/// Value of the p-th (0-based) log-conductivity basis function at x:
/// p=0 the constant, odd p=2k-1 sin(2k pi x), even p=2k cos(2k pi x).
inline double fourier_log_basis(int p, double x) {
    if (p == 0) return 1.0;
    int k = (p + 1) / 2;
    double arg = 2.0 * k * std::numbers::pi * x;
    return (p % 2 == 1) ? std::sin(arg) : std::cos(arg);
}

/// Conductivity a(x_j; theta) = exp(sum_p theta_p basis_p(x_j)) at every node.
/// Positive by construction; appending zero coefficients leaves it unchanged.
inline Eigen::VectorXd eval_fourier_log(const Eigen::VectorXd& theta, const Grid1D& g) {
    if (theta.size() < 1) throw std::invalid_argument("eval_fourier_log: empty theta");
    Eigen::VectorXd a(g.nodes);
    for (int j = 0; j < g.nodes; ++j) {
        double x = j * g.dx;
        double ln_a = 0.0;
        for (int p = 0; p < theta.size(); ++p) ln_a += theta[p] * fourier_log_basis(p, x);
        a[j] = std::exp(ln_a);
    }
    return a;
}

/// Elementwise exp of a pixel-basis log-conductivity (2D, length J*J).
inline Eigen::VectorXd eval_pixel_log(const Eigen::VectorXd& theta) {
    return theta.array().exp();
}

inline double truth_heaviside(double x) {
    return (x < 0.5 ? 1.0 : 2.0) / 100.0;
}

inline double truth_piecelinear3s(double x) {
    double v;
    if (x < 1.0 / 3.0) v = 2.0 - 3.0 * x;
    else if (x < 2.0 / 3.0) v = 6.0 * x - 1.0;
    else v = 5.0 - 3.0 * x;
    return v / 100.0;
}

inline double truth_piecelinear4w(double x) {
    double v;
    if (x < 0.25) v = 2.0 - 4.0 * x;
    else if (x < 0.5) v = 8.0 * x - 1.0;
    else if (x < 0.75) v = 7.0 - 8.0 * x;
    else v = 4.0 * x - 2.0;
    return v / 100.0;
}

/// Built-in 1D ground-truth conductivities, evaluated at the grid nodes.
/// Names: heaviside, piecelinear3s, piecelinear4w (case-insensitive).
inline Eigen::VectorXd make_truth_1d(std::string_view name, const Grid1D& g) {
    std::string n(name);
    std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::tolower(c); });
    double (*fn)(double) = nullptr;
    if (n == "heaviside") fn = truth_heaviside;
    else if (n == "piecelinear3s") fn = truth_piecelinear3s;
    else if (n == "piecelinear4w") fn = truth_piecelinear4w;
    else throw std::invalid_argument("make_truth_1d: unknown test case '" + n + "'");
    Eigen::VectorXd a(g.nodes);
    for (int j = 0; j < g.nodes; ++j) a[j] = fn(j * g.dx);
    return a;
}

/// Affine map from grayscale pixels in [0,1] to conductivity in [0.01, 0.02]:
/// a(i,j) = (p(i,j) + 1) / 100.
inline Eigen::MatrixXd image_to_conductivity(const Eigen::MatrixXd& pixels) {
    if ((pixels.array() < 0.0).any() || (pixels.array() > 1.0).any())
        throw std::invalid_argument("image_to_conductivity: pixel value outside [0,1]");
    return (pixels.array() + 1.0) / 100.0;
}

/// Bilinear resize with half-pixel sample centers (separable, rows then
/// columns). Constant images map to the same constant.
inline Eigen::MatrixXd resize_bilinear(const Eigen::MatrixXd& in, int out_size) {
    if (in.rows() != in.cols())
        throw std::invalid_argument("resize_bilinear: input must be square");
    const int n_in = static_cast<int>(in.rows());
    const double scale = static_cast<double>(n_in) / out_size;

    auto sample_coord = [&](int dst) {
        double s = (dst + 0.5) * scale - 0.5;
        return std::clamp(s, 0.0, static_cast<double>(n_in - 1));
    };

    Eigen::MatrixXd rows_done(out_size, n_in);
    for (int r = 0; r < out_size; ++r) {
        double s = sample_coord(r);
        int r0 = static_cast<int>(s);
        int r1 = std::min(r0 + 1, n_in - 1);
        double f = s - r0;
        rows_done.row(r) = (1.0 - f) * in.row(r0) + f * in.row(r1);
    }
    Eigen::MatrixXd out(out_size, out_size);
    for (int c = 0; c < out_size; ++c) {
        double s = sample_coord(c);
        int c0 = static_cast<int>(s);
        int c1 = std::min(c0 + 1, n_in - 1);
        double f = s - c0;
        out.col(c) = (1.0 - f) * rows_done.col(c0) + f * rows_done.col(c1);
    }
    return out;
}

/// Load a grayscale image as values in [0,1]. Accepts plain PGM (P2 ASCII,
/// P5 binary, maxval 255) and headerless CSV (J rows of J comma-separated
/// reals already in [0,1]).
inline Eigen::MatrixXd load_grayscale(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("load_grayscale: cannot open " + path.string());

    char magic0 = static_cast<char>(f.peek());
    if (magic0 == 'P') {
        std::string magic;
        f >> magic;
        if (magic != "P2" && magic != "P5")
            throw std::runtime_error("load_grayscale: unsupported PGM magic " + magic);
        auto next_token = [&]() {
            std::string tok;
            while (f >> tok) {
                if (tok[0] == '#') { std::string rest; std::getline(f, rest); continue; }
                return tok;
            }
            throw std::runtime_error("load_grayscale: truncated PGM header");
        };
        int w = std::stoi(next_token());
        int h = std::stoi(next_token());
        int maxval = std::stoi(next_token());
        if (maxval != 255) throw std::runtime_error("load_grayscale: PGM maxval must be 255");
        Eigen::MatrixXd img(h, w);
        if (magic == "P2") {
            for (int r = 0; r < h; ++r)
                for (int c = 0; c < w; ++c) {
                    int v; f >> v;
                    img(r, c) = v / 255.0;
                }
            if (!f) throw std::runtime_error("load_grayscale: truncated P2 data");
        } else {
            f.get();  // single whitespace after maxval
            std::vector<unsigned char> buf(static_cast<size_t>(w) * h);
            f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
            if (!f) throw std::runtime_error("load_grayscale: truncated P5 data");
            for (int r = 0; r < h; ++r)
                for (int c = 0; c < w; ++c) img(r, c) = buf[static_cast<size_t>(r) * w + c] / 255.0;
        }
        return img;
    }

    // headerless CSV
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("load_grayscale: empty CSV " + path.string());
    size_t w = rows[0].size();
    Eigen::MatrixXd img(static_cast<int>(rows.size()), static_cast<int>(w));
    for (size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != w) throw std::runtime_error("load_grayscale: ragged CSV rows");
        for (size_t c = 0; c < w; ++c) img(static_cast<int>(r), static_cast<int>(c)) = rows[r][c];
    }
    return img;
}

/// Write values in [0,1] as plain ASCII PGM (P2, maxval 255).
inline void write_pgm(const std::filesystem::path& path, const Eigen::MatrixXd& img) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_pgm: cannot open " + path.string());
    f << "P2\n" << img.cols() << ' ' << img.rows() << "\n255\n";
    for (int r = 0; r < img.rows(); ++r) {
        for (int c = 0; c < img.cols(); ++c) {
            int v = static_cast<int>(std::lround(std::clamp(img(r, c), 0.0, 1.0) * 255.0));
            f << v << (c + 1 == img.cols() ? '\n' : ' ');
        }
    }
}

}  // namespace invheat
