#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace invheat {

/// Minimal self-contained SVG emitters for run-directory plots. No
/// dependency; axes are a plain frame with min/max labels.

struct SvgSeries {
    std::string label;
    std::string color;
    std::vector<double> x;
    std::vector<double> y;
};

inline void write_line_plot_svg(const std::filesystem::path& path,
                                const std::vector<SvgSeries>& series, const std::string& title,
                                bool log_y = false) {
    const int W = 720, H = 480, ML = 70, MR = 20, MT = 40, MB = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    auto ty = [&](double v) { return log_y ? std::log10(std::max(v, 1e-300)) : v; };
    for (const auto& s : series)
        for (size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, ty(s.y[i]));
            ymax = std::max(ymax, ty(s.y[i]));
        }
    if (xmax <= xmin) xmax = xmin + 1;
    if (ymax <= ymin) ymax = ymin + 1;
    auto px = [&](double v) { return ML + (v - xmin) / (xmax - xmin) * (W - ML - MR); };
    auto py = [&](double v) { return H - MB - (ty(v) - ymin) / (ymax - ymin) * (H - MT - MB); };

    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_line_plot_svg: cannot open " + path.string());
    f << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n"
      << "<rect width='100%' height='100%' fill='white'/>\n"
      << "<text x='" << W / 2 << "' y='24' text-anchor='middle' font-size='16'>" << title
      << "</text>\n"
      << "<rect x='" << ML << "' y='" << MT << "' width='" << W - ML - MR << "' height='"
      << H - MT - MB << "' fill='none' stroke='black'/>\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", xmin);
    f << "<text x='" << ML << "' y='" << H - 20 << "' font-size='12'>" << buf << "</text>\n";
    std::snprintf(buf, sizeof buf, "%.3g", xmax);
    f << "<text x='" << W - MR << "' y='" << H - 20 << "' text-anchor='end' font-size='12'>" << buf
      << "</text>\n";
    std::snprintf(buf, sizeof buf, log_y ? "1e%.0f" : "%.3g", ymin);
    f << "<text x='8' y='" << H - MB << "' font-size='12'>" << buf << "</text>\n";
    std::snprintf(buf, sizeof buf, log_y ? "1e%.0f" : "%.3g", ymax);
    f << "<text x='8' y='" << MT + 12 << "' font-size='12'>" << buf << "</text>\n";
    int li = 0;
    for (const auto& s : series) {
        f << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.5' points='";
        for (size_t i = 0; i < s.x.size(); ++i) f << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
        f << "'/>\n";
        f << "<text x='" << W - MR - 10 << "' y='" << MT + 20 + 16 * li++
          << "' text-anchor='end' font-size='13' fill='" << s.color << "'>" << s.label
          << "</text>\n";
    }
    f << "</svg>\n";
}

/// Matrix heatmap (viridis-ish three-stop gradient).
inline void write_heatmap_svg(const std::filesystem::path& path, const Eigen::MatrixXd& m,
                              const std::string& title) {
    const int cell = std::max(2, 480 / static_cast<int>(std::max(m.rows(), m.cols())));
    const int W = cell * static_cast<int>(m.cols()) + 40, H = cell * static_cast<int>(m.rows()) + 60;
    double lo = m.minCoeff(), hi = m.maxCoeff();
    if (hi <= lo) hi = lo + 1;
    auto color = [&](double v) {
        double t = (v - lo) / (hi - lo);
        int r, g, b;
        if (t < 0.5) {
            double s = t * 2;
            r = static_cast<int>(68 + s * (33 - 68));
            g = static_cast<int>(1 + s * (144 - 1));
            b = static_cast<int>(84 + s * (140 - 84));
        } else {
            double s = (t - 0.5) * 2;
            r = static_cast<int>(33 + s * (253 - 33));
            g = static_cast<int>(144 + s * (231 - 144));
            b = static_cast<int>(140 + s * (37 - 140));
        }
        char buf[10];
        std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
        return std::string(buf);
    };
    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_heatmap_svg: cannot open " + path.string());
    f << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n"
      << "<rect width='100%' height='100%' fill='white'/>\n"
      << "<text x='" << W / 2 << "' y='20' text-anchor='middle' font-size='14'>" << title
      << "</text>\n";
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c)
            f << "<rect x='" << 20 + c * cell << "' y='" << 30 + r * cell << "' width='" << cell
              << "' height='" << cell << "' fill='" << color(m(r, c)) << "'/>\n";
    f << "</svg>\n";
}

}  // namespace invheat
