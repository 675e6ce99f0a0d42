#pragma once

#include <Eigen/Dense>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <json.hpp>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "invheat/field.hpp"
#include "invheat/inverse.hpp"
#include "invheat/optimize.hpp"
#include "invheat/sensing.hpp"
#include "invheat/spectral.hpp"
#include "invheat/svg.hpp"

namespace invheat {

/// Raised when the configuration is provably non-recoverable (constant
/// initial temperature with spatially constant forcing).
struct DegenerateProblemError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentSpec {
    int dimension = 1;
    int grid_size = 100;
    std::string truth = "heaviside";  // builtin name (1D) or image path (2D)
    std::string initial_condition = "sin_2pix";  // sin_2pix | coscos | constant
    std::string heat_source = "sin_pi_t";        // sin_pi_t | sin_2pi_t | zero
    std::string sensors = "circle_1d";           // circle_1d | orbits_4 | static_16 | static_64
    int cadence = 100;
    double noise_sd = 0.0;
    GDConfig gd;
    std::uint64_t seed = 0;
    bool plots = false;

    static ExperimentSpec defaults_2d() {
        ExperimentSpec s;
        s.dimension = 2;
        s.grid_size = 32;
        s.truth = "";
        s.initial_condition = "coscos";
        s.heat_source = "sin_2pi_t";
        s.sensors = "orbits_4";
        s.cadence = 256;
        s.gd.gamma = 5e3;
        return s;
    }

    nlohmann::json to_json() const {
        return {{"dimension", dimension},
                {"grid_size", grid_size},
                {"truth", truth},
                {"initial_condition", initial_condition},
                {"heat_source", heat_source},
                {"sensors", sensors},
                {"cadence", cadence},
                {"noise_sd", noise_sd},
                {"seed", seed},
                {"plots", plots},
                {"gamma", gd.gamma},
                {"epsilon", gd.epsilon},
                {"max_epoch", gd.max_epoch},
                {"max_frequency", gd.max_frequency},
                {"initial_log_conductivity", gd.initial_log_conductivity}};
    }
};

struct ExperimentResult {
    ExperimentSpec spec;
    Eigen::VectorXd reconstruction;  // node-wise conductivity
    Eigen::VectorXd truth;           // node-wise conductivity
    std::vector<HistoryRow> history;
    double final_loss = 0.0;
    double final_relative_error = 0.0;
    double initial_relative_error = 0.0;
    double wall_seconds = 0.0;
};

namespace detail {

inline HeatSource make_heat_source(const std::string& kind) {
    if (kind == "sin_pi_t") return HeatSource(HeatSource::Kind::sin_pi_t);
    if (kind == "sin_2pi_t") return HeatSource(HeatSource::Kind::sin_2pi_t);
    if (kind == "zero") return HeatSource(HeatSource::Kind::zero);
    throw std::invalid_argument("unknown heat source kind '" + kind + "'");
}

inline Eigen::VectorXd make_u0(const std::string& name, int dim, int J) {
    using std::numbers::pi;
    if (name == "constant") {
        int n = dim == 1 ? J : J * J;
        return Eigen::VectorXd::Ones(n);
    }
    if (dim == 1) {
        if (name != "sin_2pix")
            throw std::invalid_argument("1D initial condition must be sin_2pix or constant");
        Eigen::VectorXd u0(J);
        for (int j = 0; j < J; ++j) u0[j] = std::sin(2.0 * pi * j / J);
        return u0;
    }
    if (name != "coscos")
        throw std::invalid_argument("2D initial condition must be coscos or constant");
    Eigen::VectorXd u0(J * J);
    for (int i = 0; i < J; ++i)
        for (int j = 0; j < J; ++j)
            u0[i * J + j] = std::cos(2.0 * pi * i / J) * std::cos(2.0 * pi * j / J);
    return u0;
}

/// Truth conductivity on the grid: builtin closed form in 1D, grayscale
/// image (resized to the grid if needed) mapped to [0.01, 0.02] in 2D.
inline Eigen::VectorXd make_truth(const ExperimentSpec& spec) {
    if (spec.dimension == 1) return make_truth_1d(spec.truth, Grid1D(spec.grid_size));
    Eigen::MatrixXd img = load_grayscale(spec.truth);
    if (img.rows() != spec.grid_size) img = resize_bilinear(img, spec.grid_size);
    Eigen::MatrixXd a = image_to_conductivity(img);
    Eigen::VectorXd flat(spec.grid_size * spec.grid_size);
    for (int i = 0; i < spec.grid_size; ++i)
        for (int j = 0; j < spec.grid_size; ++j) flat[i * spec.grid_size + j] = a(i, j);
    return flat;
}

inline std::vector<SensorPath> make_paths(const ExperimentSpec& spec) {
    if (spec.sensors == "circle_1d") {
        if (spec.dimension != 1) throw std::invalid_argument("circle_1d requires a 1D spec");
        return {path_circle_1d(spec.cadence)};
    }
    if (spec.dimension != 2) throw std::invalid_argument(spec.sensors + " requires a 2D spec");
    if (spec.sensors == "orbits_4") return path_orbits_2d(spec.cadence);
    if (spec.sensors == "static_16") return path_static_grid_2d(16, spec.cadence, spec.grid_size);
    if (spec.sensors == "static_64") return path_static_grid_2d(64, spec.cadence, spec.grid_size);
    throw std::invalid_argument("unknown sensor config '" + spec.sensors + "'");
}

inline void write_reconstruction_csv(const std::filesystem::path& path, const Eigen::VectorXd& a) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path.string());
    f << "node, a\n";
    char buf[48];
    for (int j = 0; j < a.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%d, %.17g", j + 1, a[j]);
        f << buf << '\n';
    }
}

inline Eigen::MatrixXd to_matrix(const Eigen::VectorXd& flat, int J) {
    Eigen::MatrixXd m(J, J);
    for (int i = 0; i < J; ++i)
        for (int j = 0; j < J; ++j) m(i, j) = flat[i * J + j];
    return m;
}

inline void write_run_plots(const std::filesystem::path& dir, const ExperimentResult& r) {
    SvgSeries loss{"loss", "#1f77b4", {}, {}}, err{"rel_err", "#d62728", {}, {}};
    for (const auto& h : r.history) {
        loss.x.push_back(h.epoch);
        loss.y.push_back(h.loss);
        err.x.push_back(h.epoch);
        err.y.push_back(h.relative_error);
    }
    write_line_plot_svg(dir / "loss_error.svg", {loss, err}, "training", true);
    if (r.spec.dimension == 1) {
        Grid1D g(r.spec.grid_size);
        SvgSeries truth{"truth", "#2ca02c", {}, {}}, rec{"reconstruction", "#d62728", {}, {}};
        for (int j = 0; j < g.nodes; ++j) {
            truth.x.push_back(j * g.dx);
            truth.y.push_back(r.truth[j]);
            rec.x.push_back(j * g.dx);
            rec.y.push_back(r.reconstruction[j]);
        }
        write_line_plot_svg(dir / "conductivity.svg", {truth, rec}, "conductivity", false);
    } else {
        int J = r.spec.grid_size;
        write_heatmap_svg(dir / "truth.svg", to_matrix(r.truth, J), "truth conductivity");
        write_heatmap_svg(dir / "reconstruction.svg", to_matrix(r.reconstruction, J),
                          "reconstructed conductivity");
    }
}

}  // namespace detail

/// Shared forward + measurement stage. Solves the truth dynamics on the
/// measurement time grid and extracts (optionally noisy) sensor records.
struct ForwardStage {
    Eigen::VectorXd truth;
    Eigen::VectorXd u0;
    HeatSource f;
    Trajectory trajectory;
};

inline ForwardStage run_forward_stage(const ExperimentSpec& spec) {
    ForwardStage fs;
    fs.truth = detail::make_truth(spec);
    fs.u0 = detail::make_u0(spec.initial_condition, spec.dimension, spec.grid_size);
    fs.f = detail::make_heat_source(spec.heat_source);
    if (check_recoverable(fs.u0, true) == Recoverability::degenerate)
        throw DegenerateProblemError(
            "non-recoverable configuration: constant initial temperature with spatially "
            "constant forcing carries no information about the conductivity");

    std::vector<double> t_grid{0.0};
    for (int m = 1; m <= spec.cadence; ++m) t_grid.push_back(static_cast<double>(m) / spec.cadence);

    HeatOperator A = spec.dimension == 1
                         ? HeatOperator::assemble_1d(fs.truth, Grid1D(spec.grid_size))
                         : HeatOperator::assemble_2d(
                               detail::to_matrix(fs.truth, spec.grid_size), Grid2D(spec.grid_size));
    fs.trajectory = integrate(A, fs.u0, fs.f, t_grid);
    return fs;
}

inline ExperimentResult run_experiment(const ExperimentSpec& spec,
                                       const std::optional<std::filesystem::path>& out_dir = {}) {
    auto t0 = std::chrono::steady_clock::now();
    ForwardStage fs = run_forward_stage(spec);
    auto paths = detail::make_paths(spec);

    MeasurementSet ms;
    OptimizerResult opt;
    if (spec.dimension == 1) {
        Grid1D g(spec.grid_size);
        ms = measure(fs.trajectory, paths, g, spec.noise_sd, spec.seed);
        InverseProblem1D problem(g, fs.u0, fs.f, ms);
        opt = adaptive_fs_gd(spec.gd, problem, fs.truth);
        opt.theta = problem.conductivity(opt.theta);  // reuse slot for node-wise field
    } else {
        Grid2D g(spec.grid_size);
        ms = measure(fs.trajectory, paths, g, spec.noise_sd, spec.seed);
        InverseProblem2D problem(g, fs.u0, fs.f, ms);
        opt = gd_2d(spec.gd, problem, fs.truth);
        opt.theta = problem.conductivity(opt.theta);
    }

    ExperimentResult r;
    r.spec = spec;
    r.truth = fs.truth;
    r.reconstruction = opt.theta;
    r.history = std::move(opt.history);
    r.final_loss = r.history.back().loss;
    r.final_relative_error = r.history.back().relative_error;
    r.initial_relative_error = r.history.front().relative_error;
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (out_dir) {
        std::filesystem::create_directories(*out_dir);
        std::ofstream(*out_dir / "spec.json") << spec.to_json().dump(2) << '\n';
        ms.write_csv(*out_dir / "measurements.csv");
        write_training_log(*out_dir / "training_log.csv", r.history);
        detail::write_reconstruction_csv(*out_dir / "reconstruction.csv", r.reconstruction);
        nlohmann::json summary = {{"final_loss", r.final_loss},
                                  {"final_relative_error", r.final_relative_error},
                                  {"initial_relative_error", r.initial_relative_error},
                                  {"dim_theta", r.history.back().dim_theta},
                                  {"seed", spec.seed},
                                  {"wall_seconds", r.wall_seconds}};
        std::ofstream(*out_dir / "summary.json") << summary.dump(2) << '\n';
        if (spec.plots) detail::write_run_plots(*out_dir, r);
    }
    return r;
}

struct FrontierRow {
    std::string config;
    double loss_level;
    int epoch;        // first epoch whose loss <= level; -1 if unreached
    double rel_err;   // relative error at that epoch
    bool reached;
};

/// Moving-vs-static study: one shared forward solve of the truth, then one
/// inversion per sensor configuration, read out at each loss level's first
/// crossing.
inline std::vector<FrontierRow> compare_configs(const ExperimentSpec& base,
                                                const std::vector<std::string>& configs,
                                                const std::vector<double>& loss_levels,
                                                int jobs = 1) {
    if (configs.size() < 2) throw std::invalid_argument("compare_configs: need at least 2 configs");
    for (size_t i = 1; i < loss_levels.size(); ++i)
        if (loss_levels[i] >= loss_levels[i - 1])
            throw std::invalid_argument("compare_configs: loss levels must descend");

    ForwardStage fs = run_forward_stage(base);  // truth solved once, shared
    Grid2D g(base.grid_size);

    auto run_one = [&](const std::string& config) {
        ExperimentSpec spec = base;
        spec.sensors = config;
        auto paths = detail::make_paths(spec);
        MeasurementSet ms = measure(fs.trajectory, paths, g, spec.noise_sd, spec.seed);
        InverseProblem2D problem(g, fs.u0, fs.f, ms);
        return gd_2d(spec.gd, problem, fs.truth).history;
    };

    std::vector<std::vector<HistoryRow>> histories(configs.size());
    if (jobs <= 1) {
        for (size_t i = 0; i < configs.size(); ++i) histories[i] = run_one(configs[i]);
    } else {
        std::vector<std::future<std::vector<HistoryRow>>> futs;
        for (const auto& c : configs)
            futs.push_back(std::async(std::launch::async, run_one, c));
        for (size_t i = 0; i < configs.size(); ++i) histories[i] = futs[i].get();
    }

    std::vector<FrontierRow> rows;
    for (size_t i = 0; i < configs.size(); ++i) {
        for (double level : loss_levels) {
            FrontierRow row{configs[i], level, -1, 0.0, false};
            for (const auto& h : histories[i]) {
                if (h.loss <= level) {
                    row.epoch = h.epoch;
                    row.rel_err = h.relative_error;
                    row.reached = true;
                    break;
                }
            }
            rows.push_back(row);
        }
    }
    return rows;
}

inline void write_frontier_csv(const std::filesystem::path& path,
                               const std::vector<FrontierRow>& rows) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_frontier_csv: cannot open " + path.string());
    f << "config, loss_level, epoch, rel_err\n";
    char buf[160];
    for (const auto& r : rows) {
        if (r.reached)
            std::snprintf(buf, sizeof buf, "%s, %.17g, %d, %.17g", r.config.c_str(), r.loss_level,
                          r.epoch, r.rel_err);
        else
            std::snprintf(buf, sizeof buf, "%s, %.17g, unreached, ", r.config.c_str(),
                          r.loss_level);
        f << buf << '\n';
    }
}

}  // namespace invheat
