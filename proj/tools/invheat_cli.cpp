// Command-line front end: forward simulation, inversion, spectral
// diagnostics, sensor-configuration comparison, and image preparation.
//
// Exit codes: 0 success, 1 numerical failure, 2 configuration error,
// 3 non-recoverable (degenerate) problem.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <thread>

#include "invheat/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flags shared by the simulation subcommands, mirroring ExperimentSpec.
struct CommonFlags {
    invheat::ExperimentSpec spec;
    std::string config_file;
    std::string out_dir = "out";
    std::string image;  // 2D truth source
    int jobs = 0;       // 0 = logical processor count
};

/// Accept both the compact CLI spellings and the canonical names.
std::string canonical_sensors(const std::string& s) {
    if (s == "circle" || s == "circle_1d") return "circle_1d";
    if (s == "orbits4" || s == "orbits_4") return "orbits_4";
    if (s == "static16" || s == "static_16") return "static_16";
    if (s == "static64" || s == "static_64") return "static_64";
    throw ConfigError("unknown sensor configuration '" + s + "'");
}

void add_common_options(CLI::App* cmd, CommonFlags& cf, bool with_gd) {
    cmd->add_option("--config", cf.config_file, "JSON config file; explicit flags override it");
    cmd->add_option("--out", cf.out_dir, "output directory (everything is written inside it)")
        ->capture_default_str();
    cmd->add_option("--dim", cf.spec.dimension, "problem dimension, 1 or 2")
        ->check(CLI::IsMember({1, 2}))
        ->capture_default_str();
    cmd->add_option("--J", cf.spec.grid_size, "grid nodes per axis")->capture_default_str();
    cmd->add_option("--truth", cf.spec.truth,
                    "1D truth conductivity: heaviside | piecelinear3s | piecelinear4w")
        ->capture_default_str();
    cmd->add_option("--image", cf.image, "2D truth: grayscale image (PGM or CSV)");
    cmd->add_option("--u0", cf.spec.initial_condition,
                    "initial temperature: sin_2pix | coscos | constant")
        ->capture_default_str();
    cmd->add_option("--source", cf.spec.heat_source, "heat source: sin_pi_t | sin_2pi_t | zero")
        ->capture_default_str();
    cmd->add_option("--sensors", cf.spec.sensors,
                    "sensor configuration: circle | orbits4 | static16 | static64")
        ->capture_default_str();
    cmd->add_option("--M", cf.spec.cadence, "measurements per sensor over [0, 1]")
        ->capture_default_str();
    cmd->add_option("--noise", cf.spec.noise_sd, "additive Gaussian noise standard deviation")
        ->capture_default_str();
    cmd->add_option("--seed", cf.spec.seed, "measurement noise seed")->capture_default_str();
    cmd->add_flag("--plots", cf.spec.plots, "emit SVG plots into the output directory");
    if (with_gd) {
        cmd->add_option("--epochs", cf.spec.gd.max_epoch, "gradient descent epochs")
            ->capture_default_str();
        cmd->add_option("--gamma", cf.spec.gd.gamma, "gradient descent step size")
            ->capture_default_str();
        cmd->add_option("--epsilon", cf.spec.gd.epsilon,
                        "squared-gradient threshold for 1D mode expansion")
            ->capture_default_str();
        cmd->add_option("--N", cf.spec.gd.max_frequency, "1D Fourier frequency cap")
            ->capture_default_str();
        cmd->add_option("--theta0", cf.spec.gd.initial_log_conductivity,
                        "initial log conductivity")
            ->capture_default_str();
    }
}

/// Merge the JSON config file under the parsed flags: a key applies only
/// when the matching flag was not given on the command line; unknown keys
/// are an error.
void merge_config_file(const CLI::App* cmd, CommonFlags& cf, bool with_gd) {
    if (cf.config_file.empty()) return;
    std::ifstream f(cf.config_file);
    if (!f) throw ConfigError("cannot open config file '" + cf.config_file + "'");
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
    }
    auto unset = [&](const char* flag) {
        const CLI::Option* o = cmd->get_option_no_throw(flag);
        return o != nullptr && o->count() == 0;
    };
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "out") {
                if (unset("--out")) cf.out_dir = value.get<std::string>();
            } else if (key == "dim") {
                if (unset("--dim")) cf.spec.dimension = value.get<int>();
            } else if (key == "J") {
                if (unset("--J")) cf.spec.grid_size = value.get<int>();
            } else if (key == "truth") {
                if (unset("--truth")) cf.spec.truth = value.get<std::string>();
            } else if (key == "image") {
                if (unset("--image")) cf.image = value.get<std::string>();
            } else if (key == "u0") {
                if (unset("--u0")) cf.spec.initial_condition = value.get<std::string>();
            } else if (key == "source") {
                if (unset("--source")) cf.spec.heat_source = value.get<std::string>();
            } else if (key == "sensors") {
                if (unset("--sensors")) cf.spec.sensors = value.get<std::string>();
            } else if (key == "M") {
                if (unset("--M")) cf.spec.cadence = value.get<int>();
            } else if (key == "noise") {
                if (unset("--noise")) cf.spec.noise_sd = value.get<double>();
            } else if (key == "seed") {
                if (unset("--seed")) cf.spec.seed = value.get<std::uint64_t>();
            } else if (key == "plots") {
                if (unset("--plots")) cf.spec.plots = value.get<bool>();
            } else if (with_gd && key == "epochs") {
                if (unset("--epochs")) cf.spec.gd.max_epoch = value.get<int>();
            } else if (with_gd && key == "gamma") {
                if (unset("--gamma")) cf.spec.gd.gamma = value.get<double>();
            } else if (with_gd && key == "epsilon") {
                if (unset("--epsilon")) cf.spec.gd.epsilon = value.get<double>();
            } else if (with_gd && key == "N") {
                if (unset("--N")) cf.spec.gd.max_frequency = value.get<int>();
            } else if (with_gd && key == "theta0") {
                if (unset("--theta0"))
                    cf.spec.gd.initial_log_conductivity = value.get<double>();
            } else {
                throw ConfigError("unknown config key '" + key + "'");
            }
        } catch (const json::exception& e) {
            throw ConfigError("config key '" + key + "': " + e.what());
        }
    }
}

/// Resolve the 2D truth image and 1D/2D defaults after flag + config merge.
void finalize_spec(CommonFlags& cf) {
    cf.spec.sensors = canonical_sensors(cf.spec.sensors);
    if (cf.spec.dimension == 2) {
        if (cf.image.empty()) throw ConfigError("2D problems need --image");
        if (!fs::exists(cf.image)) throw ConfigError("image file not found: " + cf.image);
        cf.spec.truth = cf.image;
        // leave 1D-shaped defaults behind when the user only set --dim 2
        if (cf.spec.initial_condition == "sin_2pix") cf.spec.initial_condition = "coscos";
        if (cf.spec.heat_source == "sin_pi_t") cf.spec.heat_source = "sin_2pi_t";
        if (cf.spec.sensors == "circle_1d") cf.spec.sensors = "orbits_4";
        if (cf.spec.grid_size == 100) cf.spec.grid_size = 32;
        if (cf.spec.cadence == 100) cf.spec.cadence = 256;
        if (cf.spec.gd.gamma == invheat::GDConfig{}.gamma) cf.spec.gd.gamma = 5e3;
    } else if (!cf.image.empty()) {
        throw ConfigError("--image requires --dim 2");
    }
}

int run_forward(CommonFlags& cf) {
    finalize_spec(cf);
    invheat::ForwardStage stage = invheat::run_forward_stage(cf.spec);
    fs::create_directories(cf.out_dir);
    stage.trajectory.write_csv(fs::path(cf.out_dir) / "trajectory.csv");
    if (cf.spec.plots) {
        for (double t : {0.0, 0.5, 1.0}) {
            int c = stage.trajectory.index_of_time(t);
            if (c < 0) continue;
            char name[32];
            std::snprintf(name, sizeof name, "snapshot_t%.1f.svg", t);
            if (cf.spec.dimension == 2) {
                invheat::write_heatmap_svg(
                    fs::path(cf.out_dir) / name,
                    invheat::detail::to_matrix(stage.trajectory.states.col(c), cf.spec.grid_size),
                    std::string("temperature at t = ") + std::to_string(t));
            } else {
                invheat::SvgSeries s{"u", "#1f77b4", {}, {}};
                for (int j = 0; j < cf.spec.grid_size; ++j) {
                    s.x.push_back(double(j) / cf.spec.grid_size);
                    s.y.push_back(stage.trajectory.states(j, c));
                }
                invheat::write_line_plot_svg(fs::path(cf.out_dir) / name, {s},
                                             std::string("temperature at t = ") + std::to_string(t));
            }
        }
    }
    return 0;
}

int run_invert(CommonFlags& cf) {
    finalize_spec(cf);
    invheat::ExperimentResult r = invheat::run_experiment(cf.spec, fs::path(cf.out_dir));
    std::printf("loss=%.17g rel_err=%.17g\n", r.final_loss, r.final_relative_error);
    return 0;
}

int run_spectrum(CommonFlags& cf, int modes) {
    finalize_spec(cf);
    Eigen::VectorXd truth = invheat::detail::make_truth(cf.spec);
    invheat::HeatOperator A =
        cf.spec.dimension == 1
            ? invheat::HeatOperator::assemble_1d(truth, invheat::Grid1D(cf.spec.grid_size))
            : invheat::HeatOperator::assemble_2d(
                  invheat::detail::to_matrix(truth, cf.spec.grid_size),
                  invheat::Grid2D(cf.spec.grid_size));
    invheat::EigenSystem es = invheat::eigensystem(A);
    auto rows = invheat::sensitivity_report(es, modes);
    fs::create_directories(cf.out_dir);
    invheat::write_sensitivity_report(fs::path(cf.out_dir) / "spectrum.csv", rows);
    return 0;
}

int run_compare(CommonFlags& cf, const std::vector<std::string>& configs,
                std::vector<double> levels) {
    cf.spec.dimension = 2;
    finalize_spec(cf);
    if (configs.size() < 2) throw ConfigError("compare needs at least 2 sensor configurations");
    std::vector<std::string> canonical;
    for (const auto& c : configs) canonical.push_back(canonical_sensors(c));
    std::sort(levels.begin(), levels.end(), std::greater<>());
    int jobs = cf.jobs > 0 ? cf.jobs : static_cast<int>(std::thread::hardware_concurrency());
    auto rows = invheat::compare_configs(cf.spec, canonical, levels, std::max(jobs, 1));
    fs::create_directories(cf.out_dir);
    invheat::write_frontier_csv(fs::path(cf.out_dir) / "frontier.csv", rows);
    return 0;
}

int run_prep_image(const std::string& image, const std::string& out_dir, int target) {
    if (!fs::exists(image)) throw ConfigError("image file not found: " + image);
    Eigen::MatrixXd img = invheat::load_grayscale(image);
    if (static_cast<int>(img.rows()) != target) img = invheat::resize_bilinear(img, target);
    fs::create_directories(out_dir);
    invheat::write_pgm(fs::path(out_dir) / "prepared.pgm", img);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"heat-conductivity inverse problem toolkit"};
    app.require_subcommand(1);

    CommonFlags fwd, inv, spec_cf, cmp;
    int modes = -1;
    std::string configs_csv, levels_csv;
    std::string prep_image, prep_out = "out";
    int prep_target = 32;

    CLI::App* c_forward = app.add_subcommand("forward", "solve the truth dynamics, write the trajectory");
    add_common_options(c_forward, fwd, false);

    CLI::App* c_invert = app.add_subcommand("invert", "reconstruct the conductivity from sensor data");
    add_common_options(c_invert, inv, true);

    CLI::App* c_spectrum = app.add_subcommand("spectrum", "eigenvalue / sensitivity-window report");
    add_common_options(c_spectrum, spec_cf, false);
    c_spectrum->add_option("--modes", modes, "number of non-null modes to report (-1 = all)")
        ->capture_default_str();

    CLI::App* c_compare = app.add_subcommand("compare", "sensor-configuration frontier study (2D)");
    add_common_options(c_compare, cmp, true);
    c_compare->add_option("--configs", configs_csv, "comma-separated sensor configurations")
        ->required();
    c_compare->add_option("--levels", levels_csv, "comma-separated descending loss levels")
        ->required();
    c_compare->add_option("--jobs", cmp.jobs, "parallel worker slots (0 = logical processors)")
        ->capture_default_str();

    CLI::App* c_prep = app.add_subcommand("prep-image", "resize a grayscale image to the grid, write PGM");
    c_prep->add_option("--image", prep_image, "input grayscale image (PGM or CSV)")->required();
    c_prep->add_option("--out", prep_out, "output directory")->capture_default_str();
    c_prep->add_option("--J", prep_target, "target side length")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*c_forward) {
            merge_config_file(c_forward, fwd, false);
            return run_forward(fwd);
        }
        if (*c_invert) {
            merge_config_file(c_invert, inv, true);
            return run_invert(inv);
        }
        if (*c_spectrum) {
            merge_config_file(c_spectrum, spec_cf, false);
            return run_spectrum(spec_cf, modes);
        }
        if (*c_compare) {
            merge_config_file(c_compare, cmp, true);
            std::vector<std::string> configs;
            for (auto& piece : CLI::detail::split(configs_csv, ','))
                if (!piece.empty()) configs.push_back(piece);
            std::vector<double> levels;
            for (auto& piece : CLI::detail::split(levels_csv, ','))
                if (!piece.empty()) levels.push_back(std::stod(piece));
            return run_compare(cmp, configs, levels);
        }
        if (*c_prep) return run_prep_image(prep_image, prep_out, prep_target);
    } catch (const invheat::DegenerateProblemError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 1;
    }
    return 2;
}
