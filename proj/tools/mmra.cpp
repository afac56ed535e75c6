// mmra: runs the random-access sweeps and validation suites, writing CSV.
//
//   mmra fig1     [--config F] [--seed N] [--out DIR] [--full-scale]
//   mmra fig2     ...
//   mmra sweep    ...
//   mmra scaling  ...
//   mmra validate ...
//   mmra plot --csv FILE [--x COL] [--y COL,...] [--group COL,...] [--out DIR]
//
// Exit status: 0 success, 1 invariant failure, 2 configuration or I/O error.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mmra/experiment.hpp"
#include "mmra/validation.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvariant = 1;
constexpr int kExitConfig = 2;

struct RunOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    bool full_scale = false;
};

mmra::ExperimentConfig resolve_config(mmra::ExperimentId id, const RunOptions& o) {
    auto c = o.config_path.empty() ? mmra::default_config(id, o.full_scale)
                                   : mmra::load_config(o.config_path, id, o.full_scale);
    if (o.seed) c.seed = *o.seed;
    if (o.out_dir) c.output_dir = *o.out_dir;
    mmra::validate(c);
    return c;
}

void add_run_flags(CLI::App* sub, RunOptions& o) {
    sub->add_option("--config", o.config_path, "key = value config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "master seed, overrides the config");
    sub->add_option("--out", o.out_dir, "output directory, overrides the config");
    sub->add_flag("--full-scale", o.full_scale, "full-scale defaults (K = 800, M in {100, 400})");
}

void emit(const mmra::CsvTable& table, const mmra::ExperimentConfig& c, const std::string& name) {
    const fs::path path = fs::path(c.output_dir) / (name + ".csv");
    mmra::write_csv(table, path);
    std::cout << "wrote " << path.string() << " (" << table.rows.size() << " rows)\n";
}

struct PlotDefaults {
    std::string x;
    std::vector<std::string> y;
    std::vector<std::string> group;
};

// Recognizes each subcommand's CSV by a column only it writes.
std::optional<PlotDefaults> plot_defaults(const mmra::CsvTable& t) {
    auto has = [&](const char* col) { return std::find(t.header.begin(), t.header.end(), col) != t.header.end(); };
    if (has("tau_p_opt")) return PlotDefaults{"tau_u", {"tau_p_opt", "paK_opt", "tau_p_h", "paK_h"}, {"M"}};
    if (has("point")) return PlotDefaults{"tau_u", {"R1", "R2", "R3"}, {"M", "point"}};
    if (has("R_asym")) return PlotDefaults{"tau_u", {"R1", "R2", "R3", "R_asym"}, {"M", "tau_p", "paK"}};
    if (has("regime")) return PlotDefaults{"M", {"sinr_normalized", "rate_normalized"}, {"regime"}};
    return std::nullopt;
}

int run_plot(const std::string& csv, std::string x, std::vector<std::string> y, std::vector<std::string> group,
             const std::optional<std::string>& out_dir) {
    const auto table = mmra::read_csv(fs::path(csv));
    if (const auto d = plot_defaults(table)) {
        if (x.empty()) x = d->x;
        if (y.empty()) y = d->y;
        if (group.empty()) group = d->group;
    }
    if (x.empty()) x = table.header.front();
    if (y.empty()) throw mmra::ConfigError("plot: unknown CSV layout, pass --y");
    const fs::path dir = out_dir ? fs::path(*out_dir) : fs::path(csv).parent_path();
    const fs::path svg = dir / (fs::path(csv).stem().string() + ".svg");
    mmra::write_svg_plot(table, x, y, group, svg);
    std::cout << "wrote " << svg.string() << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Massive-MIMO random-access rate bounds, optimizer and slot simulator"};
    app.require_subcommand(1);

    RunOptions fig1_o, fig2_o, sweep_o, scaling_o, validate_o;
    auto* fig1 = app.add_subcommand("fig1", "optimal and heuristic operating points over tau_u");
    auto* fig2 = app.add_subcommand("fig2", "R1, R2, R3 at the optimal and heuristic points");
    auto* sweep = app.add_subcommand("sweep", "all bounds over a (tau_u, M, tau_p, p_a K) grid");
    auto* scaling = app.add_subcommand("scaling", "normalized heuristic SINR and rate in three scaling regimes");
    auto* val = app.add_subcommand("validate", "run the invariant suites; nonzero exit on any failure");
    add_run_flags(fig1, fig1_o);
    add_run_flags(fig2, fig2_o);
    add_run_flags(sweep, sweep_o);
    add_run_flags(scaling, scaling_o);
    add_run_flags(val, validate_o);

    std::string plot_csv, plot_x;
    std::vector<std::string> plot_y, plot_group;
    std::optional<std::string> plot_out;
    auto* plot = app.add_subcommand("plot", "render a result CSV as an SVG line chart");
    plot->add_option("--csv", plot_csv, "input CSV written by another subcommand")->required();
    plot->add_option("--x", plot_x, "x-axis column");
    plot->add_option("--y", plot_y, "y columns")->delimiter(',');
    plot->add_option("--group", plot_group, "columns that split rows into separate lines")->delimiter(',');
    plot->add_option("--out", plot_out, "output directory; defaults to the CSV's directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*fig1) {
            const auto c = resolve_config(mmra::ExperimentId::Fig1, fig1_o);
            emit(mmra::to_csv(mmra::run_fig1(c)), c, "fig1");
        } else if (*fig2) {
            const auto c = resolve_config(mmra::ExperimentId::Fig2, fig2_o);
            emit(mmra::to_csv(mmra::run_fig2(c)), c, "fig2");
        } else if (*sweep) {
            const auto c = resolve_config(mmra::ExperimentId::BoundsSweep, sweep_o);
            emit(mmra::to_csv(mmra::run_bounds_sweep(c)), c, "bounds_sweep");
        } else if (*scaling) {
            const auto c = resolve_config(mmra::ExperimentId::Scaling, scaling_o);
            emit(mmra::to_csv(mmra::run_scaling(c)), c, "scaling");
        } else if (*val) {
            const auto c = resolve_config(mmra::ExperimentId::Validate, validate_o);
            const auto report = mmra::run_validate(c);
            const std::string text = report.to_text();
            std::cout << text;
            const fs::path path = fs::path(c.output_dir) / "validate.txt";
            std::error_code ec;
            fs::create_directories(path.parent_path(), ec);
            std::ofstream out(path);
            if (!out || !(out << text)) throw mmra::IoError("cannot write '" + path.string() + "'");
            return report.all_passed() ? kExitOk : kExitInvariant;
        } else if (*plot) {
            return run_plot(plot_csv, plot_x, plot_y, plot_group, plot_out);
        }
    } catch (const mmra::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const mmra::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::out_of_range& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid parameters: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvariant;
    }
    return kExitOk;
}
