#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mmra/channel_model.hpp"

namespace mmra {

/// Raised for malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when an input or output file cannot be read or written. The
/// message names the path.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ExperimentId { Fig1, Fig2, BoundsSweep, Validate, Scaling };

std::string_view to_string(ExperimentId id) noexcept;
std::optional<ExperimentId> parse_experiment_id(std::string_view text) noexcept;

struct ExperimentConfig {
    ExperimentId experiment_id = ExperimentId::Fig1;
    int K = 50;
    double snr_db = 10.0;
    double alpha = 0.25;
    std::vector<int> M_list{16, 32, 64};
    std::vector<int> tau_u_list{60, 120, 240};
    std::size_t mc_samples = 10000;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    std::vector<int> tau_p_list;   ///< bounds-sweep only; empty means the heuristic tau_p
    std::vector<int> pa_k_list;    ///< bounds-sweep only; empty means the heuristic p_a K
    std::size_t sim_slots = 100000;
    bool full_scale = false;

    double beta_bar() const noexcept { return db_to_linear(snr_db); }
    BetaDistribution distribution() const noexcept { return {beta_bar(), alpha}; }
};

/// Desk-scale defaults (K = 50, M in {16, 32, 64}, tau_u in {60, 120, 240}),
/// or the full-scale grid (K = 800, M in {100, 400}, tau_u in
/// {100, 200, ..., 1000}) when full_scale is set. fig1 always gets the
/// full-scale grid.
ExperimentConfig default_config(ExperimentId id, bool full_scale);

/// Parses the flat "key = value" format over the defaults. Lists are
/// comma-separated; '#' starts a comment. Throws ConfigError.
///
///   experiment_id = fig2
///   K = 800
///   snr_db = 10
///   alpha = 0.25
///   M = 100, 400
///   tau_u = 100, 200, 300
///   mc_samples = 20000
///   seed = 7
///   output_dir = results
ExperimentConfig parse_config(std::istream& in, std::optional<ExperimentId> expected, bool full_scale);
ExperimentConfig load_config(const std::filesystem::path& path, std::optional<ExperimentId> expected,
                             bool full_scale);

void validate(const ExperimentConfig& config);

struct Fig1Row {
    int tau_u;
    int M;
    int tau_p_opt;
    int pa_k_opt;
    double tau_p_h;
    double pa_k_h;
};

struct Fig2Row {
    int tau_u;
    int M;
    std::string point;  ///< "heur" or "opt"
    int tau_p;
    double pa_k;
    double r1;
    double r1_stderr;
    double r2;
    double r3;
};

struct SweepRow {
    int tau_u;
    int M;
    int tau_p;
    double pa_k;
    double r1;
    double r1_stderr;
    double r2;
    double r3;
    double r_asym;
};

struct ScalingRow {
    std::string regime;
    int M;
    int tau_u;
    double pa_k_h;
    double sinr_h;
    double rate_h;
    double sinr_normalized;
    double rate_normalized;
    bool clamped;
};

/// Rows sorted by (tau_u, M[, point]).
std::vector<Fig1Row> run_fig1(const ExperimentConfig& config);
std::vector<Fig2Row> run_fig2(const ExperimentConfig& config);
std::vector<SweepRow> run_bounds_sweep(const ExperimentConfig& config);
std::vector<ScalingRow> run_scaling(const ExperimentConfig& config);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a header column, or throws std::out_of_range.
    std::size_t column(std::string_view name) const;
    std::vector<double> numeric_column(std::string_view name) const;
};

CsvTable to_csv(const std::vector<Fig1Row>& rows);
CsvTable to_csv(const std::vector<Fig2Row>& rows);
CsvTable to_csv(const std::vector<SweepRow>& rows);
CsvTable to_csv(const std::vector<ScalingRow>& rows);

/// Shortest decimal that parses back to exactly the same double.
std::string format_number(double value);

void write_csv(const CsvTable& table, std::ostream& out);
void write_csv(const CsvTable& table, const std::filesystem::path& path);
CsvTable read_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);

/// Renders a CSV table as an SVG line chart. Each y column becomes one line
/// per distinct combination of the group_by column values; rows with a
/// non-numeric x or y cell are skipped.
void write_svg_plot(const CsvTable& table, const std::string& x_column, const std::vector<std::string>& y_columns,
                    const std::vector<std::string>& group_by, const std::filesystem::path& path);

}  // namespace mmra
