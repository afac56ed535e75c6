#include "mmra/experiment.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <system_error>
#include <tuple>

#include "mmra/bounds.hpp"
#include "mmra/optimizer.hpp"
#include "mmra/parallel.hpp"
#include "mmra/random.hpp"

namespace mmra {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <class T>
T parse_integer(std::string_view key, std::string_view text) {
    T value{};
    const auto t = trim(text);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty())
        throw ConfigError("config key '" + std::string(key) + "': expected an integer, got '" + std::string(t) + "'");
    return value;
}

double parse_double(std::string_view key, std::string_view text) {
    double value{};
    const auto t = trim(text);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty() || !std::isfinite(value))
        throw ConfigError("config key '" + std::string(key) + "': expected a number, got '" + std::string(t) + "'");
    return value;
}

std::vector<int> parse_int_list(std::string_view key, std::string_view text) {
    std::vector<int> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto item = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        out.push_back(parse_integer<int>(key, item));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::uint64_t point_seed(std::uint64_t master, int tau_u, int M, int tag) {
    return derive_seed(master, (static_cast<std::uint64_t>(tau_u) << 32) | static_cast<std::uint32_t>(M),
                       static_cast<std::uint64_t>(tag));
}

std::vector<std::pair<int, int>> grid_points(const ExperimentConfig& c) {
    std::vector<std::pair<int, int>> pts;
    for (int tu : c.tau_u_list)
        for (int m : c.M_list) pts.emplace_back(tu, m);
    std::sort(pts.begin(), pts.end());
    return pts;
}

std::string fmt_int(long long v) { return std::to_string(v); }

}  // namespace

std::string_view to_string(ExperimentId id) noexcept {
    switch (id) {
        case ExperimentId::Fig1: return "fig1";
        case ExperimentId::Fig2: return "fig2";
        case ExperimentId::BoundsSweep: return "bounds-sweep";
        case ExperimentId::Validate: return "validate";
        case ExperimentId::Scaling: return "scaling";
    }
    return "?";
}

std::optional<ExperimentId> parse_experiment_id(std::string_view text) noexcept {
    for (auto id : {ExperimentId::Fig1, ExperimentId::Fig2, ExperimentId::BoundsSweep, ExperimentId::Validate,
                    ExperimentId::Scaling})
        if (text == to_string(id)) return id;
    return std::nullopt;
}

ExperimentConfig default_config(ExperimentId id, bool full_scale) {
    ExperimentConfig c;
    c.experiment_id = id;
    c.full_scale = full_scale;
    // fig1 evaluates only R3, so it runs the full grid at either scale.
    if (full_scale || id == ExperimentId::Fig1) {
        c.K = 800;
        c.M_list = {100, 400};
        c.tau_u_list.clear();
        for (int t = 100; t <= 1000; t += 100) c.tau_u_list.push_back(t);
    }
    return c;
}

ExperimentConfig parse_config(std::istream& in, std::optional<ExperimentId> expected, bool full_scale) {
    std::map<std::string, std::string, std::less<>> kv;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key{trim(view.substr(0, eq))};
        if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        if (kv.count(key)) throw ConfigError("config key '" + key + "' given twice");
        kv[key] = std::string(trim(view.substr(eq + 1)));
    }

    std::optional<ExperimentId> id = expected;
    if (auto it = kv.find("experiment_id"); it != kv.end()) {
        const auto parsed = parse_experiment_id(it->second);
        if (!parsed) throw ConfigError("unknown experiment_id '" + it->second + "'");
        if (expected && *parsed != *expected)
            throw ConfigError("config experiment_id '" + it->second + "' does not match subcommand '" +
                              std::string(to_string(*expected)) + "'");
        id = parsed;
    }
    if (!id) throw ConfigError("config has no experiment_id");

    ExperimentConfig c = default_config(*id, full_scale);
    for (const auto& [key, value] : kv) {
        if (key == "experiment_id") continue;
        if (key == "K") c.K = parse_integer<int>(key, value);
        else if (key == "snr_db") c.snr_db = parse_double(key, value);
        else if (key == "alpha") c.alpha = parse_double(key, value);
        else if (key == "M") c.M_list = parse_int_list(key, value);
        else if (key == "tau_u") c.tau_u_list = parse_int_list(key, value);
        else if (key == "tau_p") c.tau_p_list = parse_int_list(key, value);
        else if (key == "pa_k") c.pa_k_list = parse_int_list(key, value);
        else if (key == "mc_samples") c.mc_samples = parse_integer<std::size_t>(key, value);
        else if (key == "sim_slots") c.sim_slots = parse_integer<std::size_t>(key, value);
        else if (key == "seed") c.seed = parse_integer<std::uint64_t>(key, value);
        else if (key == "output_dir") c.output_dir = value;
        else throw ConfigError("unknown config key '" + key + "'");
    }
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, std::optional<ExperimentId> expected,
                             bool full_scale) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path.string() + "'");
    return parse_config(in, expected, full_scale);
}

void validate(const ExperimentConfig& c) {
    if (c.K < 1) throw ConfigError("K must be >= 1");
    if (!(c.alpha >= 0.0 && c.alpha < 1.0)) throw ConfigError("alpha must lie in [0, 1)");
    if (c.M_list.empty() || c.tau_u_list.empty()) throw ConfigError("M and tau_u lists must be non-empty");
    for (int m : c.M_list)
        if (m < 2) throw ConfigError("every M must be >= 2, got " + std::to_string(m));
    for (int t : c.tau_u_list)
        if (t < 3) throw ConfigError("every tau_u must be >= 3, got " + std::to_string(t));
    for (int t : c.tau_p_list)
        if (t < 1) throw ConfigError("every tau_p must be >= 1, got " + std::to_string(t));
    for (int x : c.pa_k_list)
        if (x < 1 || x > c.K) throw ConfigError("every pa_k must lie in [1, K], got " + std::to_string(x));
    if (c.mc_samples < 1) throw ConfigError("mc_samples must be >= 1");
    if (c.sim_slots < 1) throw ConfigError("sim_slots must be >= 1");
    if (c.output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

std::vector<Fig1Row> run_fig1(const ExperimentConfig& c) {
    validate(c);
    const auto moments = analytic_moments(c.distribution());
    const auto pts = grid_points(c);
    std::vector<Fig1Row> rows(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
        const auto [tau_u, M] = pts[i];
        const auto opt = grid_optimize_r3(tau_u, M, c.K, moments);
        const auto h = heuristic_params(tau_u, M, c.K, moments);
        rows[i] = {tau_u, M, opt.tau_p_opt, opt.pa_k_opt, h.tau_p_h, h.pa_h_times_K};
    });
    return rows;
}

std::vector<Fig2Row> run_fig2(const ExperimentConfig& c) {
    validate(c);
    const auto dist = c.distribution();
    const auto moments = analytic_moments(dist);
    const auto pts = grid_points(c);
    std::vector<Fig2Row> rows(2 * pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
        const auto [tau_u, M] = pts[i];
        const auto opt = grid_optimize_r3(tau_u, M, c.K, moments);
        const auto h = heuristic_params(tau_u, M, c.K, moments);
        auto evaluate = [&](const char* name, int tau_p, double pa_k, int tag) {
            const SystemParams p{M, c.K, tau_u, tau_p, pa_k / c.K, std::nullopt};
            const auto r1 = rate1_mc(p, dist, c.mc_samples, point_seed(c.seed, tau_u, M, tag));
            return Fig2Row{tau_u, M, name, tau_p, pa_k, r1.value, r1.std_error, rate2(p, moments).value,
                           rate3(p, moments).value};
        };
        const double heur_load = std::clamp(h.pa_h_times_K, 1.0, static_cast<double>(c.K));
        rows[2 * i] = evaluate("heur", heuristic_tau_p(tau_u), heur_load, 0);
        rows[2 * i + 1] = evaluate("opt", opt.tau_p_opt, opt.pa_k_opt, 1);
    });
    return rows;
}

std::vector<SweepRow> run_bounds_sweep(const ExperimentConfig& c) {
    validate(c);
    const auto dist = c.distribution();
    const auto moments = analytic_moments(dist);
    struct Job {
        int tau_u, M, tau_p;
        double pa_k;
    };
    std::vector<Job> jobs;
    for (const auto& [tau_u, M] : grid_points(c)) {
        const auto h = heuristic_params(tau_u, M, c.K, moments);
        std::vector<int> tps = c.tau_p_list.empty() ? std::vector<int>{heuristic_tau_p(tau_u)} : c.tau_p_list;
        std::vector<double> loads;
        for (int x : c.pa_k_list) loads.push_back(x);
        if (loads.empty()) loads.push_back(std::min(h.pa_h_times_K, static_cast<double>(c.K)));
        for (int tp : tps) {
            if (tp >= tau_u) continue;
            for (double x : loads) jobs.push_back({tau_u, M, tp, x});
        }
    }
    std::sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) {
        return std::tie(a.tau_u, a.M, a.tau_p, a.pa_k) < std::tie(b.tau_u, b.M, b.tau_p, b.pa_k);
    });

    std::vector<SweepRow> rows(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t i) {
        const Job& j = jobs[i];
        const SystemParams p{j.M, c.K, j.tau_u, j.tau_p, j.pa_k / c.K, std::nullopt};
        const auto r1 = rate1_mc(p, dist, c.mc_samples, derive_seed(c.seed, i, 2));
        const double r3 = j.pa_k >= 1.0 ? rate3(p, moments).value : std::nan("");
        rows[i] = {j.tau_u, j.M, j.tau_p, j.pa_k, r1.value, r1.std_error, rate2(p, moments).value, r3,
                   rate_asym(p, moments).value};
    });
    return rows;
}

std::vector<ScalingRow> run_scaling(const ExperimentConfig& c) {
    validate(c);
    const auto moments = analytic_moments(c.distribution());
    const std::array<std::pair<ScalingRegime, std::vector<std::pair<int, int>>>, 3> series{{
        {ScalingRegime::ManyAntennas, {{1000, 100}, {10000, 100}, {100000, 100}}},
        {ScalingRegime::LongSlots, {{100, 1000}, {100, 10000}, {100, 100000}}},
        {ScalingRegime::Balanced, {{256, 256}, {1024, 1024}, {4096, 4096}}},
    }};
    std::vector<ScalingRow> rows;
    for (const auto& [regime, pts] : series) {
        for (const auto& pt : scaling_probe(regime, pts, c.K, moments))
            rows.push_back({std::string(to_string(regime)), pt.M, pt.tau_u, pt.pa_k_h, pt.sinr_h, pt.rate_h,
                            pt.sinr_normalized, pt.rate_normalized, pt.clamped});
    }
    return rows;
}

std::size_t CsvTable::column(std::string_view name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::out_of_range("no CSV column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - header.begin());
}

std::vector<double> CsvTable::numeric_column(std::string_view name) const {
    const std::size_t idx = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        double v{};
        const auto& cell = r.at(idx);
        const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (ec != std::errc{} || ptr != cell.data() + cell.size())
            throw std::invalid_argument("CSV column '" + std::string(name) + "' has non-numeric cell '" + cell + "'");
        out.push_back(v);
    }
    return out;
}

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) throw std::runtime_error("format_number failed");
    return std::string(buf.data(), ptr);
}

CsvTable to_csv(const std::vector<Fig1Row>& rows) {
    CsvTable t{{"tau_u", "M", "tau_p_opt", "paK_opt", "tau_p_h", "paK_h"}, {}};
    for (const auto& r : rows)
        t.rows.push_back({fmt_int(r.tau_u), fmt_int(r.M), fmt_int(r.tau_p_opt), fmt_int(r.pa_k_opt),
                          format_number(r.tau_p_h), format_number(r.pa_k_h)});
    return t;
}

CsvTable to_csv(const std::vector<Fig2Row>& rows) {
    CsvTable t{{"tau_u", "M", "point", "tau_p", "paK", "R1", "R1_stderr", "R2", "R3"}, {}};
    for (const auto& r : rows)
        t.rows.push_back({fmt_int(r.tau_u), fmt_int(r.M), r.point, fmt_int(r.tau_p), format_number(r.pa_k),
                          format_number(r.r1), format_number(r.r1_stderr), format_number(r.r2), format_number(r.r3)});
    return t;
}

CsvTable to_csv(const std::vector<SweepRow>& rows) {
    CsvTable t{{"tau_u", "M", "tau_p", "paK", "R1", "R1_stderr", "R2", "R3", "R_asym"}, {}};
    for (const auto& r : rows)
        t.rows.push_back({fmt_int(r.tau_u), fmt_int(r.M), fmt_int(r.tau_p), format_number(r.pa_k),
                          format_number(r.r1), format_number(r.r1_stderr), format_number(r.r2), format_number(r.r3),
                          format_number(r.r_asym)});
    return t;
}

CsvTable to_csv(const std::vector<ScalingRow>& rows) {
    CsvTable t{{"regime", "M", "tau_u", "paK_h", "sinr_h", "rate_h", "sinr_normalized", "rate_normalized",
                "clamped"},
               {}};
    for (const auto& r : rows)
        t.rows.push_back({r.regime, fmt_int(r.M), fmt_int(r.tau_u), format_number(r.pa_k_h), format_number(r.sinr_h),
                          format_number(r.rate_h), format_number(r.sinr_normalized), format_number(r.rate_normalized),
                          r.clamped ? "1" : "0"});
    return t;
}

void write_csv(const CsvTable& t, std::ostream& out) {
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
        out << '\n';
    };
    line(t.header);
    for (const auto& r : t.rows) line(r);
}

void write_csv(const CsvTable& t, const std::filesystem::path& path) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    write_csv(t, out);
    out.flush();
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

CsvTable read_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.emplace_back(trim(cell));
        if (!s.empty() && s.back() == ',') cells.emplace_back();
        return cells;
    };
    if (!std::getline(in, line)) return t;
    t.header = split(line);
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto cells = split(line);
        if (cells.size() != t.header.size())
            throw std::invalid_argument("CSV row has " + std::to_string(cells.size()) + " cells, header has " +
                                        std::to_string(t.header.size()));
        t.rows.push_back(std::move(cells));
    }
    return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open CSV file '" + path.string() + "'");
    return read_csv(in);
}

}  // namespace mmra
