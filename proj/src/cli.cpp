#include "opcpd/cli.hpp"

#include "opcpd/csv.hpp"
#include "opcpd/detector.hpp"
#include "opcpd/error.hpp"
#include "opcpd/presets.hpp"
#include "opcpd/report.hpp"
#include "opcpd/simulate.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>
#include <fstream>
#include <iostream>
#include <sstream>

namespace opcpd {

namespace {

constexpr const char* kCoordinatesNote =
    "Sample indices are 0-based. The first d*tau samples only seed the first pattern; window k "
    "covers pattern anchors [d*tau + k*w, d*tau + (k+1)*w). A change-point at split (m', n') is "
    "reported at sample d*tau + m'*w of its segment (precision +-w/2). For the built-in presets "
    "(10003 samples, m windows before the change) the signed time axis t maps to index "
    "t + d*tau + m*w - 1.";

// Raised for bad flag values that CLI11 cannot check by itself.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct InputOptions {
    std::string path;
    std::string column;
    bool header = false;
    bool no_header = false;
    char delimiter = ',';
};

struct DetectOptions {
    int order = 3;
    int delay = 1;
    std::size_t window = 500;
    double sigma_sq = 1.0;
    double cmmd_scale = 1.0;
    std::string statistic = "cmmd";
    std::size_t max_changes = 1;
    std::size_t min_segment_windows = 2;
    std::optional<double> threshold;
    bool emit_distributions = false;
};

struct SimOptions {
    std::string preset;
    std::size_t length = 0;
    std::vector<std::string> coeffs;
    std::vector<std::string> distortions;
    double innovation_sd = 1.0;
    std::uint64_t seed = 0;
};

void add_input_flags(CLI::App& cmd, InputOptions& in) {
    cmd.add_option("input", in.path, "CSV file holding the series ('-' for standard input)")
        ->required();
    cmd.add_option("--column", in.column,
                   "Column name or 0-based index (default: first numeric column)");
    auto* header = cmd.add_flag("--header", in.header, "First row is a header");
    cmd.add_flag("--no-header", in.no_header, "First row is data")->excludes(header);
    cmd.add_option("--delimiter", in.delimiter, "Field delimiter")->capture_default_str();
}

void add_pattern_flags(CLI::App& cmd, DetectOptions& d) {
    cmd.add_option("--order,-d", d.order, "Ordinal pattern order d")
        ->check(CLI::Range(1, kMaxOrder))
        ->capture_default_str();
    cmd.add_option("--delay,-t", d.delay, "Pattern delay tau")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd.add_option("--window,-w", d.window, "Window size in pattern positions")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd.add_option("--sigma-sq", d.sigma_sq, "RBF kernel bandwidth sigma^2")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd.add_option("--cmmd-scale", d.cmmd_scale, "Multiplier on the CMMD correction term")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
}

void add_detector_flags(CLI::App& cmd, DetectOptions& d) {
    cmd.add_option("--statistic", d.statistic, "Statistic to maximise")
        ->check(CLI::IsMember({"mmd", "cmmd"}, CLI::ignore_case))
        ->capture_default_str();
    cmd.add_option("--max-changes", d.max_changes, "Maximum number of change-points")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd.add_option("--min-segment-windows", d.min_segment_windows,
                   "Split a segment only if it has at least twice this many windows")
        ->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()))
        ->capture_default_str();
    cmd.add_option("--threshold", d.threshold, "Minimum statistic value to accept a split");
}

void add_sim_flags(CLI::App& cmd, SimOptions& s) {
    cmd.add_option("--preset", s.preset, "Scenario preset")
        ->check(CLI::IsMember(preset_names()));
    cmd.add_option("--length", s.length, "Series length (explicit schedule)");
    cmd.add_option("--coeff", s.coeffs, "AR coefficient segment START:PHI (repeatable)");
    cmd.add_option("--distort", s.distortions,
                   "Calibration distortion START=STEP[;STEP...], STEP one of affine:A:B, "
                   "tails:THRESHOLD:FACTOR, pwl:X0:Y0:X1:Y1[...] (repeatable)");
    cmd.add_option("--innovation-sd", s.innovation_sd, "Innovation standard deviation")
        ->check(CLI::PositiveNumber);
    cmd.add_option("--seed", s.seed, "Random seed")->capture_default_str();
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string part;
    std::istringstream in(text);
    while (std::getline(in, part, sep)) {
        out.push_back(part);
    }
    if (!text.empty() && text.back() == sep) {
        out.emplace_back();
    }
    return out;
}

double to_real(const std::string& text, const std::string& flag) {
    const auto v = parse_real(text);
    if (!v) {
        throw UsageError(flag + ": cannot parse '" + text + "' as a number");
    }
    return *v;
}

std::size_t to_index(const std::string& text, const std::string& flag) {
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw UsageError(flag + ": cannot parse '" + text + "' as a sample index");
    }
    return value;
}

MonotoneMap parse_map(const std::string& text) {
    MonotoneMap map;
    for (const auto& step : split(text, ';')) {
        const auto parts = split(step, ':');
        const std::string& kind = parts.empty() ? step : parts[0];
        if (kind == "affine" && parts.size() == 3) {
            map = map.then(MonotoneMap::affine(to_real(parts[1], "--distort"),
                                               to_real(parts[2], "--distort")));
        } else if (kind == "tails" && parts.size() == 3) {
            map = map.then(MonotoneMap::scale_tails(to_real(parts[1], "--distort"),
                                                    to_real(parts[2], "--distort")));
        } else if (kind == "pwl" && parts.size() >= 5 && parts.size() % 2 == 1) {
            std::vector<double> xs;
            std::vector<double> ys;
            for (std::size_t i = 1; i < parts.size(); i += 2) {
                xs.push_back(to_real(parts[i], "--distort"));
                ys.push_back(to_real(parts[i + 1], "--distort"));
            }
            map = map.then(MonotoneMap::piecewise_linear(std::move(xs), std::move(ys)));
        } else {
            throw UsageError("--distort: malformed step '" + step + "'");
        }
    }
    return map;
}

// Preset spec, or one assembled from explicit flags. Explicit flags
// override the corresponding preset fields.
Scenario build_scenario(const CLI::App& cmd, const SimOptions& s) {
    Scenario scenario;
    if (!s.preset.empty()) {
        scenario = make_preset(s.preset);
    } else {
        if (s.length == 0 || s.coeffs.empty()) {
            throw UsageError("either --preset or both --length and --coeff are required");
        }
    }
    if (cmd.count("--length") > 0) {
        scenario.spec.length = s.length;
    }
    if (!s.coeffs.empty()) {
        scenario.spec.coeff_schedule.clear();
        for (const auto& c : s.coeffs) {
            const auto parts = split(c, ':');
            if (parts.size() != 2) {
                throw UsageError("--coeff: expected START:PHI, got '" + c + "'");
            }
            scenario.spec.coeff_schedule.push_back(
                {to_index(parts[0], "--coeff"), to_real(parts[1], "--coeff")});
        }
    }
    if (!s.distortions.empty()) {
        scenario.spec.distortions.clear();
        for (const auto& d : s.distortions) {
            const auto eq = d.find('=');
            if (eq == std::string::npos) {
                throw UsageError("--distort: expected START=STEP[;STEP...], got '" + d + "'");
            }
            scenario.spec.distortions.push_back(
                {to_index(d.substr(0, eq), "--distort"), parse_map(d.substr(eq + 1))});
        }
    }
    if (cmd.count("--innovation-sd") > 0) {
        scenario.spec.innovation_sd = s.innovation_sd;
    }
    scenario.spec.seed = s.seed;
    try {
        scenario.spec.validate();
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    return scenario;
}

DetectorConfig detector_from(const DetectOptions& d) {
    DetectorConfig config;
    config.pattern = PatternConfig{d.order, d.delay, d.window};
    config.kernel = KernelConfig{d.sigma_sq, d.cmmd_scale};
    config.statistic = parse_statistic(d.statistic);
    config.multi = MultiConfig{d.max_changes, d.min_segment_windows, d.threshold};
    return config;
}

Series load_series(const InputOptions& in) {
    SeriesFile options;
    options.delimiter = in.delimiter;
    if (in.header) {
        options.has_header = true;
    } else if (in.no_header) {
        options.has_header = false;
    }
    if (!in.column.empty()) {
        const bool numeric = std::all_of(in.column.begin(), in.column.end(),
                                         [](unsigned char c) { return std::isdigit(c); });
        if (numeric) {
            options.column = to_index(in.column, "--column");
        } else {
            options.column = in.column;
        }
    }
    if (in.path == "-") {
        return read_series(std::cin, options);
    }
    std::ifstream file(in.path, std::ios::binary);
    if (!file) {
        throw UsageError("input: cannot open '" + in.path + "'");
    }
    return read_series(file, options);
}

void warn(std::ostream& err, const std::optional<std::string>& warning) {
    if (warning) {
        err << "warning: " << *warning << '\n';
    }
}

int cmd_detect(const InputOptions& in, const DetectOptions& d, std::ostream& out,
               std::ostream& err) {
    const DetectorConfig config = detector_from(d);
    warn(err, config.validate());
    const Series series = load_series(in);

    ReportConfig rc;
    rc.pattern = config.pattern;
    rc.kernel = config.kernel;
    rc.statistic = config.statistic;
    rc.multi = *config.multi;
    rc.input = in.path;
    rc.column = series.column_name;

    const auto detection = detect_multiple_traced(series.values, config);
    out << to_json(make_report(detection, rc, d.emit_distributions)).dump(2) << '\n';
    return kExitOk;
}

int cmd_scan(const InputOptions& in, const DetectOptions& d, std::ostream& out,
             std::ostream& err) {
    const DetectorConfig config = detector_from(d);
    warn(err, config.validate());
    const Series series = load_series(in);
    const auto patterns = extract_pattern_sequence(series.values, config.pattern);
    if (patterns.ids.size() < 2 * config.pattern.window) {
        throw InsufficientData(series.values.size(),
                               min_samples_for_windows(2, config.pattern), "samples");
    }
    const auto windows = windowed_distributions(patterns, config.pattern);
    const auto scan = mmd_scan(windows, config.kernel);
    out << "split_index,m_prime,n_prime,mmd,cmmd\n";
    for (const auto& p : curve_points(scan)) {
        out << p.split_index << ',' << p.split.before << ',' << p.split.after << ','
            << format_real(p.mmd) << ',' << format_real(p.cmmd) << '\n';
    }
    return kExitOk;
}

int cmd_simulate(const CLI::App& cmd, const SimOptions& s, std::ostream& out) {
    const Scenario scenario = build_scenario(cmd, s);
    write_series(out, simulate_ar1(scenario.spec));
    return kExitOk;
}

int cmd_mc(const CLI::App& cmd, const SimOptions& s, const DetectOptions& d,
           const std::string& mode, std::size_t reps, std::ostream& out, std::ostream& err) {
    Scenario scenario = build_scenario(cmd, s);
    if (s.preset.empty()) {
        scenario.detector = detector_from(d);
        scenario.detector.multi.reset();
        scenario.mode = McMode::Single;
    }
    auto& det = scenario.detector;
    if (cmd.count("--order")) det.pattern.order = d.order;
    if (cmd.count("--delay")) det.pattern.delay = d.delay;
    if (cmd.count("--window")) det.pattern.window = d.window;
    if (cmd.count("--sigma-sq")) det.kernel.sigma_sq = d.sigma_sq;
    if (cmd.count("--cmmd-scale")) det.kernel.cmmd_scale = d.cmmd_scale;
    if (cmd.count("--statistic")) det.statistic = parse_statistic(d.statistic);
    if (cmd.count("--max-changes") || cmd.count("--min-segment-windows") ||
        cmd.count("--threshold")) {
        MultiConfig multi = det.multi.value_or(MultiConfig{});
        if (cmd.count("--max-changes")) multi.max_changes = d.max_changes;
        if (cmd.count("--min-segment-windows")) multi.min_segment_windows = d.min_segment_windows;
        if (cmd.count("--threshold")) multi.score_threshold = d.threshold;
        det.multi = multi;
    }
    if (!mode.empty()) {
        scenario.mode = mode == "multiple" ? McMode::Multiple : McMode::Single;
    } else if (s.preset.empty() && det.multi && det.multi->max_changes > 1) {
        scenario.mode = McMode::Multiple;
    }
    warn(err, det.validate());
    const McReport report = monte_carlo(scenario.spec, det, reps, s.seed, scenario.mode);
    out << to_json(report, s.preset).dump(2) << '\n';
    return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Change-point detection from ordinal pattern distributions using (corrected) "
                 "maximum mean discrepancy.\n" +
                 std::string(kCoordinatesNote)};
    app.name("opcpd");
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));
    app.footer("Environment: OP_CPD_THREADS caps the number of worker threads.");

    InputOptions detect_in;
    DetectOptions detect_opts;
    auto* detect = app.add_subcommand("detect", "Detect change-points; prints a JSON report");
    add_input_flags(*detect, detect_in);
    add_pattern_flags(*detect, detect_opts);
    add_detector_flags(*detect, detect_opts);
    detect->add_flag("--emit-distributions", detect_opts.emit_distributions,
                     "Include per-window pattern distributions in the report");

    InputOptions scan_in;
    DetectOptions scan_opts;
    auto* scan = app.add_subcommand(
        "scan", "MMD/CMMD curve over all splits; CSV split_index,m_prime,n_prime,mmd,cmmd");
    add_input_flags(*scan, scan_in);
    add_pattern_flags(*scan, scan_opts);

    SimOptions sim_opts;
    auto* simulate = app.add_subcommand("simulate", "Simulate a piecewise AR(1) series as CSV");
    add_sim_flags(*simulate, sim_opts);

    SimOptions mc_sim;
    DetectOptions mc_det;
    std::size_t reps = 1000;
    std::string mode;
    auto* mc = app.add_subcommand("mc", "Monte Carlo histogram of change-point estimates (JSON)");
    add_sim_flags(*mc, mc_sim);
    add_pattern_flags(*mc, mc_det);
    add_detector_flags(*mc, mc_det);
    mc->add_option("--reps", reps, "Number of replications")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    mc->add_option("--mode", mode, "single: histogram of splits; multiple: of sample indices")
        ->check(CLI::IsMember({"single", "multiple"}));

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (detect->parsed()) return cmd_detect(detect_in, detect_opts, out, err);
        if (scan->parsed()) return cmd_scan(scan_in, scan_opts, out, err);
        if (simulate->parsed()) return cmd_simulate(*simulate, sim_opts, out);
        if (mc->parsed()) return cmd_mc(*mc, mc_sim, mc_det, mode, reps, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const InsufficientData& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const InvalidSample& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const McError& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}

} // namespace opcpd
