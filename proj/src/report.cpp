#include "opcpd/report.hpp"

#include "opcpd/error.hpp"

#include <set>

namespace opcpd {

using Json = nlohmann::ordered_json;

namespace {

// Throws unless `json` is an object whose keys are exactly `keys`.
void expect_keys(const Json& json, std::initializer_list<const char*> keys, const char* where) {
    if (!json.is_object()) {
        throw DomainError(std::string(where) + ": expected an object");
    }
    std::set<std::string> expected(keys.begin(), keys.end());
    for (const auto& [key, value] : json.items()) {
        if (!expected.contains(key)) {
            throw DomainError(std::string(where) + ": unknown field '" + key + "'");
        }
    }
    for (const auto& key : expected) {
        if (!json.contains(key)) {
            throw DomainError(std::string(where) + ": missing field '" + key + "'");
        }
    }
}

Json config_json(const ReportConfig& c) {
    Json j;
    j["order"] = c.pattern.order;
    j["delay"] = c.pattern.delay;
    j["window"] = c.pattern.window;
    j["sigma_sq"] = c.kernel.sigma_sq;
    j["cmmd_scale"] = c.kernel.cmmd_scale;
    j["statistic"] = std::string(to_string(c.statistic));
    j["max_changes"] = c.multi.max_changes;
    j["min_segment_windows"] = c.multi.min_segment_windows;
    j["score_threshold"] = c.multi.score_threshold ? Json(*c.multi.score_threshold) : Json(nullptr);
    j["seed"] = c.seed ? Json(*c.seed) : Json(nullptr);
    j["input"] = c.input;
    j["column"] = c.column;
    return j;
}

ReportConfig config_from_json(const Json& j) {
    expect_keys(j,
                {"order", "delay", "window", "sigma_sq", "cmmd_scale", "statistic", "max_changes",
                 "min_segment_windows", "score_threshold", "seed", "input", "column"},
                "config");
    ReportConfig c;
    c.pattern.order = j.at("order").get<int>();
    c.pattern.delay = j.at("delay").get<int>();
    c.pattern.window = j.at("window").get<std::size_t>();
    c.kernel.sigma_sq = j.at("sigma_sq").get<double>();
    c.kernel.cmmd_scale = j.at("cmmd_scale").get<double>();
    c.statistic = parse_statistic(j.at("statistic").get<std::string>());
    c.multi.max_changes = j.at("max_changes").get<std::size_t>();
    c.multi.min_segment_windows = j.at("min_segment_windows").get<std::size_t>();
    if (!j.at("score_threshold").is_null()) {
        c.multi.score_threshold = j.at("score_threshold").get<double>();
    }
    if (!j.at("seed").is_null()) {
        c.seed = j.at("seed").get<std::uint64_t>();
    }
    c.input = j.at("input").get<std::string>();
    c.column = j.at("column").get<std::string>();
    return c;
}

Json estimate_json(const EstimateRecord& e) {
    Json j;
    j["m_prime"] = e.split.before;
    j["n_prime"] = e.split.after;
    j["sample_index"] = e.sample_index;
    j["precision_half_width"] = e.precision_half_width;
    j["score"] = e.score;
    j["segment_start"] = e.segment_start;
    j["segment_length"] = e.segment_length;
    return j;
}

EstimateRecord estimate_from_json(const Json& j) {
    expect_keys(j,
                {"m_prime", "n_prime", "sample_index", "precision_half_width", "score",
                 "segment_start", "segment_length"},
                "estimate");
    EstimateRecord e;
    e.split = {j.at("m_prime").get<std::size_t>(), j.at("n_prime").get<std::size_t>()};
    e.sample_index = j.at("sample_index").get<std::size_t>();
    e.precision_half_width = j.at("precision_half_width").get<double>();
    e.score = j.at("score").get<double>();
    e.segment_start = j.at("segment_start").get<std::size_t>();
    e.segment_length = j.at("segment_length").get<std::size_t>();
    return e;
}

Json segment_json(const SegmentRecord& s) {
    Json j;
    j["start"] = s.start;
    j["length"] = s.length;
    j["n_windows"] = s.n_windows;
    j["accepted"] = s.accepted;
    Json curve = Json::array();
    for (const auto& p : s.curve) {
        Json point;
        point["split_index"] = p.split_index;
        point["m_prime"] = p.split.before;
        point["n_prime"] = p.split.after;
        point["mmd"] = p.mmd;
        point["cmmd"] = p.cmmd;
        curve.push_back(std::move(point));
    }
    j["curve"] = std::move(curve);
    if (s.distributions) {
        j["distributions"] = *s.distributions;
    }
    return j;
}

SegmentRecord segment_from_json(const Json& j) {
    if (j.is_object() && j.contains("distributions")) {
        expect_keys(j, {"start", "length", "n_windows", "accepted", "curve", "distributions"},
                    "segment");
    } else {
        expect_keys(j, {"start", "length", "n_windows", "accepted", "curve"}, "segment");
    }
    SegmentRecord s;
    s.start = j.at("start").get<std::size_t>();
    s.length = j.at("length").get<std::size_t>();
    s.n_windows = j.at("n_windows").get<std::size_t>();
    s.accepted = j.at("accepted").get<bool>();
    for (const auto& point : j.at("curve")) {
        expect_keys(point, {"split_index", "m_prime", "n_prime", "mmd", "cmmd"}, "curve point");
        s.curve.push_back({point.at("split_index").get<std::size_t>(),
                           {point.at("m_prime").get<std::size_t>(),
                            point.at("n_prime").get<std::size_t>()},
                           point.at("mmd").get<double>(),
                           point.at("cmmd").get<double>()});
    }
    if (j.contains("distributions")) {
        s.distributions = j.at("distributions").get<std::vector<std::vector<double>>>();
    }
    return s;
}

Json map_json(const MonotoneMap& map) {
    Json steps = Json::array();
    for (const auto& step : map.steps()) {
        Json s;
        if (const auto* a = std::get_if<AffineStep>(&step)) {
            s["kind"] = "affine";
            s["scale"] = a->scale;
            s["shift"] = a->shift;
        } else if (const auto* p = std::get_if<PiecewiseLinearStep>(&step)) {
            s["kind"] = "piecewise_linear";
            s["xs"] = p->xs;
            s["ys"] = p->ys;
        } else {
            const auto& t = std::get<ScaleTailsStep>(step);
            s["kind"] = "scale_tails";
            s["threshold"] = t.threshold;
            s["factor"] = t.factor;
        }
        steps.push_back(std::move(s));
    }
    return steps;
}

} // namespace

std::vector<CurvePoint> curve_points(const ScanResult& scan) {
    std::vector<CurvePoint> out;
    out.reserve(scan.mmd.size());
    for (std::size_t i = 0; i < scan.mmd.size(); ++i) {
        out.push_back({i, scan.split_at(i), scan.mmd[i], scan.cmmd[i]});
    }
    return out;
}

Report make_report(const MultiDetection& detection, const ReportConfig& config,
                   bool emit_distributions) {
    Report report;
    report.config = config;
    for (const auto& est : detection.estimates) {
        report.estimates.push_back({est.split, est.sample_index, est.precision_half_width,
                                    est.score, est.segment_start, est.segment_length});
    }
    for (const auto& seg : detection.segments) {
        SegmentRecord record;
        record.start = seg.start;
        record.length = seg.length;
        record.n_windows = seg.scan.n_windows;
        record.accepted = seg.accepted;
        record.curve = curve_points(seg.scan);
        if (emit_distributions) {
            auto& rows = record.distributions.emplace();
            for (const auto& w : seg.windows) {
                rows.push_back(w.probs);
            }
        }
        report.segments.push_back(std::move(record));
    }
    return report;
}

Json to_json(const Report& report) {
    Json j;
    j["tool"] = report.tool;
    j["version"] = report.version;
    j["config"] = config_json(report.config);
    j["estimates"] = Json::array();
    for (const auto& e : report.estimates) {
        j["estimates"].push_back(estimate_json(e));
    }
    j["segments"] = Json::array();
    for (const auto& s : report.segments) {
        j["segments"].push_back(segment_json(s));
    }
    return j;
}

Report report_from_json(const Json& j) {
    expect_keys(j, {"tool", "version", "config", "estimates", "segments"}, "report");
    Report r;
    r.tool = j.at("tool").get<std::string>();
    r.version = j.at("version").get<std::string>();
    r.config = config_from_json(j.at("config"));
    for (const auto& e : j.at("estimates")) {
        r.estimates.push_back(estimate_from_json(e));
    }
    for (const auto& s : j.at("segments")) {
        r.segments.push_back(segment_from_json(s));
    }
    return r;
}

Json to_json(const SimSpec& spec) {
    Json j;
    j["length"] = spec.length;
    j["coeff_schedule"] = Json::array();
    for (const auto& seg : spec.coeff_schedule) {
        j["coeff_schedule"].push_back(Json{{"start", seg.start}, {"phi", seg.phi}});
    }
    j["innovation_sd"] = spec.innovation_sd;
    j["distortions"] = Json::array();
    for (const auto& d : spec.distortions) {
        j["distortions"].push_back(Json{{"start", d.start}, {"steps", map_json(d.map)}});
    }
    return j;
}

Json to_json(const DetectorConfig& c) {
    Json j;
    j["order"] = c.pattern.order;
    j["delay"] = c.pattern.delay;
    j["window"] = c.pattern.window;
    j["sigma_sq"] = c.kernel.sigma_sq;
    j["cmmd_scale"] = c.kernel.cmmd_scale;
    j["statistic"] = std::string(to_string(c.statistic));
    if (c.multi) {
        j["max_changes"] = c.multi->max_changes;
        j["min_segment_windows"] = c.multi->min_segment_windows;
        j["score_threshold"] =
            c.multi->score_threshold ? Json(*c.multi->score_threshold) : Json(nullptr);
    }
    return j;
}

Json to_json(const McReport& report, const std::string& preset) {
    Json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["preset"] = preset.empty() ? Json(nullptr) : Json(preset);
    j["scenario"] = to_json(report.scenario);
    j["detector"] = to_json(report.detector);
    j["mode"] = std::string(to_string(report.mode));
    j["reps"] = report.reps;
    j["base_seed"] = report.base_seed;
    Json hist = Json::array();
    for (const auto& [key, count] : report.counts) {
        Json entry;
        entry["key"] = format_key(key);
        entry["values"] = key;
        entry["count"] = count;
        entry["frequency"] = report.frequency(key);
        hist.push_back(std::move(entry));
    }
    j["histogram"] = std::move(hist);
    j["modal_key"] = format_key(report.modal_key());
    return j;
}

} // namespace opcpd
