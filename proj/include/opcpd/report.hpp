#pragma once

#include "opcpd/detector.hpp"
#include "opcpd/simulate.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace opcpd {

inline constexpr const char* kToolName = "opcpd";
inline constexpr const char* kToolVersion = "1.0.0";

struct ReportConfig {
    PatternConfig pattern;
    KernelConfig kernel;
    Statistic statistic = Statistic::Cmmd;
    MultiConfig multi;
    std::optional<std::uint64_t> seed;
    std::string input;
    std::string column;

    bool operator==(const ReportConfig&) const = default;
};

struct EstimateRecord {
    Split split;
    std::size_t sample_index = 0;
    double precision_half_width = 0.0;
    double score = 0.0;
    std::size_t segment_start = 0;
    std::size_t segment_length = 0;

    bool operator==(const EstimateRecord&) const = default;
};

struct CurvePoint {
    std::size_t split_index = 0;
    Split split;
    double mmd = 0.0;
    double cmmd = 0.0;

    bool operator==(const CurvePoint&) const = default;
};

struct SegmentRecord {
    std::size_t start = 0;
    std::size_t length = 0;
    std::size_t n_windows = 0;
    bool accepted = false;
    std::vector<CurvePoint> curve;
    // Window distributions; present only when requested.
    std::optional<std::vector<std::vector<double>>> distributions;

    bool operator==(const SegmentRecord&) const = default;
};

struct Report {
    std::string tool = kToolName;
    std::string version = kToolVersion;
    ReportConfig config;
    std::vector<EstimateRecord> estimates;
    std::vector<SegmentRecord> segments;

    bool operator==(const Report&) const = default;
};

Report make_report(const MultiDetection& detection, const ReportConfig& config,
                   bool emit_distributions);

// Serialised form. Keys appear in a fixed order. from_json rejects
// missing and unknown keys.
nlohmann::ordered_json to_json(const Report& report);
Report report_from_json(const nlohmann::ordered_json& json);

std::vector<CurvePoint> curve_points(const ScanResult& scan);

nlohmann::ordered_json to_json(const SimSpec& spec);
nlohmann::ordered_json to_json(const DetectorConfig& config);
nlohmann::ordered_json to_json(const McReport& report, const std::string& preset);

} // namespace opcpd
