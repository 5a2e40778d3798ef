#include "opcpd/detector.hpp"

#include "opcpd/error.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace opcpd {

std::string_view to_string(Statistic statistic) {
    return statistic == Statistic::Mmd ? "mmd" : "cmmd";
}

Statistic parse_statistic(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "mmd") {
        return Statistic::Mmd;
    }
    if (lower == "cmmd") {
        return Statistic::Cmmd;
    }
    throw DomainError("unknown statistic '" + std::string(text) + "' (expected mmd or cmmd)");
}

void MultiConfig::validate() const {
    if (max_changes < 1) {
        throw DomainError("max_changes must be >= 1");
    }
    if (min_segment_windows < 2) {
        throw DomainError("min_segment_windows must be >= 2");
    }
}

std::optional<std::string> DetectorConfig::validate() const {
    auto warning = pattern.validate();
    kernel.validate();
    if (multi) {
        multi->validate();
    }
    return warning;
}

std::size_t window_index_to_sample(std::size_t segment_start, std::size_t m_prime,
                                   const PatternConfig& config) {
    return segment_start + config.warmup() + m_prime * config.window;
}

std::size_t min_samples_for_windows(std::size_t windows, const PatternConfig& config) {
    return config.warmup() + windows * config.window;
}

namespace {

std::size_t window_count(std::size_t length, const PatternConfig& config) {
    return length <= config.warmup() ? 0 : (length - config.warmup()) / config.window;
}

struct Segment {
    std::size_t start = 0;
    std::size_t length = 0;
};

SegmentAnalysis analyze(std::span<const double> series, Segment segment,
                        const DetectorConfig& config) {
    const auto piece = series.subspan(segment.start, segment.length);
    const std::size_t windows = window_count(piece.size(), config.pattern);
    if (windows < 2) {
        throw InsufficientData(piece.size(), min_samples_for_windows(2, config.pattern),
                               "samples");
    }
    SegmentAnalysis out;
    out.start = segment.start;
    out.length = segment.length;
    out.windows =
        windowed_distributions(extract_pattern_sequence(piece, config.pattern), config.pattern);
    out.scan = mmd_scan(out.windows, config.kernel);
    return out;
}

ChangePointEstimate estimate_from(const SegmentAnalysis& analysis, const DetectorConfig& config) {
    const auto& scan = analysis.scan;
    const std::size_t index =
        config.statistic == Statistic::Mmd ? scan.argmax_mmd : scan.argmax_cmmd;
    ChangePointEstimate est;
    est.split = scan.split_at(index);
    est.sample_index = window_index_to_sample(analysis.start, est.split.before, config.pattern);
    est.precision_half_width = static_cast<double>(config.pattern.window) / 2.0;
    est.score = config.statistic == Statistic::Mmd ? scan.mmd[index] : scan.cmmd[index];
    est.segment_start = analysis.start;
    est.segment_length = analysis.length;
    est.scan = scan;
    return est;
}

} // namespace

ChangePointEstimate detect_single(std::span<const double> series, const DetectorConfig& config) {
    config.validate();
    return estimate_from(analyze(series, {0, series.size()}, config), config);
}

MultiDetection detect_multiple_traced(std::span<const double> series,
                                      const DetectorConfig& config) {
    config.validate();
    const MultiConfig multi = config.multi.value_or(MultiConfig{});

    // The top-level segment must be analysable; sub-segments may not be.
    if (window_count(series.size(), config.pattern) < 2) {
        throw InsufficientData(series.size(), min_samples_for_windows(2, config.pattern),
                               "samples");
    }

    MultiDetection out;
    std::vector<Segment> pending{{0, series.size()}};
    while (!pending.empty() && out.estimates.size() < multi.max_changes) {
        // Longest first; earlier start wins a tie.
        auto next = std::max_element(pending.begin(), pending.end(),
                                     [](const Segment& a, const Segment& b) {
                                         return a.length < b.length ||
                                                (a.length == b.length && a.start > b.start);
                                     });
        const Segment segment = *next;
        pending.erase(next);

        if (window_count(segment.length, config.pattern) < 2 * multi.min_segment_windows) {
            continue;
        }
        SegmentAnalysis analysis = analyze(series, segment, config);
        ChangePointEstimate est = estimate_from(analysis, config);
        analysis.accepted = !multi.score_threshold || est.score >= *multi.score_threshold;
        const bool accepted = analysis.accepted;
        out.segments.push_back(std::move(analysis));
        if (!accepted) {
            continue;
        }
        const std::size_t cut = est.sample_index;
        pending.push_back({segment.start, cut - segment.start});
        pending.push_back({cut, segment.start + segment.length - cut});
        out.estimates.push_back(std::move(est));
    }

    std::stable_sort(out.estimates.begin(), out.estimates.end(),
                     [](const ChangePointEstimate& a, const ChangePointEstimate& b) {
                         return a.sample_index < b.sample_index;
                     });
    return out;
}

std::vector<ChangePointEstimate> detect_multiple(std::span<const double> series,
                                                 const DetectorConfig& config) {
    return detect_multiple_traced(series, config).estimates;
}

} // namespace opcpd
