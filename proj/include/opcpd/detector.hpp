#pragma once

#include "opcpd/kernel_mmd.hpp"
#include "opcpd/ordinal.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace opcpd {

enum class Statistic { Mmd, Cmmd };

std::string_view to_string(Statistic statistic);
// Accepts "mmd" / "cmmd" (case-insensitive); throws DomainError otherwise.
Statistic parse_statistic(std::string_view text);

struct MultiConfig {
    std::size_t max_changes = 1;
    // A segment is split only if it holds at least 2 * min_segment_windows.
    std::size_t min_segment_windows = 2;
    // Splits scoring below this are rejected and the segment is not split.
    std::optional<double> score_threshold;

    void validate() const;

    bool operator==(const MultiConfig&) const = default;
};

struct DetectorConfig {
    PatternConfig pattern;
    KernelConfig kernel;
    Statistic statistic = Statistic::Cmmd;
    std::optional<MultiConfig> multi;

    // Validates every part; forwards the pattern-size warning, if any.
    std::optional<std::string> validate() const;

    bool operator==(const DetectorConfig&) const = default;
};

struct ChangePointEstimate {
    Split split;
    // Boundary between window m'-1 and window m' in raw sample coordinates.
    std::size_t sample_index = 0;
    // Half the window length in samples: the localisation precision.
    double precision_half_width = 0.0;
    double score = 0.0;
    std::size_t segment_start = 0;
    std::size_t segment_length = 0;
    ScanResult scan;

    bool operator==(const ChangePointEstimate&) const = default;
};

// One segment visited by the detector, accepted or not.
struct SegmentAnalysis {
    std::size_t start = 0;
    std::size_t length = 0;
    std::vector<PatternDistribution> windows;
    ScanResult scan;
    bool accepted = false;

    bool operator==(const SegmentAnalysis&) const = default;
};

struct MultiDetection {
    std::vector<ChangePointEstimate> estimates; // sorted by sample_index
    std::vector<SegmentAnalysis> segments;      // in visiting order
};

// segment_start + d*tau + m' * w: the anchor of the first pattern in window m'.
std::size_t window_index_to_sample(std::size_t segment_start, std::size_t m_prime,
                                   const PatternConfig& config);

// Minimum raw length that yields `windows` full windows.
std::size_t min_samples_for_windows(std::size_t windows, const PatternConfig& config);

// Single change-point: split maximising the configured statistic.
ChangePointEstimate detect_single(std::span<const double> series, const DetectorConfig& config);

// Binary segmentation: detect on the whole series, then repeatedly on the
// longest pending sub-segment, until `multi.max_changes` are accepted or no
// segment qualifies. Uses MultiConfig{} when `config.multi` is empty.
std::vector<ChangePointEstimate> detect_multiple(std::span<const double> series,
                                                 const DetectorConfig& config);

// detect_multiple plus the per-segment scans and window distributions.
MultiDetection detect_multiple_traced(std::span<const double> series,
                                      const DetectorConfig& config);

} // namespace opcpd
