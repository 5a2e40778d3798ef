#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace opcpd {

// Largest supported pattern order. 9! = 362880 patterns per distribution.
inline constexpr int kMaxOrder = 8;

struct PatternConfig {
    int order = 3;          // d: number of increments spanned by a pattern
    int delay = 1;          // tau: spacing between samples in a pattern
    std::size_t window = 500; // w: pattern positions per window

    // Throws DomainError on d < 1, d > kMaxOrder, tau < 1, w < 1. Returns a
    // warning when w is too small to estimate all (d+1)! frequencies
    // reliably (w < 10 * (d+1)!).
    std::optional<std::string> validate() const;

    std::size_t alphabet_size() const;
    // Raw samples consumed before the first pattern: d * tau.
    std::size_t warmup() const { return static_cast<std::size_t>(order) * delay; }

    bool operator==(const PatternConfig&) const = default;
};

std::size_t factorial(int n);

// Lexicographic rank of a permutation of {0,...,d}.
struct PatternId {
    std::uint32_t code = 0;

    auto operator<=>(const PatternId&) const = default;
};

using Permutation = std::vector<int>;

// Ordinal pattern of `values` = (x_t, x_{t-tau}, ..., x_{t-d*tau}). The
// result (r_0,...,r_d) orders positions by descending value; equal values
// are ordered by descending position. Throws InvalidSample on NaN/inf.
Permutation encode_pattern(std::span<const double> values);

PatternId pattern_rank(std::span<const int> permutation);
Permutation pattern_unrank(PatternId id, int order);

struct PatternSequence {
    std::vector<PatternId> ids;
    // Raw index of the anchor time t of ids[0]; always d * tau.
    std::size_t first_sample_index = 0;
    int order = 0;

    bool operator==(const PatternSequence&) const = default;
};

// ids[j] is the pattern anchored at raw index d*tau + j. Requires
// series.size() > d*tau and finite samples.
PatternSequence extract_pattern_sequence(std::span<const double> series,
                                         const PatternConfig& config);

struct PatternDistribution {
    std::vector<double> probs;

    bool operator==(const PatternDistribution&) const = default;
};

// Non-overlapping blocks of `config.window` consecutive pattern positions.
// Window k covers ids[k*w, (k+1)*w); the trailing remainder is dropped.
std::vector<PatternDistribution> windowed_distributions(const PatternSequence& patterns,
                                                        const PatternConfig& config);

} // namespace opcpd
