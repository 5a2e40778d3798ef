#pragma once

#include "opcpd/ordinal.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace opcpd {

struct KernelConfig {
    double sigma_sq = 1.0;
    // Multiplier on the CMMD bias-correction term. 1.0 gives the plain
    // corrected statistic; values in [0, 1) shrink the correction.
    double cmmd_scale = 1.0;

    void validate() const;

    bool operator==(const KernelConfig&) const = default;
};

// A two-group partition of N windows: `before` = m', `after` = n'.
struct Split {
    std::size_t before = 0;
    std::size_t after = 0;

    auto operator<=>(const Split&) const = default;
};

struct ScanResult {
    std::size_t n_windows = 0;
    // Entry i is the statistic at split (i+1, N-i-1).
    std::vector<double> mmd;
    std::vector<double> cmmd;
    std::size_t argmax_mmd = 0;
    std::size_t argmax_cmmd = 0;
    // Arithmetic work done by the scan: kernel evaluations (each costs one
    // pass over the alphabet) plus accumulator updates.
    std::uint64_t operations = 0;

    Split split_at(std::size_t index) const { return {index + 1, n_windows - index - 1}; }

    bool operator==(const ScanResult&) const = default;
};

// exp(-||a - b||^2 / (2 sigma^2)).
double rbf_kernel(const PatternDistribution& a, const PatternDistribution& b,
                  const KernelConfig& config);

// 1 - rbf_kernel(a, b), evaluated without cancellation.
double rbf_dissimilarity(const PatternDistribution& a, const PatternDistribution& b,
                         const KernelConfig& config);

// MMD at split (m', n') straight from the double sums K1, K2, K3.
// O(N^2) per call.
double mmd_direct(std::span<const PatternDistribution> z, std::size_t m_prime,
                  std::size_t n_prime, const KernelConfig& config);

enum class ScanStrategy {
    Auto,      // Gram for N <= kGramLimit, streaming rows above
    Gram,      // precompute the symmetric kernel matrix once
    Streaming, // recompute one kernel row per split; O(N) memory
};

inline constexpr std::size_t kGramLimit = 4096;

// MMD and CMMD at every split (1, N-1), ..., (N-1, 1) using incremental
// updates of the three double sums; O(N^2) kernel evaluations overall.
// Argmax ties go to the smallest m'. Both strategies produce bitwise
// identical results.
ScanResult mmd_scan(std::span<const PatternDistribution> z, const KernelConfig& config,
                    ScanStrategy strategy = ScanStrategy::Auto);

// cmmd[i] = mmd[i] - scale * (N-1) / ((i+1)(N-1-i)) * max_j mmd[j].
std::vector<double> cmmd_from_scan(std::span<const double> mmd, std::size_t n_windows,
                                   double scale = 1.0);

// First index of the maximum (smallest m' on ties).
std::size_t argmax_first(std::span<const double> values);

} // namespace opcpd
