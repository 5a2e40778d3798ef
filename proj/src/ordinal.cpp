#include "opcpd/ordinal.hpp"

#include "opcpd/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace opcpd {

InvalidSample::InvalidSample(std::size_t position, double value)
    : std::runtime_error([&] {
          std::ostringstream msg;
          msg << "non-finite sample " << value << " at position " << position;
          return msg.str();
      }()),
      position_(position), value_(value) {}

InsufficientData::InsufficientData(std::size_t available, std::size_t required, std::string unit)
    : std::runtime_error([&] {
          std::ostringstream msg;
          msg << "insufficient data: " << available << ' ' << unit << " available, at least "
              << required << ' ' << unit << " required";
          return msg.str();
      }()),
      available_(available), required_(required), unit_(std::move(unit)) {}

std::size_t factorial(int n) {
    std::size_t out = 1;
    for (int i = 2; i <= n; ++i) {
        out *= static_cast<std::size_t>(i);
    }
    return out;
}

std::optional<std::string> PatternConfig::validate() const {
    if (order < 1 || order > kMaxOrder) {
        throw DomainError("pattern order must be in [1, " + std::to_string(kMaxOrder) +
                          "], got " + std::to_string(order));
    }
    if (delay < 1) {
        throw DomainError("delay must be >= 1, got " + std::to_string(delay));
    }
    if (window < 1) {
        throw DomainError("window must be >= 1");
    }
    const std::size_t alphabet = alphabet_size();
    if (window < 10 * alphabet) {
        std::ostringstream msg;
        msg << "window " << window << " is small relative to the " << alphabet
            << " patterns of order " << order << " (recommended >= " << 10 * alphabet << ")";
        return msg.str();
    }
    return std::nullopt;
}

std::size_t PatternConfig::alphabet_size() const { return factorial(order + 1); }

namespace {

using Scratch = std::array<int, kMaxOrder + 1>;

// Sorts positions 0..n-1 so that values descend, ties broken toward the
// larger position. Insertion sort; n <= kMaxOrder + 1.
void order_positions(const double* values, int n, Scratch& perm) {
    for (int i = 0; i < n; ++i) {
        perm[i] = i;
    }
    for (int i = 1; i < n; ++i) {
        const int p = perm[i];
        int j = i - 1;
        while (j >= 0) {
            const int q = perm[j];
            const bool p_first = values[p] > values[q] || (values[p] == values[q] && p > q);
            if (!p_first) {
                break;
            }
            perm[j + 1] = q;
            --j;
        }
        perm[j + 1] = p;
    }
}

std::uint32_t lehmer_rank(const int* perm, int n) {
    std::uint32_t code = 0;
    for (int i = 0; i < n; ++i) {
        int smaller = 0;
        for (int j = i + 1; j < n; ++j) {
            smaller += perm[j] < perm[i];
        }
        code = code * static_cast<std::uint32_t>(n - i) + static_cast<std::uint32_t>(smaller);
    }
    return code;
}

} // namespace

Permutation encode_pattern(std::span<const double> values) {
    const auto n = static_cast<int>(values.size());
    if (n < 2 || n > kMaxOrder + 1) {
        throw DomainError("pattern needs between 2 and " + std::to_string(kMaxOrder + 1) +
                          " values, got " + std::to_string(n));
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw InvalidSample(i, values[i]);
        }
    }
    Scratch perm{};
    order_positions(values.data(), n, perm);
    return Permutation(perm.begin(), perm.begin() + n);
}

PatternId pattern_rank(std::span<const int> permutation) {
    const auto n = static_cast<int>(permutation.size());
    if (n < 1 || n > kMaxOrder + 1) {
        throw DomainError("permutation length out of range: " + std::to_string(n));
    }
    std::array<bool, kMaxOrder + 1> seen{};
    for (int v : permutation) {
        if (v < 0 || v >= n || seen[v]) {
            throw DomainError("malformed permutation: not a permutation of {0,...," +
                              std::to_string(n - 1) + "}");
        }
        seen[v] = true;
    }
    return PatternId{lehmer_rank(permutation.data(), n)};
}

Permutation pattern_unrank(PatternId id, int order) {
    if (order < 1 || order > kMaxOrder) {
        throw DomainError("pattern order out of range: " + std::to_string(order));
    }
    const int n = order + 1;
    if (id.code >= factorial(n)) {
        throw DomainError("pattern code " + std::to_string(id.code) + " out of range for order " +
                          std::to_string(order));
    }
    std::vector<int> remaining(n);
    for (int i = 0; i < n; ++i) {
        remaining[i] = i;
    }
    Permutation perm;
    perm.reserve(n);
    std::size_t code = id.code;
    for (int i = 0; i < n; ++i) {
        const std::size_t radix = factorial(n - 1 - i);
        const std::size_t digit = code / radix;
        code %= radix;
        perm.push_back(remaining[digit]);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(digit));
    }
    return perm;
}

PatternSequence extract_pattern_sequence(std::span<const double> series,
                                         const PatternConfig& config) {
    config.validate();
    const std::size_t warmup = config.warmup();
    if (series.size() <= warmup) {
        throw InsufficientData(series.size(), warmup + 1, "samples");
    }
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (!std::isfinite(series[i])) {
            throw InvalidSample(i, series[i]);
        }
    }

    const int n = config.order + 1;
    const std::size_t delay = static_cast<std::size_t>(config.delay);
    PatternSequence out;
    out.order = config.order;
    out.first_sample_index = warmup;
    out.ids.reserve(series.size() - warmup);

    std::array<double, kMaxOrder + 1> values{};
    Scratch perm{};
    for (std::size_t t = warmup; t < series.size(); ++t) {
        for (int i = 0; i < n; ++i) {
            values[i] = series[t - static_cast<std::size_t>(i) * delay];
        }
        order_positions(values.data(), n, perm);
        out.ids.push_back(PatternId{lehmer_rank(perm.data(), n)});
    }
    return out;
}

std::vector<PatternDistribution> windowed_distributions(const PatternSequence& patterns,
                                                        const PatternConfig& config) {
    config.validate();
    if (patterns.order != config.order) {
        throw DomainError("pattern sequence order " + std::to_string(patterns.order) +
                          " does not match configured order " + std::to_string(config.order));
    }
    const std::size_t w = config.window;
    if (patterns.ids.size() < w) {
        throw InsufficientData(patterns.ids.size(), w, "patterns");
    }
    const std::size_t alphabet = config.alphabet_size();
    const std::size_t n_windows = patterns.ids.size() / w;
    const auto w_real = static_cast<double>(w);

    std::vector<PatternDistribution> out(n_windows);
    std::vector<std::size_t> counts(alphabet);
    for (std::size_t k = 0; k < n_windows; ++k) {
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t j = k * w; j < (k + 1) * w; ++j) {
            ++counts[patterns.ids[j].code];
        }
        auto& probs = out[k].probs;
        probs.resize(alphabet);
        for (std::size_t c = 0; c < alphabet; ++c) {
            probs[c] = static_cast<double>(counts[c]) / w_real;
        }
    }
    return out;
}

} // namespace opcpd
