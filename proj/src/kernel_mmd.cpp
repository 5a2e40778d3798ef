#include "opcpd/kernel_mmd.hpp"

#include "opcpd/error.hpp"
#include "opcpd/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace opcpd {

void KernelConfig::validate() const {
    if (!(sigma_sq > 0.0) || !std::isfinite(sigma_sq)) {
        throw DomainError("sigma_sq must be a positive finite number");
    }
    if (!(cmmd_scale >= 0.0) || !std::isfinite(cmmd_scale)) {
        throw DomainError("cmmd_scale must be a non-negative finite number");
    }
}

namespace {

double squared_distance(const PatternDistribution& a, const PatternDistribution& b) {
    if (a.probs.size() != b.probs.size()) {
        throw DomainError("distribution dimension mismatch: " + std::to_string(a.probs.size()) +
                          " vs " + std::to_string(b.probs.size()));
    }
    double sum = 0.0;
    for (std::size_t c = 0; c < a.probs.size(); ++c) {
        const double diff = a.probs[c] - b.probs[c];
        sum += diff * diff;
    }
    return sum;
}

double mmd_from_sums(double within_first, double between, double within_second, double m,
                     double n) {
    // Squared MMD in terms of dissimilarity sums (1 - k); the constant parts
    // of K1/m^2 - 2 K2/(mn) + K3/n^2 cancel exactly.
    const double sq = 2.0 * between / (m * n) - within_first / (m * m) - within_second / (n * n);
    return std::sqrt(std::max(sq, 0.0));
}

void check_sequence(std::span<const PatternDistribution> z) {
    if (z.size() < 2) {
        throw InsufficientData(z.size(), 2, "windows");
    }
    const std::size_t dim = z.front().probs.size();
    for (const auto& d : z) {
        if (d.probs.size() != dim) {
            throw DomainError("distribution dimension mismatch within sequence");
        }
    }
}

// Kernel dissimilarities on demand, either from a precomputed symmetric
// matrix or evaluated fresh. Entries are computed as d(z_i, z_j) with i < j
// in both cases, so the two sources agree bitwise.
class Dissimilarities {
public:
    Dissimilarities(std::span<const PatternDistribution> z, const KernelConfig& config,
                    bool precompute)
        : z_(z), config_(config), n_(z.size()) {
        if (!precompute) {
            return;
        }
        gram_.assign(n_ * n_, 0.0);
        parallel_for(n_, [this](std::size_t i) {
            for (std::size_t j = i + 1; j < n_; ++j) {
                gram_[i * n_ + j] = evaluate(i, j);
            }
        });
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = i + 1; j < n_; ++j) {
                gram_[j * n_ + i] = gram_[i * n_ + j];
            }
        }
        evaluations_ = n_ * (n_ - 1) / 2;
    }

    double operator()(std::size_t i, std::size_t j) {
        if (!gram_.empty()) {
            return gram_[i * n_ + j];
        }
        ++evaluations_;
        return i < j ? evaluate(i, j) : evaluate(j, i);
    }

    std::uint64_t evaluations() const { return evaluations_; }

private:
    double evaluate(std::size_t i, std::size_t j) const {
        return rbf_dissimilarity(z_[i], z_[j], config_);
    }

    std::span<const PatternDistribution> z_;
    KernelConfig config_;
    std::size_t n_;
    std::vector<double> gram_;
    std::uint64_t evaluations_ = 0;
};

} // namespace

double rbf_kernel(const PatternDistribution& a, const PatternDistribution& b,
                  const KernelConfig& config) {
    return std::exp(-squared_distance(a, b) / (2.0 * config.sigma_sq));
}

double rbf_dissimilarity(const PatternDistribution& a, const PatternDistribution& b,
                         const KernelConfig& config) {
    return -std::expm1(-squared_distance(a, b) / (2.0 * config.sigma_sq));
}

double mmd_direct(std::span<const PatternDistribution> z, std::size_t m_prime,
                  std::size_t n_prime, const KernelConfig& config) {
    config.validate();
    if (m_prime < 1 || n_prime < 1 || m_prime + n_prime != z.size()) {
        throw DomainError("invalid split (" + std::to_string(m_prime) + ", " +
                          std::to_string(n_prime) + ") for " + std::to_string(z.size()) +
                          " windows");
    }
    double k1 = 0.0;
    double k2 = 0.0;
    double k3 = 0.0;
    for (std::size_t i = 0; i < m_prime; ++i) {
        for (std::size_t j = 0; j < m_prime; ++j) {
            k1 += rbf_kernel(z[i], z[j], config);
        }
        for (std::size_t j = 0; j < n_prime; ++j) {
            k2 += rbf_kernel(z[i], z[m_prime + j], config);
        }
    }
    for (std::size_t i = 0; i < n_prime; ++i) {
        for (std::size_t j = 0; j < n_prime; ++j) {
            k3 += rbf_kernel(z[m_prime + i], z[m_prime + j], config);
        }
    }
    const auto m = static_cast<double>(m_prime);
    const auto n = static_cast<double>(n_prime);
    const double sq = k1 / (m * m) - 2.0 * k2 / (m * n) + k3 / (n * n);
    return std::sqrt(std::max(sq, 0.0));
}

ScanResult mmd_scan(std::span<const PatternDistribution> z, const KernelConfig& config,
                    ScanStrategy strategy) {
    config.validate();
    check_sequence(z);
    const std::size_t n_windows = z.size();
    const bool use_gram = strategy == ScanStrategy::Gram ||
                          (strategy == ScanStrategy::Auto && n_windows <= kGramLimit);
    Dissimilarities dis(z, config, use_gram);

    ScanResult out;
    out.n_windows = n_windows;
    out.mmd.resize(n_windows - 1);
    std::uint64_t updates = 0;

    // Initial split (1, N-1).
    double within_first = 0.0;
    double between = 0.0;
    for (std::size_t j = 1; j < n_windows; ++j) {
        between += dis(0, j);
    }
    double pair_sum = 0.0;
    for (std::size_t i = 1; i < n_windows; ++i) {
        for (std::size_t j = i + 1; j < n_windows; ++j) {
            pair_sum += dis(i, j);
        }
    }
    double within_second = 2.0 * pair_sum;
    updates += n_windows * (n_windows - 1) / 2;
    out.mmd[0] = mmd_from_sums(within_first, between, within_second, 1.0,
                               static_cast<double>(n_windows - 1));

    // Move window e from the second group to the first: splits (e+1, N-e-1).
    for (std::size_t e = 1; e + 1 < n_windows; ++e) {
        double to_first = 0.0;
        for (std::size_t i = 0; i < e; ++i) {
            to_first += dis(i, e);
        }
        double to_second = 0.0;
        for (std::size_t j = e + 1; j < n_windows; ++j) {
            to_second += dis(e, j);
        }
        within_first += 2.0 * to_first;
        between += to_second - to_first;
        within_second -= 2.0 * to_second;
        updates += n_windows + 2;
        out.mmd[e] = mmd_from_sums(within_first, between, within_second,
                                   static_cast<double>(e + 1),
                                   static_cast<double>(n_windows - e - 1));
    }

    out.cmmd = cmmd_from_scan(out.mmd, n_windows, config.cmmd_scale);
    out.argmax_mmd = argmax_first(out.mmd);
    out.argmax_cmmd = argmax_first(out.cmmd);
    out.operations = dis.evaluations() + updates + 2 * (n_windows - 1);
    return out;
}

std::vector<double> cmmd_from_scan(std::span<const double> mmd, std::size_t n_windows,
                                   double scale) {
    if (n_windows < 2 || mmd.size() != n_windows - 1) {
        throw DomainError("cmmd_from_scan expects N-1 = " +
                          std::to_string(n_windows < 1 ? 0 : n_windows - 1) +
                          " MMD values, got " + std::to_string(mmd.size()));
    }
    const double peak = *std::max_element(mmd.begin(), mmd.end());
    const auto total = static_cast<double>(n_windows - 1);
    std::vector<double> out(mmd.size());
    for (std::size_t i = 0; i < mmd.size(); ++i) {
        const auto m = static_cast<double>(i + 1);
        const auto n = static_cast<double>(n_windows - 1 - i);
        out[i] = mmd[i] - scale * (total / (m * n)) * peak;
    }
    return out;
}

std::size_t argmax_first(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) {
            best = i;
        }
    }
    return best;
}

} // namespace opcpd
