#pragma once

#include "opcpd/detector.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace opcpd {

// x -> scale * x + shift, scale > 0.
struct AffineStep {
    double scale = 1.0;
    double shift = 0.0;
    bool operator==(const AffineStep&) const = default;
};

// Linear interpolation through knots with strictly increasing x and y;
// extended beyond the outer knots with the first / last slope.
struct PiecewiseLinearStep {
    std::vector<double> xs;
    std::vector<double> ys;
    bool operator==(const PiecewiseLinearStep&) const = default;
};

// x on [-threshold, threshold], factor * x outside; factor > 1.
struct ScaleTailsStep {
    double threshold = 0.0;
    double factor = 1.0;
    bool operator==(const ScaleTailsStep&) const = default;
};

using MapStep = std::variant<AffineStep, PiecewiseLinearStep, ScaleTailsStep>;

// A strictly increasing map R -> R built from a chain of primitive steps,
// applied first to last. Parameters are validated on construction.
class MonotoneMap {
public:
    MonotoneMap() = default; // identity

    static MonotoneMap affine(double scale, double shift);
    static MonotoneMap piecewise_linear(std::vector<double> xs, std::vector<double> ys);
    static MonotoneMap scale_tails(double threshold, double factor);

    // This map followed by `next`.
    MonotoneMap then(const MonotoneMap& next) const;

    double operator()(double x) const;

    const std::vector<MapStep>& steps() const { return steps_; }

    bool operator==(const MonotoneMap&) const = default;

private:
    explicit MonotoneMap(MapStep step);

    std::vector<MapStep> steps_;
};

struct CoeffSegment {
    std::size_t start = 0;
    double phi = 0.0;
    bool operator==(const CoeffSegment&) const = default;
};

// `map` applies from `start` up to the next distortion's start.
struct Distortion {
    std::size_t start = 0;
    MonotoneMap map;
    bool operator==(const Distortion&) const = default;
};

struct SimSpec {
    std::size_t length = 0;
    // Contiguous by construction: segment k covers [start_k, start_{k+1}).
    std::vector<CoeffSegment> coeff_schedule;
    double innovation_sd = 1.0;
    std::vector<Distortion> distortions;
    std::uint64_t seed = 0;

    // Throws DomainError unless the schedule starts at 0, starts strictly
    // increase and lie below `length`, every |phi| < 1, innovation_sd > 0,
    // and distortion starts strictly increase within [0, length).
    void validate() const;

    bool operator==(const SimSpec&) const = default;
};

// Standard normal variates from a 64-bit Mersenne Twister via the
// Box-Muller transform (both outputs used). Stream is fixed per seed.
class NormalSource {
public:
    explicit NormalSource(std::uint64_t seed) : engine_(seed) {}
    double operator()();

private:
    // Uniform on (0, 1] with 53 random bits.
    double uniform();

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// X_t = phi(t) X_{t-1} + sd * e_t, X_{-1} drawn from the stationary law of
// the first segment, then distortions applied.
std::vector<double> simulate_ar1(const SimSpec& spec);

// Applies distortion k to indices [start_k, start_{k+1}); indices before the
// first start are untouched.
std::vector<double> apply_distortions(std::span<const double> series,
                                      std::span<const Distortion> distortions);

// Seed of replication r: splitmix64 finaliser of base_seed + (r+1) * golden gamma.
std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t replication);

enum class McMode {
    Single,   // key = (m', n') of detect_single
    Multiple, // key = detect_multiple sample indices, snapped to the window grid
};

// Rounds (sample_index - d*tau) to the nearest multiple of w. Sub-segments
// are re-windowed from their own start, so the same boundary can be reported
// a few samples apart; the grid value identifies it uniquely.
std::size_t snap_to_window_grid(std::size_t sample_index, const PatternConfig& pattern);

std::string_view to_string(McMode mode);

using McKey = std::vector<std::size_t>;

// "(5,15)" / "(2500,7500)".
std::string format_key(const McKey& key);

struct McReport {
    McMode mode = McMode::Single;
    std::size_t reps = 0;
    std::uint64_t base_seed = 0;
    std::map<McKey, std::size_t> counts;
    SimSpec scenario;
    DetectorConfig detector;

    double frequency(const McKey& key) const;
    std::map<McKey, double> histogram() const;
    // Most frequent key; smallest key on ties.
    McKey modal_key() const;
};

// Runs `reps` independent replications of spec_template with seeds
// replication_seed(base_seed, r). Replications may run in parallel; the
// result does not depend on the worker count. An error in replication r is
// rethrown as McError carrying r.
McReport monte_carlo(const SimSpec& spec_template, const DetectorConfig& detector,
                     std::size_t reps, std::uint64_t base_seed, McMode mode = McMode::Single,
                     std::size_t threads = 0);

class McError : public std::runtime_error {
public:
    McError(std::size_t replication, const std::string& what);
    std::size_t replication() const noexcept { return replication_; }

private:
    std::size_t replication_;
};

} // namespace opcpd
