#include "opcpd/simulate.hpp"

#include "opcpd/error.hpp"
#include "opcpd/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace opcpd {

namespace {

void check_finite(double value, const char* what) {
    if (!std::isfinite(value)) {
        throw DomainError(std::string(what) + " must be finite");
    }
}

struct StepApply {
    double x;

    double operator()(const AffineStep& s) const { return s.scale * x + s.shift; }

    double operator()(const ScaleTailsStep& s) const {
        return std::abs(x) > s.threshold ? s.factor * x : x;
    }

    double operator()(const PiecewiseLinearStep& s) const {
        const auto& xs = s.xs;
        const auto& ys = s.ys;
        // Segment index k: interpolate between knots k and k+1.
        std::size_t k = 0;
        if (x >= xs.back()) {
            k = xs.size() - 2;
        } else if (x > xs.front()) {
            k = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin()) - 1;
        }
        const double slope = (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k]);
        return ys[k] + slope * (x - xs[k]);
    }
};

} // namespace

MonotoneMap::MonotoneMap(MapStep step) { steps_.push_back(std::move(step)); }

MonotoneMap MonotoneMap::affine(double scale, double shift) {
    check_finite(scale, "affine scale");
    check_finite(shift, "affine shift");
    if (!(scale > 0.0)) {
        throw DomainError("affine map needs a positive scale to be strictly increasing");
    }
    return MonotoneMap(AffineStep{scale, shift});
}

MonotoneMap MonotoneMap::piecewise_linear(std::vector<double> xs, std::vector<double> ys) {
    if (xs.size() < 2 || xs.size() != ys.size()) {
        throw DomainError("piecewise-linear map needs at least two knots with matching x and y");
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
        check_finite(xs[i], "knot x");
        check_finite(ys[i], "knot y");
        if (i > 0 && !(xs[i] > xs[i - 1] && ys[i] > ys[i - 1])) {
            throw DomainError("piecewise-linear map needs strictly increasing knots (positive slopes)");
        }
    }
    return MonotoneMap(PiecewiseLinearStep{std::move(xs), std::move(ys)});
}

MonotoneMap MonotoneMap::scale_tails(double threshold, double factor) {
    check_finite(threshold, "tail threshold");
    check_finite(factor, "tail factor");
    if (threshold < 0.0) {
        throw DomainError("tail threshold must be non-negative");
    }
    if (!(factor > 1.0)) {
        throw DomainError("tail factor must exceed 1 for the map to stay strictly increasing");
    }
    return MonotoneMap(ScaleTailsStep{threshold, factor});
}

MonotoneMap MonotoneMap::then(const MonotoneMap& next) const {
    MonotoneMap out = *this;
    out.steps_.insert(out.steps_.end(), next.steps_.begin(), next.steps_.end());
    return out;
}

double MonotoneMap::operator()(double x) const {
    for (const auto& step : steps_) {
        x = std::visit(StepApply{x}, step);
    }
    return x;
}

void SimSpec::validate() const {
    if (length == 0) {
        throw DomainError("simulation length must be positive");
    }
    if (coeff_schedule.empty() || coeff_schedule.front().start != 0) {
        throw DomainError("coefficient schedule must start at index 0");
    }
    for (std::size_t k = 0; k < coeff_schedule.size(); ++k) {
        const auto& seg = coeff_schedule[k];
        if (!(std::abs(seg.phi) < 1.0)) {
            throw DomainError("AR coefficient must satisfy |phi| < 1");
        }
        if (seg.start >= length) {
            throw DomainError("coefficient segment starts beyond the series length");
        }
        if (k > 0 && seg.start <= coeff_schedule[k - 1].start) {
            throw DomainError("coefficient segment starts must strictly increase");
        }
    }
    if (!(innovation_sd > 0.0) || !std::isfinite(innovation_sd)) {
        throw DomainError("innovation_sd must be a positive finite number");
    }
    for (std::size_t k = 0; k < distortions.size(); ++k) {
        if (distortions[k].start >= length) {
            throw DomainError("distortion starts beyond the series length");
        }
        if (k > 0 && distortions[k].start <= distortions[k - 1].start) {
            throw DomainError("distortion starts must strictly increase");
        }
    }
}

double NormalSource::uniform() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
}

double NormalSource::operator()() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::vector<double> simulate_ar1(const SimSpec& spec) {
    spec.validate();
    NormalSource normal(spec.seed);
    const double sd = spec.innovation_sd;
    const double phi0 = spec.coeff_schedule.front().phi;

    double previous = sd / std::sqrt(1.0 - phi0 * phi0) * normal();
    std::vector<double> out(spec.length);
    std::size_t segment = 0;
    for (std::size_t t = 0; t < spec.length; ++t) {
        while (segment + 1 < spec.coeff_schedule.size() &&
               spec.coeff_schedule[segment + 1].start <= t) {
            ++segment;
        }
        previous = spec.coeff_schedule[segment].phi * previous + sd * normal();
        out[t] = previous;
    }
    if (!spec.distortions.empty()) {
        out = apply_distortions(out, spec.distortions);
    }
    return out;
}

std::vector<double> apply_distortions(std::span<const double> series,
                                      std::span<const Distortion> distortions) {
    for (std::size_t k = 1; k < distortions.size(); ++k) {
        if (distortions[k].start <= distortions[k - 1].start) {
            throw DomainError("distortion starts must strictly increase");
        }
    }
    std::vector<double> out(series.begin(), series.end());
    for (std::size_t k = 0; k < distortions.size(); ++k) {
        const std::size_t begin = std::min(distortions[k].start, out.size());
        const std::size_t end =
            k + 1 < distortions.size() ? std::min(distortions[k + 1].start, out.size()) : out.size();
        for (std::size_t t = begin; t < end; ++t) {
            out[t] = distortions[k].map(out[t]);
        }
    }
    return out;
}

std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t replication) {
    std::uint64_t z = base_seed + (replication + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::size_t snap_to_window_grid(std::size_t sample_index, const PatternConfig& pattern) {
    const std::size_t warmup = pattern.warmup();
    const std::size_t offset = sample_index > warmup ? sample_index - warmup : 0;
    const std::size_t w = pattern.window;
    return (offset + w / 2) / w * w;
}

std::string_view to_string(McMode mode) {
    return mode == McMode::Single ? "single" : "multiple";
}

std::string format_key(const McKey& key) {
    std::ostringstream out;
    out << '(';
    for (std::size_t i = 0; i < key.size(); ++i) {
        out << (i ? "," : "") << key[i];
    }
    out << ')';
    return out.str();
}

double McReport::frequency(const McKey& key) const {
    const auto it = counts.find(key);
    return it == counts.end() || reps == 0
               ? 0.0
               : static_cast<double>(it->second) / static_cast<double>(reps);
}

std::map<McKey, double> McReport::histogram() const {
    std::map<McKey, double> out;
    for (const auto& [key, count] : counts) {
        out[key] = static_cast<double>(count) / static_cast<double>(reps);
    }
    return out;
}

McKey McReport::modal_key() const {
    McKey best;
    std::size_t best_count = 0;
    for (const auto& [key, count] : counts) {
        if (count > best_count) {
            best = key;
            best_count = count;
        }
    }
    return best;
}

McError::McError(std::size_t replication, const std::string& what)
    : std::runtime_error("replication " + std::to_string(replication) + ": " + what),
      replication_(replication) {}

McReport monte_carlo(const SimSpec& spec_template, const DetectorConfig& detector,
                     std::size_t reps, std::uint64_t base_seed, McMode mode,
                     std::size_t threads) {
    if (reps < 1) {
        throw DomainError("monte_carlo needs reps >= 1");
    }
    spec_template.validate();
    detector.validate();

    std::vector<McKey> keys(reps);
    parallel_for(
        reps,
        [&](std::size_t r) {
            try {
                SimSpec spec = spec_template;
                spec.seed = replication_seed(base_seed, r);
                const auto series = simulate_ar1(spec);
                if (mode == McMode::Single) {
                    const auto est = detect_single(series, detector);
                    keys[r] = {est.split.before, est.split.after};
                } else {
                    for (const auto& est : detect_multiple(series, detector)) {
                        keys[r].push_back(snap_to_window_grid(est.sample_index, detector.pattern));
                    }
                }
            } catch (const std::exception& e) {
                throw McError(r, e.what());
            }
        },
        threads);

    McReport report;
    report.mode = mode;
    report.reps = reps;
    report.base_seed = base_seed;
    report.scenario = spec_template;
    report.detector = detector;
    for (auto& key : keys) {
        ++report.counts[std::move(key)];
    }
    return report;
}

} // namespace opcpd
