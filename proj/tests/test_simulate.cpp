#include "opcpd/error.hpp"
#include "opcpd/presets.hpp"
#include "opcpd/simulate.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

using namespace opcpd;

namespace {

double lag1_autocorrelation(const std::vector<double>& x) {
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        den += (x[i] - mean) * (x[i] - mean);
        if (i > 0) num += (x[i] - mean) * (x[i - 1] - mean);
    }
    return num / den;
}

SimSpec constant_ar(double phi, std::size_t length, std::uint64_t seed) {
    SimSpec spec;
    spec.length = length;
    spec.coeff_schedule = {{0, phi}};
    spec.seed = seed;
    return spec;
}

} // namespace

TEST_CASE("simulate_ar1 lag-1 autocorrelation") {
    CHECK(std::abs(lag1_autocorrelation(simulate_ar1(constant_ar(0.0, 100000, 1)))) <= 0.01);
    CHECK(std::abs(lag1_autocorrelation(simulate_ar1(constant_ar(0.3, 100000, 2))) - 0.3) <= 0.02);
}

TEST_CASE("simulate_ar1 is deterministic per seed") {
    const auto spec = make_preset("fig2").spec;
    CHECK(simulate_ar1(spec) == simulate_ar1(spec));
    auto other = spec;
    other.seed = spec.seed + 1;
    CHECK(simulate_ar1(spec) != simulate_ar1(other));
}

TEST_CASE("simulate_ar1 starts from the stationary law") {
    // Var(X_0) = 1 / (1 - phi^2) for unit innovations.
    const double phi = 0.6;
    const std::size_t reps = 4000;
    std::vector<double> first;
    for (std::size_t r = 0; r < reps; ++r) {
        first.push_back(simulate_ar1(constant_ar(phi, 1, replication_seed(99, r)))[0]);
    }
    double sum_sq = 0.0;
    for (double v : first) sum_sq += v * v;
    const double var = sum_sq / static_cast<double>(reps);
    const double expected = 1.0 / (1.0 - phi * phi);
    const double se = expected * std::sqrt(2.0 / static_cast<double>(reps));
    CHECK(std::abs(var - expected) <= 3.0 * se);
}

TEST_CASE("SimSpec validation") {
    CHECK_THROWS_AS(constant_ar(1.0, 10, 0).validate(), DomainError);
    CHECK_THROWS_AS(constant_ar(-1.2, 10, 0).validate(), DomainError);
    CHECK_THROWS_AS(constant_ar(0.1, 0, 0).validate(), DomainError);
    auto spec = constant_ar(0.1, 10, 0);
    spec.coeff_schedule = {{1, 0.1}};
    CHECK_THROWS_AS(spec.validate(), DomainError);
    spec.coeff_schedule = {{0, 0.1}, {5, 0.2}, {5, 0.3}};
    CHECK_THROWS_AS(spec.validate(), DomainError);
    spec.coeff_schedule = {{0, 0.1}, {10, 0.2}};
    CHECK_THROWS_AS(spec.validate(), DomainError);
    spec.coeff_schedule = {{0, 0.1}};
    spec.innovation_sd = 0.0;
    CHECK_THROWS_AS(spec.validate(), DomainError);
    spec.innovation_sd = 1.0;
    spec.distortions = {{4, MonotoneMap{}}, {2, MonotoneMap{}}};
    CHECK_THROWS_AS(spec.validate(), DomainError);
}

TEST_CASE("MonotoneMap construction and evaluation") {
    CHECK_THROWS_AS(MonotoneMap::affine(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(MonotoneMap::affine(-2.0, 1.0), DomainError);
    CHECK_THROWS_AS(MonotoneMap::scale_tails(2.0, 1.0), DomainError);
    CHECK_THROWS_AS(MonotoneMap::scale_tails(-1.0, 2.0), DomainError);
    CHECK_THROWS_AS((MonotoneMap::piecewise_linear({0.0}, {0.0})), DomainError);
    CHECK_THROWS_AS((MonotoneMap::piecewise_linear({0.0, 1.0}, {1.0, 1.0})), DomainError);
    CHECK_THROWS_AS((MonotoneMap::piecewise_linear({0.0, 0.0}, {0.0, 1.0})), DomainError);

    CHECK((MonotoneMap{}(1.25) == 1.25));
    CHECK(MonotoneMap::affine(2.0, 1.0)(3.0) == 7.0);

    const auto tails = MonotoneMap::scale_tails(2.0, 2.0);
    CHECK(tails(1.5) == 1.5);
    CHECK(tails(-2.0) == -2.0);
    CHECK(tails(3.0) == 6.0);
    CHECK(tails(-3.0) == -6.0);

    const auto pwl = MonotoneMap::piecewise_linear({0.0, 1.0, 3.0}, {0.0, 2.0, 3.0});
    CHECK(pwl(0.5) == 1.0);
    CHECK(pwl(2.0) == 2.5);
    CHECK(pwl(-1.0) == -2.0); // first slope 2
    CHECK(pwl(5.0) == 4.0);   // last slope 1/2

    const auto chained = MonotoneMap::affine(std::sqrt(0.5), 0.0).then(tails);
    CHECK(chained(2.0) == doctest::Approx(std::sqrt(2.0)));
    CHECK(chained(4.0) == doctest::Approx(4.0 * std::sqrt(2.0)));
}

TEST_CASE("property: all map kinds are strictly increasing") {
    const std::vector<MonotoneMap> maps{
        MonotoneMap::affine(0.3, -4.0), MonotoneMap::scale_tails(1.0, 3.0),
        MonotoneMap::piecewise_linear({-1.0, 0.0, 2.0}, {-5.0, 0.0, 0.5}),
        MonotoneMap::affine(std::sqrt(0.5), 0.0).then(MonotoneMap::scale_tails(2.0, 2.0))};
    for (const auto& map : maps) {
        double previous = map(-10.0);
        for (double x = -9.99; x <= 10.0; x += 0.01) {
            const double y = map(x);
            CHECK(y > previous);
            previous = y;
        }
    }
}

TEST_CASE("apply_distortions acts piecewise by index") {
    const std::vector<double> x{1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
    CHECK((apply_distortions(x, {}) == x));
    const std::vector<Distortion> d{{2, MonotoneMap::affine(2.0, 0.0)},
                                    {4, MonotoneMap::affine(1.0, 5.0)}};
    CHECK((apply_distortions(x, d) == std::vector<double>{1.0, 1.0, 2.0, 2.0, 6.0, 6.0}));

    // fig2: x sqrt(2) from t=-2000, then x sqrt(1/2) with tails beyond +-2 doubled.
    const auto fig2 = make_preset("fig2");
    REQUIRE(fig2.spec.distortions.size() == 2);
    CHECK(fig2.spec.distortions[0].start == 3002);
    CHECK(fig2.spec.distortions[1].start == 7002);
    CHECK(fig2.spec.distortions[0].map(1.0) == doctest::Approx(std::sqrt(2.0)));
    CHECK(fig2.spec.distortions[1].map(2.0) == doctest::Approx(std::sqrt(2.0)));
    CHECK(fig2.spec.distortions[1].map(4.0) == doctest::Approx(4.0 * std::sqrt(2.0)));
}

TEST_CASE("distortions leave patterns within each piece unchanged") {
    auto scenario = make_preset("fig2");
    scenario.spec.seed = 3;
    auto plain = scenario.spec;
    plain.distortions.clear();
    const auto a = extract_pattern_sequence(simulate_ar1(plain), scenario.detector.pattern);
    const auto b = extract_pattern_sequence(simulate_ar1(scenario.spec), scenario.detector.pattern);
    std::size_t differ = 0;
    for (std::size_t j = 0; j < a.ids.size(); ++j) {
        const std::size_t t = j + a.first_sample_index;
        const bool straddles = (t >= 3002 && t < 3005) || (t >= 7002 && t < 7005);
        if (!straddles) {
            CHECK(a.ids[j] == b.ids[j]);
        }
        differ += a.ids[j] != b.ids[j];
    }
    CHECK(differ <= 6);

    // A single affine map over the whole series changes nothing.
    plain.distortions = {{0, MonotoneMap::affine(std::sqrt(2.0), 0.0)}};
    CHECK(extract_pattern_sequence(simulate_ar1(plain), scenario.detector.pattern) == a);
}

TEST_CASE("replication seeds are distinct and deterministic") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t r = 0; r < 1000; ++r) seen.insert(replication_seed(1, r));
    CHECK(seen.size() == 1000);
    CHECK(replication_seed(1, 5) == replication_seed(1, 5));
    CHECK(replication_seed(1, 5) != replication_seed(2, 5));
}

TEST_CASE("NormalSource moments") {
    NormalSource normal(42);
    double sum = 0.0;
    double sum_sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = normal();
        sum += z;
        sum_sq += z * z;
    }
    CHECK(std::abs(sum / n) <= 0.01);
    CHECK(std::abs(sum_sq / n - 1.0) <= 0.015);
}

TEST_CASE("monte_carlo basics") {
    const auto scenario = make_preset("fig3c");
    const auto one = monte_carlo(scenario.spec, scenario.detector, 1, 7);
    CHECK(one.counts.size() == 1);
    CHECK(one.frequency(one.modal_key()) == 1.0);

    const auto serial = monte_carlo(scenario.spec, scenario.detector, 24, 7, McMode::Single, 1);
    const auto threaded = monte_carlo(scenario.spec, scenario.detector, 24, 7, McMode::Single, 4);
    CHECK(serial.counts == threaded.counts);

    double total = 0.0;
    for (const auto& [key, f] : serial.histogram()) {
        CHECK(key.size() == 2);
        CHECK(key[0] + key[1] == 20);
        total += f;
    }
    CHECK(std::abs(total - 1.0) <= 1e-12);
    CHECK((format_key({5, 15}) == "(5,15)"));
    CHECK_THROWS_AS(monte_carlo(scenario.spec, scenario.detector, 0, 7), DomainError);
}

TEST_CASE("monte_carlo multiple mode keys are window-grid sample indices") {
    const auto scenario = make_preset("fig4a");
    const auto report = monte_carlo(scenario.spec, scenario.detector, 8, 3, McMode::Multiple);
    for (const auto& [key, count] : report.counts) {
        CHECK(key.size() <= 2);
        for (auto v : key) CHECK(v % 500 == 0);
    }
    CHECK(snap_to_window_grid(7506, scenario.detector.pattern) == 7500);
    CHECK(snap_to_window_grid(2503, scenario.detector.pattern) == 2500);
}

TEST_CASE("monte_carlo reports the failing replication") {
    auto scenario = make_preset("fig3a");
    scenario.spec.length = 900; // fewer than two windows
    scenario.spec.coeff_schedule = {{0, 0.1}};
    try {
        monte_carlo(scenario.spec, scenario.detector, 3, 1, McMode::Single, 1);
        FAIL("expected McError");
    } catch (const McError& e) {
        CHECK(e.replication() == 0);
    }
}

TEST_CASE("presets") {
    for (const auto& name : preset_names()) {
        const auto s = make_preset(name);
        CHECK(s.name == name);
        CHECK_NOTHROW(s.spec.validate());
        CHECK(s.spec.length == 10003);
        CHECK((s.detector.pattern == PatternConfig{3, 1, 500}));
        CHECK(s.detector.kernel.sigma_sq == 1.0);
    }
    CHECK((make_preset("fig3c").spec.coeff_schedule == std::vector<CoeffSegment>{{0, 0.1}, {2503, 0.4}}));
    CHECK((make_preset("fig4c").true_changes == std::vector<std::size_t>{2503, 7503}));
    CHECK(make_preset("fig4b").mode == McMode::Multiple);
    CHECK_THROWS_AS(make_preset("fig9"), DomainError);
}
