#include "opcpd/error.hpp"
#include "opcpd/ordinal.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace opcpd;

namespace {

// Membership in B(pi) by conditions (i) and (ii), checked literally.
bool in_partition_cell(const std::vector<double>& x, const Permutation& r) {
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
        if (x[r[i]] < x[r[i + 1]]) return false;
        if (x[r[i]] == x[r[i + 1]] && !(r[i] > r[i + 1])) return false;
    }
    return true;
}

std::vector<Permutation> all_permutations(int n) {
    Permutation p(n);
    std::iota(p.begin(), p.end(), 0);
    std::vector<Permutation> out;
    do {
        out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

} // namespace

TEST_CASE("encode_pattern reproduces the documented examples") {
    CHECK((encode_pattern(std::vector{4.0, 3.0, 2.0, 1.0}) == Permutation{0, 1, 2, 3}));
    CHECK((encode_pattern(std::vector{4.0, 3.0, 1.0, 2.0}) == Permutation{0, 1, 3, 2}));
    CHECK((encode_pattern(std::vector{5.0, 5.0, 5.0, 5.0}) == Permutation{3, 2, 1, 0}));
    CHECK((encode_pattern(std::vector{1.0, 2.0, 3.0, 4.0}) == Permutation{3, 2, 1, 0}));
}

TEST_CASE("encode_pattern picks the unique cell of the partition, ties included") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> level(0, 3); // coarse levels force ties
    for (int d = 1; d <= 5; ++d) {
        const auto perms = all_permutations(d + 1);
        for (int trial = 0; trial < 300; ++trial) {
            std::vector<double> x(d + 1);
            for (auto& v : x) v = level(rng);
            const auto got = encode_pattern(x);
            const auto cells = std::count_if(perms.begin(), perms.end(),
                                             [&](const Permutation& p) { return in_partition_cell(x, p); });
            REQUIRE(cells == 1);
            CHECK(in_partition_cell(x, got));
        }
    }
}

TEST_CASE("encode_pattern rejects non-finite values with their position") {
    try {
        encode_pattern(std::vector{1.0, std::nan(""), 2.0, 3.0});
        FAIL("expected InvalidSample");
    } catch (const InvalidSample& e) {
        CHECK(e.position() == 1);
    }
    CHECK_THROWS_AS((encode_pattern(std::vector{1.0, 2.0, HUGE_VAL, 3.0})), InvalidSample);
    CHECK_THROWS_AS((encode_pattern(std::vector{1.0})), DomainError);
}

TEST_CASE("pattern_rank matches lexicographic enumeration") {
    for (int n = 2; n <= 6; ++n) {
        const auto perms = all_permutations(n);
        for (std::size_t k = 0; k < perms.size(); ++k) {
            REQUIRE(pattern_rank(perms[k]).code == k);
            REQUIRE((pattern_unrank(PatternId{static_cast<std::uint32_t>(k)}, n - 1) == perms[k]));
        }
    }
    CHECK((pattern_rank(std::vector{0, 1, 2, 3}).code == 0));
    CHECK((pattern_rank(std::vector{3, 2, 1, 0}).code == 23));
}

TEST_CASE("pattern_rank / unrank reject malformed input") {
    CHECK_THROWS_AS((pattern_rank(std::vector{0, 0, 1})), DomainError);
    CHECK_THROWS_AS((pattern_rank(std::vector{0, 1, 3})), DomainError);
    CHECK_THROWS_AS((pattern_rank(std::vector<int>{})), DomainError);
    CHECK_THROWS_AS((pattern_unrank(PatternId{24}, 3)), DomainError);
    CHECK_THROWS_AS((pattern_unrank(PatternId{0}, 0)), DomainError);
}

TEST_CASE("PatternConfig validation") {
    CHECK((PatternConfig{3, 1, 500}.alphabet_size() == 24));
    CHECK_FALSE((PatternConfig{3, 1, 500}.validate().has_value()));
    CHECK(PatternConfig{3, 1, 100}.validate().has_value()); // 100 < 240
    CHECK_THROWS_AS((PatternConfig{0, 1, 10}.validate()), DomainError);
    CHECK_THROWS_AS((PatternConfig{kMaxOrder + 1, 1, 10}.validate()), DomainError);
    CHECK_THROWS_AS((PatternConfig{3, 0, 10}.validate()), DomainError);
    CHECK_THROWS_AS((PatternConfig{3, 1, 0}.validate()), DomainError);
}

TEST_CASE("extract_pattern_sequence lengths and anchors") {
    const std::vector<double> ramp{1, 2, 3, 4, 5};
    const auto seq = extract_pattern_sequence(ramp, {3, 1, 1});
    REQUIRE(seq.ids.size() == 2);
    CHECK(seq.ids[0].code == 0);
    CHECK(seq.ids[1].code == 0);
    CHECK(seq.first_sample_index == 3);

    const std::vector<double> seven{1, 2, 3, 4, 5, 6, 7};
    CHECK((extract_pattern_sequence(seven, {3, 2, 1}).ids.size() == 1));

    // ids[j] is the pattern of (x[t], x[t-tau], ..., x[t-d*tau]) at t = d*tau + j.
    std::mt19937_64 rng(3);
    const auto series = test::random_walk(rng, 200);
    const PatternConfig cfg{4, 3, 1};
    const auto seq2 = extract_pattern_sequence(series, cfg);
    REQUIRE(seq2.ids.size() == series.size() - 12);
    for (std::size_t j = 0; j < seq2.ids.size(); j += 7) {
        std::vector<double> values;
        for (int i = 0; i <= 4; ++i) values.push_back(series[12 + j - 3 * i]);
        CHECK(seq2.ids[j] == pattern_rank(encode_pattern(values)));
    }
}

TEST_CASE("extract_pattern_sequence errors") {
    try {
        extract_pattern_sequence(std::vector{1.0, 2.0, 3.0}, {3, 1, 1});
        FAIL("expected InsufficientData");
    } catch (const InsufficientData& e) {
        CHECK(e.required() == 4);
        CHECK(e.available() == 3);
    }
    try {
        extract_pattern_sequence(std::vector{1.0, 2.0, 3.0, 4.0, std::nan(""), 6.0}, {3, 1, 1});
        FAIL("expected InvalidSample");
    } catch (const InvalidSample& e) {
        CHECK(e.position() == 4);
    }
}

TEST_CASE("windowed_distributions counts blocks of pattern positions") {
    PatternSequence seq;
    seq.order = 3;
    for (std::uint32_t c : {0u, 0u, 5u, 5u}) seq.ids.push_back(PatternId{c});
    const auto one = windowed_distributions(seq, {3, 1, 4});
    REQUIRE(one.size() == 1);
    CHECK(one[0].probs.size() == 24);
    CHECK(one[0].probs[0] == 0.5);
    CHECK(one[0].probs[5] == 0.5);
    CHECK(std::accumulate(one[0].probs.begin(), one[0].probs.end(), 0.0) == 1.0);

    seq.ids.assign(10, PatternId{1});
    CHECK((windowed_distributions(seq, {3, 1, 4}).size() == 2));

    std::vector<double> ramp(4 + 3);
    std::iota(ramp.begin(), ramp.end(), 0.0);
    const auto flat = windowed_distributions(extract_pattern_sequence(ramp, {3, 1, 4}), {3, 1, 4});
    REQUIRE(flat.size() == 1);
    CHECK(flat[0].probs[0] == 1.0);

    seq.ids.assign(3, PatternId{0});
    CHECK_THROWS_AS((windowed_distributions(seq, {3, 1, 4})), InsufficientData);
    CHECK_THROWS_AS((windowed_distributions(seq, {2, 1, 1})), DomainError);
}

TEST_CASE("property: strictly increasing maps leave pattern sequences bit-identical") {
    std::mt19937_64 rng(17);
    const PatternConfig cfg{3, 1, 50};
    for (int trial = 0; trial < 20; ++trial) {
        const auto series = test::random_walk(rng, 1000);
        const auto base = extract_pattern_sequence(series, cfg);
        auto mapped = [&](auto f) {
            std::vector<double> out(series.size());
            std::transform(series.begin(), series.end(), out.begin(), f);
            return extract_pattern_sequence(out, cfg);
        };
        CHECK((mapped([](double x) { return 3.5 * x - 7.0; }) == base));
        CHECK((mapped([](double x) { return x + 1e3; }) == base));
        CHECK((mapped([](double x) { return std::exp(x); }) == base));
        CHECK((mapped([](double x) { return std::atan(x); }) == base));
        CHECK(windowed_distributions(mapped([](double x) { return std::exp(x); }), cfg) ==
              windowed_distributions(base, cfg));
    }
}

TEST_CASE("property: piecewise distortion changes at most c*d*tau patterns") {
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<std::size_t> where(1, 1999);
    for (int tau = 1; tau <= 3; ++tau) {
        const PatternConfig cfg{3, tau, 50};
        for (int trial = 0; trial < 20; ++trial) {
            const auto series = test::random_walk(rng, 2000);
            std::vector<std::size_t> cuts{where(rng), where(rng), where(rng)};
            std::sort(cuts.begin(), cuts.end());
            cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
            // Alternate between two very different increasing maps per piece.
            std::vector<double> distorted = series;
            for (std::size_t t = 0; t < series.size(); ++t) {
                const auto piece = std::upper_bound(cuts.begin(), cuts.end(), t) - cuts.begin();
                distorted[t] = piece % 2 ? 10.0 * series[t] + 40.0 : std::atan(series[t]);
            }
            const auto a = extract_pattern_sequence(series, cfg);
            const auto b = extract_pattern_sequence(distorted, cfg);
            std::size_t differ = 0;
            for (std::size_t j = 0; j < a.ids.size(); ++j) differ += a.ids[j] != b.ids[j];
            CHECK(differ <= cuts.size() * cfg.warmup());
        }
    }
}

TEST_CASE("property: every window distribution is a stochastic vector") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> quant(-3, 3);
    for (int d = 1; d <= 4; ++d) {
        const PatternConfig cfg{d, 1, 37};
        std::vector<double> series(2000);
        for (auto& v : series) v = quant(rng); // quantised: many ties
        for (const auto& w : windowed_distributions(extract_pattern_sequence(series, cfg), cfg)) {
            double total = 0.0;
            for (double p : w.probs) {
                CHECK(p >= 0.0);
                CHECK(p <= 1.0);
                total += p;
            }
            CHECK(std::abs(total - 1.0) <= 1e-12);
        }
    }
}
