#include "opcpd/presets.hpp"

#include "opcpd/error.hpp"

#include <cmath>

namespace opcpd {

namespace {

constexpr std::size_t kWindows = 20;

DetectorConfig paper_detector() {
    DetectorConfig config;
    config.pattern = PatternConfig{3, 1, 500};
    config.kernel = KernelConfig{1.0, 1.0};
    config.statistic = Statistic::Cmmd;
    return config;
}

std::size_t change_index(std::size_t windows_before, const PatternConfig& pattern) {
    return pattern.warmup() + windows_before * pattern.window;
}

Scenario base(std::string name, std::string description) {
    Scenario s;
    s.name = std::move(name);
    s.description = std::move(description);
    s.detector = paper_detector();
    s.spec.length = change_index(kWindows, s.detector.pattern);
    s.spec.innovation_sd = 1.0;
    return s;
}

Scenario fig2() {
    Scenario s = base("fig2", "AR(1) 0.1 -> 0.3 after 10 of 20 windows; calibration changes at "
                              "t=-2000 (variance x2) and t=2000 (variance x1/2, tails beyond +-2 "
                              "scaled by 2)");
    const std::size_t cp = change_index(10, s.detector.pattern);
    s.spec.coeff_schedule = {{0, 0.1}, {cp, 0.3}};
    // Time t maps to index cp + t - 1.
    s.spec.distortions = {
        {cp - 2001, MonotoneMap::affine(std::sqrt(2.0), 0.0)},
        {cp + 1999,
         MonotoneMap::affine(std::sqrt(0.5), 0.0).then(MonotoneMap::scale_tails(2.0, 2.0))},
    };
    s.true_changes = {cp};
    return s;
}

Scenario fig3(char variant, double phi_after) {
    Scenario s = base(std::string("fig3") + variant,
                      "AR(1) 0.1 -> " + std::to_string(phi_after).substr(0, 3) +
                          " after 5 of 20 windows");
    const std::size_t cp = change_index(5, s.detector.pattern);
    s.spec.coeff_schedule = {{0, 0.1}, {cp, phi_after}};
    s.true_changes = {cp};
    return s;
}

Scenario fig4(char variant, double phi_mid) {
    const std::string mid = std::to_string(phi_mid).substr(0, 3);
    Scenario s = base(std::string("fig4") + variant,
                      "AR(1) 0.1 -> " + mid + " -> 0.1 at t=2500 and t=7500, two change-points");
    const std::size_t first = change_index(5, s.detector.pattern);
    const std::size_t second = change_index(15, s.detector.pattern);
    s.spec.coeff_schedule = {{0, 0.1}, {first, phi_mid}, {second, 0.1}};
    s.detector.multi = MultiConfig{2, 2, std::nullopt};
    s.mode = McMode::Multiple;
    s.true_changes = {first, second};
    return s;
}

} // namespace

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"fig2",  "fig3a", "fig3b", "fig3c",
                                                   "fig4a", "fig4b", "fig4c"};
    return names;
}

Scenario make_preset(std::string_view name) {
    if (name == "fig2") return fig2();
    if (name == "fig3a") return fig3('a', 0.2);
    if (name == "fig3b") return fig3('b', 0.3);
    if (name == "fig3c") return fig3('c', 0.4);
    if (name == "fig4a") return fig4('a', 0.4);
    if (name == "fig4b") return fig4('b', 0.3);
    if (name == "fig4c") return fig4('c', 0.2);
    throw DomainError("unknown preset '" + std::string(name) + "'");
}

} // namespace opcpd
