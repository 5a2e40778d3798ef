#pragma once

#include "opcpd/detector.hpp"
#include "opcpd/simulate.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace opcpd {

// A simulated scenario together with the detector settings used on it.
//
// All presets use d = 3, tau = 1, w = 500, sigma^2 = 1 and 20 windows.
// The series holds d*tau + 20*w = 10003 samples so that every window is
// full; sample index i corresponds to the time axis t = i - (d*tau + m*w - 1)
// where m is the number of windows before the change (t = 1 is the first
// sample generated with the new coefficient).
struct Scenario {
    std::string name;
    std::string description;
    SimSpec spec;
    DetectorConfig detector;
    McMode mode = McMode::Single;
    // Sample indices where the AR coefficient changes.
    std::vector<std::size_t> true_changes;
};

// fig2, fig3a, fig3b, fig3c, fig4a, fig4b, fig4c.
const std::vector<std::string>& preset_names();

// Throws DomainError for an unknown name.
Scenario make_preset(std::string_view name);

} // namespace opcpd
