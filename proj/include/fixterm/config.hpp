#pragma once

#include <string>

#include "fixterm/market.hpp"

namespace fixterm {

// INI-style scenario file. Sections: [market] r mu sigma, [illiquid] f0 mu_f sigma_f,
// [prefs] p1 p2, [constraints] c_floor v_floor, [run] T v0, [numerics] ...
// Missing keys keep the base-case defaults; unknown sections or keys are errors.
Scenario parse_config(const std::string& text);

Scenario load_config(const std::string& path);

// Writes every key, shortest round-trip formatting.
std::string emit_config(const Scenario& s);

// Shortest decimal that parses back to x exactly.
std::string format_exact(double x);

}  // namespace fixterm
