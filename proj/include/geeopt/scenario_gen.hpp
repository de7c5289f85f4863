#pragma once

#include <string>

#include "geeopt/gen_config.hpp"
#include "geeopt/model.hpp"

namespace geeopt {

// Draws one random network: transmitters uniform on the square, receivers per
// topology, unit-mean exponential fading over distance^(-pathloss) gains.
// Deterministic: the same config (including seed) yields a bit-identical
// Scenario on every call. Positions closer than 1 m to any relevant
// transmitter are redrawn.
Scenario generate_scenario(const GenConfig& cfg);

// JSON round trip. save writes every numeric field plus a meta block with the
// generating config when present; load validates shape and sign invariants and
// reports the offending field by name. load(save(s)) == s exactly.
void save_scenario(const Scenario& s, const std::string& path);
Scenario load_scenario(const std::string& path);

std::string scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const std::string& text);

GenConfig gen_config_from_json(const std::string& text);
std::string gen_config_to_json(const GenConfig& cfg);
GenConfig load_gen_config(const std::string& path);

}  // namespace geeopt
