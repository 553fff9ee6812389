#ifndef WIGIG_CONFIG_HPP
#define WIGIG_CONFIG_HPP

#include <map>
#include <string>
#include <vector>

#include "wigig/engine.hpp"
#include "wigig/sim_config.hpp"

namespace wigig {

/// Flag-style overrides applied after the config file: keys are bare config
/// keys ("total_slots") or section-qualified ("sim.total_slots").
using Overrides = std::vector<std::pair<std::string, std::string>>;

/// Parses the sectioned key=value config format. Unknown sections or keys
/// and malformed values throw std::invalid_argument naming the offender.
ExperimentSpec parse_config_text(const std::string& text, const Overrides& overrides = {});
ExperimentSpec parse_config_file(const std::string& path, const Overrides& overrides = {});

/// Canonical rendering of a fully resolved spec; re-parsing it reproduces
/// the spec exactly (doubles are printed round-trip exact).
std::string render_config(const ExperimentSpec& spec);

/// All accepted "section.key" names, for help output and sweep validation.
std::vector<std::string> config_key_names();

/// Applies one value to the config; used by both the parser and sweep axes.
void apply_config_value(SimConfig& cfg, const std::string& section_key, const std::string& value);

}  // namespace wigig

#endif  // WIGIG_CONFIG_HPP
