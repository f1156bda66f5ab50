#pragma once

#include "mmcov/analysis.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mmcov {

enum class Preset { MmWave28, MmWave73, UWave25 };

const char* preset_name(Preset p);  // "mmwave-28ghz", "mmwave-73ghz", "uwave-2.5ghz"
std::optional<Preset> preset_from_name(const std::string& name);
std::vector<Preset> all_presets();

// Outage parameters used by the mmWave presets: delta_out = 1/30 per m,
// gamma_out = e^5.2, i.e. outage becomes possible beyond ~156 m.
LinkStateParams mmwave_link_state();
// The other reading of the published constants (delta_out = 5.2, gamma_out = 1/30);
// outage is then almost certain at any distance. Kept for comparison only.
LinkStateParams mmwave_link_state_literal();

ChannelModel preset_channel(Preset p);
RadioConfig preset_radio(Preset p);
AntennaPattern preset_bs_pattern(Preset p);
AntennaPattern preset_mt_pattern(Preset p);
double preset_tx_power_dbm(Preset p);

// Published two-ball parameters for the mmWave presets; for the uWave preset the
// exact degenerate form (one band, always in the single state) is returned.
TwoBallParams preset_two_ball(Preset p);

Scenario preset_scenario(Preset p, double cell_radius, Association a = Association::SmallestPathLoss);

// Three-tier heterogeneous deployment (macro 150 m / 30 dBm, small cells 100 m
// and 50 m), highest-power association.
Scenario multitier_scenario(Preset p);

}  // namespace mmcov
