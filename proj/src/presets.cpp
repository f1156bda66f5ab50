#include "mmcov/presets.hpp"

#include <cmath>
#include <stdexcept>

namespace mmcov {

namespace {

AntennaPattern pattern(double gmax_db, double gmin_db, double width_deg) {
    return {db_to_linear(gmax_db), db_to_linear(gmin_db), deg_to_rad(width_deg)};
}

StatePathLoss law(double alpha_db, double beta, double sigma_db) {
    return {kappa_from_floating_intercept(alpha_db, beta), beta, 0.0, sigma_db};
}

}  // namespace

const char* preset_name(Preset p) {
    switch (p) {
        case Preset::MmWave28: return "mmwave-28ghz";
        case Preset::MmWave73: return "mmwave-73ghz";
        case Preset::UWave25: return "uwave-2.5ghz";
    }
    return "?";
}

std::optional<Preset> preset_from_name(const std::string& name) {
    for (Preset p : all_presets())
        if (name == preset_name(p)) return p;
    return std::nullopt;
}

std::vector<Preset> all_presets() { return {Preset::MmWave28, Preset::MmWave73, Preset::UWave25}; }

LinkStateParams mmwave_link_state() { return {1.0 / 67.1, 1.0, 1.0 / 30.0, std::exp(5.2)}; }

LinkStateParams mmwave_link_state_literal() { return {1.0 / 67.1, 1.0, 5.2, 1.0 / 30.0}; }

ChannelModel preset_channel(Preset p) {
    ChannelModel ch;
    switch (p) {
        case Preset::MmWave28:
            ch.link = mmwave_link_state();
            ch.path_loss[LinkState::LOS] = law(61.4, 2.0, 5.8);
            ch.path_loss[LinkState::NLOS] = law(72.0, 2.92, 8.7);
            break;
        case Preset::MmWave73:
            ch.link = mmwave_link_state();
            ch.path_loss[LinkState::LOS] = law(69.8, 2.0, 5.8);
            ch.path_loss[LinkState::NLOS] = law(82.7, 2.69, 8.7);
            break;
        case Preset::UWave25: {
            // Every link obeys the same law and nothing is ever in outage, so the
            // LOS/NLOS split carries no information: both slots hold that law.
            ch.link = {0.0, 1.0, 0.0, 1.0};
            const auto l = law(22.7 + 26.0 * std::log10(2.5), 3.67, 4.0);
            ch.path_loss[LinkState::LOS] = l;
            ch.path_loss[LinkState::NLOS] = l;
            break;
        }
    }
    return ch;
}

RadioConfig preset_radio(Preset p) { return {p == Preset::UWave25 ? 40e6 : 2e9, 10.0}; }

AntennaPattern preset_bs_pattern(Preset) { return pattern(20.0, -10.0, 30.0); }

AntennaPattern preset_mt_pattern(Preset p) {
    return p == Preset::UWave25 ? pattern(0.0, 0.0, 360.0) : pattern(20.0, -10.0, 30.0);
}

double preset_tx_power_dbm(Preset) { return 30.0; }

TwoBallParams preset_two_ball(Preset p) {
    switch (p) {
        case Preset::MmWave28: return table_two_ball_28ghz();
        case Preset::MmWave73: return table_two_ball_73ghz();
        case Preset::UWave25: break;
    }
    TwoBallParams tb;
    tb.q[index(LinkState::LOS)] = {1.0, 1.0, 1.0};
    return tb;
}

Scenario preset_scenario(Preset p, double cell_radius, Association a) {
    Scenario s;
    s.channel = preset_channel(p);
    s.radio = preset_radio(p);
    s.tiers = {TierConfig::from_cell_radius(cell_radius, preset_tx_power_dbm(p), preset_bs_pattern(p))};
    s.mt_pattern = preset_mt_pattern(p);
    s.association = a;
    s.two_ball = preset_two_ball(p);
    return s;
}

Scenario multitier_scenario(Preset p) {
    Scenario s = preset_scenario(p, 150.0, Association::HighestPower);
    s.tiers = {TierConfig::from_cell_radius(150.0, 30.0, pattern(20.0, -10.0, 30.0)),
               TierConfig::from_cell_radius(100.0, 10.0, pattern(10.0, 0.0, 40.0)),
               TierConfig::from_cell_radius(50.0, 5.0, pattern(5.0, 0.0, 50.0))};
    s.mt_pattern = pattern(5.0, 0.0, 50.0);
    return s;
}

}  // namespace mmcov
