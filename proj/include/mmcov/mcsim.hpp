#pragma once

#include "mmcov/analysis.hpp"

#include <cstdint>
#include <vector>

namespace mmcov {

struct SimConfig {
    Scenario scenario;
    double window_radius = 0.0;  // 0 selects default_window_radius()
    std::uint64_t realizations = 100000;
    std::uint64_t seed = 1;
    std::vector<double> thresholds;  // linear T
    bool interference = true;        // false forces I_agg = 0
    bool record_min_pathloss = false;

    void validate() const;
};

// 5x the outage break distance when outage decays with distance, else 10x the
// largest cell radius.
double default_window_radius(const Scenario& scn);

struct Proportion {
    double mean = 0.0;
    double half_width = 0.0;  // 95% normal-approximation interval
};

struct AssociationStats {
    std::vector<Proportion> snr_coverage;
    std::vector<Proportion> sinr_coverage;
    std::vector<Proportion> gap;  // P(SNR >= T) - P(SINR >= T), paired
    double rate_snr_nats = 0.0;   // mean ln(1 + SNR)
    double rate_sinr_nats = 0.0;
};

struct SimStats {
    std::vector<double> thresholds;
    std::uint64_t realizations = 0;
    double window_radius = 0.0;
    Proportion blockage;
    AssociationStats pathloss;
    AssociationStats power;
    std::vector<double> min_pathloss;  // per realization, +inf when blocked (if recorded)
    double mean_bs_count = 0.0;
    std::uint64_t sinr_above_snr = 0;  // must stay 0

    const AssociationStats& for_association(Association a) const {
        return a == Association::SmallestPathLoss ? pathloss : power;
    }
};

// Each realization draws a Poisson deployment in a disc of radius window_radius
// around the MT from its own seeded substream, so results depend only on
// (config, seed) and not on the thread count.
SimStats simulate(const SimConfig& cfg);

// Requires at least two tiers; otherwise identical to simulate().
SimStats simulate_multitier(const SimConfig& cfg);

// |P(SINR >= T) - P(SNR >= T)| per threshold for the scenario's association rule.
std::vector<Proportion> noise_limited_gap(const SimConfig& cfg);

std::uint64_t realization_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace mmcov
