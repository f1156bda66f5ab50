#include "mmcov/mcsim.hpp"

#include "mmcov/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace mmcov {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kBlock = 2048;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct Station {
    double loss;    // l(r), unshadowed
    double shadow;  // |h|^2
    double power;   // P_k G_BS,k^max, the association weight of its tier
    double tx;      // P_k
    double g_bs;    // interfering-link gains drawn from random orientations
    double g_mt;
    std::size_t tier;
};

struct Tally {
    std::uint64_t blocked = 0;
    std::uint64_t stations = 0;
    std::uint64_t sinr_above_snr = 0;
    std::array<std::vector<std::uint64_t>, 2> snr, sinr, gap;
    std::array<double, 2> rate_snr{}, rate_sinr{};

    explicit Tally(std::size_t nt) {
        for (int a = 0; a < 2; ++a) {
            snr[a].assign(nt, 0);
            sinr[a].assign(nt, 0);
            gap[a].assign(nt, 0);
        }
    }
};

Proportion proportion(std::uint64_t k, std::uint64_t n) {
    Proportion p;
    p.mean = static_cast<double>(k) / static_cast<double>(n);
    p.half_width = 1.96 * std::sqrt(p.mean * (1.0 - p.mean) / static_cast<double>(n));
    return p;
}

}  // namespace

std::uint64_t realization_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ index);
}

double default_window_radius(const Scenario& scn) {
    const double d0 = scn.channel.link.break_distance();
    if (scn.channel.link.has_outage_decay() && std::isfinite(d0)) return 5.0 * std::max(d0, 1.0);
    double rc = 0.0;
    for (const auto& t : scn.tiers)
        if (t.density > 0.0) rc = std::max(rc, t.cell_radius());
    return rc > 0.0 ? 10.0 * rc : 1000.0;
}

void SimConfig::validate() const {
    scenario.validate();
    if (realizations < 1) throw std::invalid_argument("simulation: realizations must be >= 1");
    if (window_radius < 0.0 || !std::isfinite(window_radius))
        throw std::invalid_argument("simulation: window radius must be finite and >= 0");
    const auto& link = scenario.channel.link;
    if (window_radius > 0.0 && link.has_outage_decay() && window_radius < 5.0 * link.break_distance())
        throw std::invalid_argument("simulation: window radius below 5x the outage break distance");
    for (double t : thresholds)
        if (!(t > 0.0)) throw std::invalid_argument("simulation: thresholds must be > 0");
}

SimStats simulate(const SimConfig& cfg) {
    cfg.validate();
    const Scenario& scn = cfg.scenario;
    const double W = cfg.window_radius > 0.0 ? cfg.window_radius : default_window_radius(scn);
    const double noise = scn.noise_mw();
    const std::size_t nt = cfg.thresholds.size();
    const std::size_t ntier = scn.tiers.size();
    const BeamErrorStd err = scn.beam_error.value_or(BeamErrorStd{});

    std::vector<double> mean_count(ntier);
    for (std::size_t k = 0; k < ntier; ++k) mean_count[k] = scn.tiers[k].density * kPi * W * W;

    SimStats st;
    st.thresholds = cfg.thresholds;
    st.realizations = cfg.realizations;
    st.window_radius = W;
    if (cfg.record_min_pathloss) st.min_pathloss.assign(cfg.realizations, kInf);

    const std::uint64_t nblocks = (cfg.realizations + kBlock - 1) / kBlock;
    std::vector<Tally> tallies(nblocks, Tally(nt));

    parallel_for(nblocks, [&](std::size_t b) {
        Tally& tl = tallies[b];
        std::vector<Station> bs;
        const std::uint64_t first = b * kBlock;
        const std::uint64_t last = std::min<std::uint64_t>(cfg.realizations, first + kBlock);
        for (std::uint64_t i = first; i < last; ++i) {
            std::mt19937_64 rng(realization_seed(cfg.seed, i));
            std::normal_distribution<double> gauss(0.0, 1.0);
            bs.clear();
            for (std::size_t k = 0; k < ntier; ++k) {
                if (mean_count[k] <= 0.0) continue;
                const TierConfig& tier = scn.tiers[k];
                const double tx = tier.tx_power_mw();
                std::poisson_distribution<std::uint64_t> count(mean_count[k]);
                const std::uint64_t n = count(rng);
                for (std::uint64_t j = 0; j < n; ++j) {
                    const double r = W * std::sqrt(unit(rng));
                    const double u = unit(rng);
                    const double z = gauss(rng);
                    const double th_bs = 2.0 * kPi * unit(rng);
                    const double th_mt = 2.0 * kPi * unit(rng);
                    const LinkProbs p = link_state_probs(scn.channel.link, r);
                    if (u >= p.los + p.nlos) continue;  // outage
                    const auto& law = scn.channel.path_loss[u < p.los ? LinkState::LOS : LinkState::NLOS];
                    Station s;
                    s.loss = path_loss(law, std::max(r, 1e-9));
                    s.shadow = std::exp(law.mu() + law.sigma() * z);
                    s.tx = tx;
                    s.power = tx * tier.bs_pattern.gain_max;
                    s.g_bs = sectored_gain(tier.bs_pattern, th_bs);
                    s.g_mt = sectored_gain(scn.mt_pattern, th_mt);
                    s.tier = k;
                    bs.push_back(s);
                }
            }
            // Serving-link pointing errors (ignored by the association rule).
            const double e_bs = err.bs > 0.0 ? err.bs * gauss(rng) : 0.0;
            const double e_mt = err.mt > 0.0 ? err.mt * gauss(rng) : 0.0;
            tl.stations += bs.size();

            if (bs.empty()) {
                ++tl.blocked;
                continue;
            }
            std::size_t by_loss = 0, by_power = 0;
            for (std::size_t j = 1; j < bs.size(); ++j) {
                if (bs[j].loss < bs[by_loss].loss) by_loss = j;
                if (bs[j].loss / (bs[j].shadow * bs[j].power) <
                    bs[by_power].loss / (bs[by_power].shadow * bs[by_power].power))
                    by_power = j;
            }
            if (cfg.record_min_pathloss) st.min_pathloss[i] = bs[by_loss].loss;

            const std::array<std::size_t, 2> serving{by_loss, by_power};
            for (int a = 0; a < 2; ++a) {
                const Station& s0 = bs[serving[a]];
                const AntennaPattern& bp = scn.tiers[s0.tier].bs_pattern;
                const double g_bs = std::abs(e_bs) <= 0.5 * bp.beamwidth ? bp.gain_max : bp.gain_min;
                const double g_mt =
                    std::abs(e_mt) <= 0.5 * scn.mt_pattern.beamwidth ? scn.mt_pattern.gain_max : scn.mt_pattern.gain_min;
                const double signal = s0.tx * g_bs * g_mt * s0.shadow / s0.loss;
                double interference = 0.0;
                if (cfg.interference)
                    for (std::size_t j = 0; j < bs.size(); ++j)
                        if (j != serving[a]) interference += bs[j].tx * bs[j].g_bs * bs[j].g_mt * bs[j].shadow / bs[j].loss;
                const double snr = signal / noise;
                const double sinr = signal / (noise + interference);
                if (sinr > snr) ++tl.sinr_above_snr;
                tl.rate_snr[a] += std::log1p(snr);
                tl.rate_sinr[a] += std::log1p(sinr);
                for (std::size_t t = 0; t < nt; ++t) {
                    const bool ok_snr = snr >= cfg.thresholds[t];
                    const bool ok_sinr = sinr >= cfg.thresholds[t];
                    tl.snr[a][t] += ok_snr;
                    tl.sinr[a][t] += ok_sinr;
                    tl.gap[a][t] += ok_snr && !ok_sinr;
                }
            }
        }
    });

    // Fixed-order reduction keeps floating sums independent of scheduling.
    Tally total(nt);
    for (const Tally& tl : tallies) {
        total.blocked += tl.blocked;
        total.stations += tl.stations;
        total.sinr_above_snr += tl.sinr_above_snr;
        for (int a = 0; a < 2; ++a) {
            total.rate_snr[a] += tl.rate_snr[a];
            total.rate_sinr[a] += tl.rate_sinr[a];
            for (std::size_t t = 0; t < nt; ++t) {
                total.snr[a][t] += tl.snr[a][t];
                total.sinr[a][t] += tl.sinr[a][t];
                total.gap[a][t] += tl.gap[a][t];
            }
        }
    }
    const std::uint64_t n = cfg.realizations;
    st.blockage = proportion(total.blocked, n);
    st.mean_bs_count = static_cast<double>(total.stations) / static_cast<double>(n);
    st.sinr_above_snr = total.sinr_above_snr;
    for (int a = 0; a < 2; ++a) {
        AssociationStats& as = a == 0 ? st.pathloss : st.power;
        for (std::size_t t = 0; t < nt; ++t) {
            as.snr_coverage.push_back(proportion(total.snr[a][t], n));
            as.sinr_coverage.push_back(proportion(total.sinr[a][t], n));
            as.gap.push_back(proportion(total.gap[a][t], n));
        }
        as.rate_snr_nats = total.rate_snr[a] / static_cast<double>(n);
        as.rate_sinr_nats = total.rate_sinr[a] / static_cast<double>(n);
    }
    return st;
}

SimStats simulate_multitier(const SimConfig& cfg) {
    if (cfg.scenario.tiers.size() < 2) throw std::invalid_argument("simulate_multitier: needs at least two tiers");
    return simulate(cfg);
}

std::vector<Proportion> noise_limited_gap(const SimConfig& cfg) {
    return simulate(cfg).for_association(cfg.scenario.association).gap;
}

}  // namespace mmcov
