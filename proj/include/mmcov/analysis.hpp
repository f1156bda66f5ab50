#pragma once

#include "mmcov/channel.hpp"
#include "mmcov/intensity.hpp"
#include "mmcov/numerics.hpp"
#include "mmcov/twoball.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace mmcov {

enum class Association { SmallestPathLoss, HighestPower };
enum class PowerMode { Exact, TwoBall };
enum class RateMode { Gcq, Adaptive, HighSnr };

const char* to_string(Association a);
const char* to_string(PowerMode m);
const char* to_string(RateMode m);

double density_from_cell_radius(double rc);  // 1 / (pi rc^2), 0 for rc = inf
double cell_radius_from_density(double lambda);

struct TierConfig {
    double density = 0.0;  // BS per m^2
    double tx_power_dbm = 30.0;
    AntennaPattern bs_pattern;

    static TierConfig from_cell_radius(double rc, double tx_power_dbm, const AntennaPattern& bs);
    double cell_radius() const { return cell_radius_from_density(density); }
    double tx_power_mw() const { return db_to_linear(tx_power_dbm); }
    void validate() const;
};

// Standard deviations of the Gaussian pointing errors, radians.
struct BeamErrorStd {
    double bs = 0.0;
    double mt = 0.0;
};

struct Scenario {
    ChannelModel channel;
    RadioConfig radio;
    std::vector<TierConfig> tiers;
    AntennaPattern mt_pattern;
    std::optional<BeamErrorStd> beam_error;
    Association association = Association::SmallestPathLoss;
    // Two-ball parameters for the closed-form paths; fitted on demand if absent.
    std::optional<TwoBallParams> two_ball;

    void validate() const;
    double noise_mw() const { return noise_power(radio); }
};

// Fills scn.two_ball by fitting when it is missing.
void ensure_two_ball(Scenario& scn, const FitOptions& opts = {});

// Linear gains of the serving link.
struct ServingGain {
    double bs = 1.0;
    double mt = 1.0;
};

ServingGain nominal_gain(const Scenario& scn, std::size_t tier = 0);

struct CoverageCurve {
    std::vector<double> thresholds;  // linear T
    std::vector<double> values;

    // Throws std::runtime_error when a value leaves [0, 1] or the curve increases
    // in T by more than tol.
    void validate(double tol = 1e-9) const;
};

// Smallest path-loss association, single tier, exact single integral.
double pcov_smallest_pathloss(const Scenario& scn, double T);
double pcov_smallest_pathloss(const Scenario& scn, double T, ServingGain g);

// Same association when LOS and NLOS shadowing laws coincide.
double pcov_iid_fading(const Scenario& scn, double T);
double pcov_iid_fading(const Scenario& scn, double T, ServingGain g);

// Highest received power association, single tier.
double pcov_highest_power(const Scenario& scn, double T, PowerMode mode);
double pcov_highest_power(const Scenario& scn, double T, PowerMode mode, ServingGain g);

// Highest received power across all tiers (tier power and BS gain enter the metric).
double pcov_multitier(const Scenario& scn, double T, PowerMode mode);

// Sum over tiers and states of E[Lambda_s([0, A P_k G_k y))].
double power_intensity(const Scenario& scn, double y, PowerMode mode);

struct BeamErrorMixture {
    std::array<double, 4> weights{};  // (max,max), (max,min), (min,max), (min,min) for (BS, MT)
    std::array<ServingGain, 4> gains{};
};

// Probability that |eps| <= beamwidth/2 for eps ~ N(0, sigma^2); 1 when sigma = 0.
double aligned_probability(double beamwidth, double sigma);
BeamErrorMixture beam_error_mixture(const AntennaPattern& bs, const AntennaPattern& mt, const BeamErrorStd& err);

using GainCoverage = std::function<double(double T, ServingGain g)>;
double pcov_with_beam_errors(const Scenario& scn, double T, const GainCoverage& base);

// Dispatches on association, tier count and beam errors.
double coverage(const Scenario& scn, double T, PowerMode mode = PowerMode::TwoBall);

CoverageCurve coverage_curve(const Scenario& scn, const std::vector<double>& thresholds,
                             PowerMode mode = PowerMode::TwoBall);

// Log-threshold where coverage falls to half its T -> 0 value; used to centre
// the rate quadratures.
double coverage_log_center(const std::function<double(double)>& pcov);

// int_0^inf pcov(t) / (1 + t) dt in nats per Hz.
double rate_integral(const std::function<double(double)>& pcov, RateMode mode, const QuadratureSpec& spec = {});

struct RateResult {
    double nats = 0.0;  // per Hz
    double bps = 0.0;   // BW / ln 2 * nats
    std::vector<std::string> warnings;
};

RateResult rate(const Scenario& scn, RateMode mode, PowerMode pmode = PowerMode::TwoBall,
                const QuadratureSpec& spec = {});

// High-SNR rate for smallest path-loss association, nats per Hz, at serving gain g.
double rate_high_snr(const Scenario& scn, ServingGain g);

}  // namespace mmcov
