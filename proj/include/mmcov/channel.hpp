#pragma once

#include <array>
#include <cstddef>

namespace mmcov {

inline constexpr double kPi = 3.14159265358979323846;

enum class LinkState { LOS = 0, NLOS = 1 };

inline constexpr std::array<LinkState, 2> kLinkStates{LinkState::LOS, LinkState::NLOS};

inline std::size_t index(LinkState s) { return static_cast<std::size_t>(s); }
const char* to_string(LinkState s);

double db_to_linear(double db);
double linear_to_db(double lin);
double deg_to_rad(double deg);

// Blockage model: p_out(r) = max(0, 1 - gamma_out e^{-delta_out r}),
// p_los(r) = (1 - p_out(r)) gamma_los e^{-delta_los r}.
struct LinkStateParams {
    double delta_los = 0.0;  // 1/m
    double gamma_los = 1.0;
    double delta_out = 0.0;  // 1/m
    double gamma_out = 1.0;

    void validate() const;
    // Distance beyond which outage becomes possible; +inf when p_out never grows.
    double break_distance() const;
    bool has_outage_decay() const;
};

struct LinkProbs {
    double los;
    double nlos;
    double out;
};

LinkProbs link_state_probs(const LinkStateParams& p, double r);

// Close-in law l(r) = (kappa r)^beta with Log-Normal shadowing given in dB.
struct StatePathLoss {
    double kappa = 1.0;
    double beta = 2.0;
    double mu_db = 0.0;
    double sigma_db = 1.0;

    void validate() const;
    double mu() const;     // natural-log location
    double sigma() const;  // natural-log scale
};

struct PathLossParams {
    std::array<StatePathLoss, 2> state{};

    const StatePathLoss& operator[](LinkState s) const { return state[index(s)]; }
    StatePathLoss& operator[](LinkState s) { return state[index(s)]; }
    void validate() const;
};

double path_loss(const StatePathLoss& p, double r);
double kappa_from_floating_intercept(double alpha_db, double beta);

struct AntennaPattern {
    double gain_max = 1.0;   // linear
    double gain_min = 1.0;   // linear
    double beamwidth = 2.0 * kPi;  // rad

    void validate() const;
    // Probability that a uniformly oriented link sees the main lobe.
    double main_lobe_fraction() const;
};

// theta is measured from the boresight on [0, 2pi); the main lobe occupies
// [0, beamwidth], so a uniform angle hits it with probability beamwidth/(2pi).
double sectored_gain(const AntennaPattern& a, double theta);

struct RadioConfig {
    double bandwidth_hz = 1.0;
    double noise_figure_db = 0.0;

    void validate() const;
};

double noise_power_dbm(const RadioConfig& cfg);
double noise_power(const RadioConfig& cfg);  // mW

struct ChannelModel {
    LinkStateParams link;
    PathLossParams path_loss;

    void validate() const;
};

}  // namespace mmcov
