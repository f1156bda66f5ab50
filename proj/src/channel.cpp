#include "mmcov/channel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mmcov {

const char* to_string(LinkState s) { return s == LinkState::LOS ? "LOS" : "NLOS"; }

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
double deg_to_rad(double deg) { return deg * kPi / 180.0; }

void LinkStateParams::validate() const {
    if (!(delta_los >= 0.0) || !std::isfinite(delta_los))
        throw std::invalid_argument("link state: delta_los must be finite and >= 0");
    if (!(gamma_los > 0.0 && gamma_los <= 1.0))
        throw std::invalid_argument("link state: gamma_los must lie in (0, 1]");
    if (!(delta_out >= 0.0) || !std::isfinite(delta_out))
        throw std::invalid_argument("link state: delta_out must be finite and >= 0");
    if (!(gamma_out >= 0.0) || !std::isfinite(gamma_out))
        throw std::invalid_argument("link state: gamma_out must be finite and >= 0");
}

bool LinkStateParams::has_outage_decay() const { return delta_out >= 1e-12; }

double LinkStateParams::break_distance() const {
    if (!has_outage_decay()) return std::numeric_limits<double>::infinity();
    if (gamma_out <= 1.0) return 0.0;
    return std::log(gamma_out) / delta_out;
}

LinkProbs link_state_probs(const LinkStateParams& p, double r) {
    if (!(r >= 0.0)) throw std::domain_error("link_state_probs: r must be >= 0");
    const double keep = std::min(1.0, p.gamma_out * std::exp(-p.delta_out * r));
    const double los = keep * p.gamma_los * std::exp(-p.delta_los * r);
    const double out = 1.0 - keep;
    // nlos is the complement so the three terms sum to one in floating point
    return {los, 1.0 - out - los, out};
}

void StatePathLoss::validate() const {
    if (!(kappa > 0.0) || !std::isfinite(kappa))
        throw std::invalid_argument("path loss: kappa must be > 0");
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw std::invalid_argument("path loss: beta must be > 0");
    if (!(sigma_db > 0.0) || !std::isfinite(sigma_db))
        throw std::invalid_argument("path loss: sigma_db must be > 0");
    if (!std::isfinite(mu_db)) throw std::invalid_argument("path loss: mu_db must be finite");
}

double StatePathLoss::mu() const { return mu_db * std::log(10.0) / 10.0; }
double StatePathLoss::sigma() const { return sigma_db * std::log(10.0) / 10.0; }

void PathLossParams::validate() const {
    for (const auto& s : state) s.validate();
}

double path_loss(const StatePathLoss& p, double r) {
    if (!(r > 0.0)) throw std::domain_error("path_loss: r must be > 0");
    return std::pow(p.kappa * r, p.beta);
}

double kappa_from_floating_intercept(double alpha_db, double beta) {
    if (!(beta > 0.0)) throw std::domain_error("kappa_from_floating_intercept: beta must be > 0");
    return std::pow(10.0, alpha_db / (10.0 * beta));
}

void AntennaPattern::validate() const {
    if (!(gain_min > 0.0) || !(gain_max >= gain_min))
        throw std::invalid_argument("antenna: require gain_max >= gain_min > 0");
    if (!(beamwidth > 0.0 && beamwidth <= 2.0 * kPi + 1e-12))
        throw std::invalid_argument("antenna: beamwidth must lie in (0, 2pi]");
}

double AntennaPattern::main_lobe_fraction() const { return std::min(1.0, beamwidth / (2.0 * kPi)); }

double sectored_gain(const AntennaPattern& a, double theta) {
    return std::abs(theta) <= a.beamwidth ? a.gain_max : a.gain_min;
}

void RadioConfig::validate() const {
    if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("radio: bandwidth_hz must be > 0");
    if (!std::isfinite(noise_figure_db)) throw std::invalid_argument("radio: noise_figure_db must be finite");
}

double noise_power_dbm(const RadioConfig& cfg) {
    if (!(cfg.bandwidth_hz > 0.0)) throw std::domain_error("noise_power: bandwidth must be > 0");
    return -174.0 + 10.0 * std::log10(cfg.bandwidth_hz) + cfg.noise_figure_db;
}

double noise_power(const RadioConfig& cfg) { return db_to_linear(noise_power_dbm(cfg)); }

void ChannelModel::validate() const {
    link.validate();
    path_loss.validate();
}

}  // namespace mmcov
