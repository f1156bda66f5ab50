#include "mmcov/analysis.hpp"

#include "mmcov/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mmcov {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrt2 = 1.41421356237309504880;

void check_threshold(double T) {
    if (!(T > 0.0)) throw std::domain_error("coverage: threshold must be > 0");
}

const TierConfig& single_tier(const Scenario& scn, const char* who) {
    if (scn.tiers.size() != 1) throw std::invalid_argument(std::string(who) + ": requires exactly one tier");
    return scn.tiers.front();
}

// Shared single-integral machinery for smallest path-loss association:
// sum_s int w_s(x) dLambda_s(x) exp(-Lambda_L(x)), evaluated in u = ln x.
// w_s must be non-increasing in x so that w(u_hi) * P(L0 > x_hi) bounds the tail.
using StateWeight = std::function<double(double u, LinkState s)>;

double integrate_serving(const PathLossIntensity& pi, const StateWeight& w) {
    if (pi.lambda() == 0.0) return 0.0;
    constexpr double kMassFloor = 1e-18;
    constexpr double kTail = 1e-15;
    constexpr double kMaxLog = 700.0;

    double u_lo = 0.0;
    while (pi.lambda_total(std::exp(u_lo)) > kMassFloor && u_lo > -kMaxLog) u_lo -= 4.0;
    const double e_inf = std::exp(-pi.lambda_total(kInf));
    auto tail = [&](double u) {
        const double mass = std::max(0.0, std::exp(-pi.lambda_total(std::exp(u))) - e_inf);
        return mass * std::max(w(u, LinkState::LOS), w(u, LinkState::NLOS));
    };
    double u_hi = u_lo + 4.0;
    while (tail(u_hi) > kTail && u_hi < kMaxLog) u_hi += 2.0;

    std::vector<double> breaks;
    for (LinkState s : kLinkStates) {
        const double z = pi.breakpoint(s);
        if (std::isfinite(z) && z > 0.0) breaks.push_back(std::log(z));
    }
    auto f = [&](double u) {
        const double x = std::exp(u);
        const double surv = std::exp(-pi.lambda_total(x));
        double v = 0.0;
        for (LinkState s : kLinkStates) {
            const double d = pi.lambda_deriv(x, s);
            if (d > 0.0) v += w(u, s) * d * x;
        }
        return v * surv;
    };
    QuadratureSpec spec;
    spec.abs_tol = 1e-13;
    spec.rel_tol = 1e-10;
    spec.max_subdivisions = 4000;
    try {
        return integrate(f, u_lo, u_hi, breaks, spec).value;
    } catch (const NumericalError& e) {
        if (e.error_estimate() < 1e-9) return e.best_estimate();
        throw NumericalError(std::string("smallest path-loss integral: ") + e.what(), e.best_estimate(),
                             e.error_estimate());
    }
}

double intensity_term(const Scenario& scn, const TierConfig& tier, double arg, PowerMode mode) {
    if (tier.density == 0.0) return 0.0;
    if (arg == 0.0) return 0.0;
    double v = 0.0;
    if (mode == PowerMode::Exact) {
        const PathLossIntensity pi(scn.channel, tier.density);
        if (std::isinf(arg)) return pi.lambda_total(kInf);
        for (LinkState s : kLinkStates) v += expected_intensity_numeric(pi, arg, s);
        return v;
    }
    if (!scn.two_ball) throw std::logic_error("two-ball parameters missing; call ensure_two_ball first");
    for (LinkState s : kLinkStates) {
        const auto& law = scn.channel.path_loss[s];
        v += approx_intensity_lognormal(arg, s, *scn.two_ball, tier.density, law, moments_of(law));
    }
    return v;
}

double coverage_from_intensity(double lam) { return -std::expm1(-lam); }

}  // namespace

const char* to_string(Association a) {
    return a == Association::SmallestPathLoss ? "pathloss" : "power";
}

const char* to_string(PowerMode m) { return m == PowerMode::Exact ? "exact" : "twoball"; }

const char* to_string(RateMode m) {
    switch (m) {
        case RateMode::Gcq: return "gcq";
        case RateMode::Adaptive: return "adaptive";
        case RateMode::HighSnr: return "highsnr";
    }
    return "?";
}

double density_from_cell_radius(double rc) {
    if (!(rc > 0.0)) throw std::invalid_argument("cell radius must be > 0");
    if (std::isinf(rc)) return 0.0;
    return 1.0 / (kPi * rc * rc);
}

double cell_radius_from_density(double lambda) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("density must be >= 0");
    if (lambda == 0.0) return kInf;
    return std::sqrt(1.0 / (kPi * lambda));
}

TierConfig TierConfig::from_cell_radius(double rc, double tx_power_dbm, const AntennaPattern& bs) {
    TierConfig t;
    t.density = density_from_cell_radius(rc);
    t.tx_power_dbm = tx_power_dbm;
    t.bs_pattern = bs;
    return t;
}

void TierConfig::validate() const {
    if (!(density >= 0.0) || !std::isfinite(density)) throw std::invalid_argument("tier: density must be >= 0");
    if (!std::isfinite(tx_power_dbm)) throw std::invalid_argument("tier: tx power must be finite");
    bs_pattern.validate();
}

void Scenario::validate() const {
    channel.validate();
    radio.validate();
    if (tiers.empty()) throw std::invalid_argument("scenario: at least one tier required");
    for (const auto& t : tiers) t.validate();
    mt_pattern.validate();
    if (beam_error && (!(beam_error->bs >= 0.0) || !(beam_error->mt >= 0.0)))
        throw std::invalid_argument("scenario: beam error std must be >= 0");
    if (two_ball) two_ball->validate();
}

void ensure_two_ball(Scenario& scn, const FitOptions& opts) {
    if (scn.two_ball) return;
    scn.two_ball = fit_two_ball(scn.channel, opts).params;
}

ServingGain nominal_gain(const Scenario& scn, std::size_t tier) {
    if (tier >= scn.tiers.size()) throw std::out_of_range("nominal_gain: tier index");
    return {scn.tiers[tier].bs_pattern.gain_max, scn.mt_pattern.gain_max};
}

void CoverageCurve::validate(double tol) const {
    if (thresholds.size() != values.size()) throw std::runtime_error("coverage curve: size mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] >= -tol && values[i] <= 1.0 + tol)) {
            std::ostringstream os;
            os << "coverage curve: value " << values[i] << " outside [0, 1] at T = " << thresholds[i];
            throw std::runtime_error(os.str());
        }
        if (i > 0 && thresholds[i] > thresholds[i - 1] && values[i] > values[i - 1] + tol) {
            std::ostringstream os;
            os << "coverage curve: increases between T = " << thresholds[i - 1] << " and " << thresholds[i];
            throw std::runtime_error(os.str());
        }
    }
}

double pcov_smallest_pathloss(const Scenario& scn, double T) {
    return pcov_smallest_pathloss(scn, T, nominal_gain(scn));
}

double pcov_smallest_pathloss(const Scenario& scn, double T, ServingGain g) {
    check_threshold(T);
    const TierConfig& tier = single_tier(scn, "pcov_smallest_pathloss");
    if (std::isinf(T)) return 0.0;
    const PathLossIntensity pi(scn.channel, tier.density);
    const double log_gamma0 = std::log(tier.tx_power_mw() * g.bs * g.mt / scn.noise_mw());
    const double log_t = std::log(T);
    std::array<LogNormalMoments, 2> mom{moments_of(scn.channel.path_loss[LinkState::LOS]),
                                        moments_of(scn.channel.path_loss[LinkState::NLOS])};
    // P(A_s > T x / gamma0)
    return integrate_serving(pi, [&](double u, LinkState s) {
        const auto& m = mom[index(s)];
        return 0.5 * std::erfc((u + log_t - log_gamma0 - m.mu) / (kSqrt2 * m.sigma));
    });
}

double pcov_iid_fading(const Scenario& scn, double T) { return pcov_iid_fading(scn, T, nominal_gain(scn)); }

double pcov_iid_fading(const Scenario& scn, double T, ServingGain g) {
    check_threshold(T);
    const TierConfig& tier = single_tier(scn, "pcov_iid_fading");
    const auto& los = scn.channel.path_loss[LinkState::LOS];
    const auto& nlos = scn.channel.path_loss[LinkState::NLOS];
    if (los.mu_db != nlos.mu_db || los.sigma_db != nlos.sigma_db)
        throw std::invalid_argument("pcov_iid_fading: LOS and NLOS shadowing laws differ");
    if (std::isinf(T) || tier.density == 0.0) return 0.0;
    const PathLossIntensity pi(scn.channel, tier.density);
    const double scale = tier.tx_power_mw() * g.bs * g.mt / (scn.noise_mw() * T);
    std::vector<double> kinks;
    for (LinkState s : kLinkStates) {
        const double z = pi.breakpoint(s);
        if (std::isfinite(z)) kinks.push_back(z / scale);
    }
    return expect_lognormal([&](double a) { return pi.pathloss_cdf(scale * a); }, moments_of(los), kinks);
}

double power_intensity(const Scenario& scn, double y, PowerMode mode) {
    double lam = 0.0;
    for (const auto& tier : scn.tiers) lam += intensity_term(scn, tier, tier.tx_power_mw() * tier.bs_pattern.gain_max * y, mode);
    return lam;
}

double pcov_highest_power(const Scenario& scn, double T, PowerMode mode) {
    return pcov_highest_power(scn, T, mode, nominal_gain(scn));
}

double pcov_highest_power(const Scenario& scn, double T, PowerMode mode, ServingGain g) {
    check_threshold(T);
    const TierConfig& tier = single_tier(scn, "pcov_highest_power");
    const double y = g.mt / (scn.noise_mw() * T);
    return coverage_from_intensity(intensity_term(scn, tier, tier.tx_power_mw() * g.bs * y, mode));
}

double pcov_multitier(const Scenario& scn, double T, PowerMode mode) {
    check_threshold(T);
    if (scn.tiers.empty()) throw std::invalid_argument("pcov_multitier: no tiers");
    return coverage_from_intensity(power_intensity(scn, scn.mt_pattern.gain_max / (scn.noise_mw() * T), mode));
}

double aligned_probability(double beamwidth, double sigma) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("beam error std must be >= 0");
    if (sigma == 0.0) return 1.0;
    return std::erf(0.5 * beamwidth / (kSqrt2 * sigma));
}

BeamErrorMixture beam_error_mixture(const AntennaPattern& bs, const AntennaPattern& mt, const BeamErrorStd& err) {
    const double fb = aligned_probability(bs.beamwidth, err.bs);
    const double fm = aligned_probability(mt.beamwidth, err.mt);
    BeamErrorMixture m;
    m.weights[0] = fb * fm;
    m.weights[1] = fb * (1.0 - fm);
    m.weights[2] = (1.0 - fb) * fm;
    m.weights[3] = 1.0 - (m.weights[0] + m.weights[1] + m.weights[2]);
    m.weights[3] = std::max(0.0, m.weights[3]);
    m.gains = {ServingGain{bs.gain_max, mt.gain_max}, ServingGain{bs.gain_max, mt.gain_min},
               ServingGain{bs.gain_min, mt.gain_max}, ServingGain{bs.gain_min, mt.gain_min}};
    return m;
}

double pcov_with_beam_errors(const Scenario& scn, double T, const GainCoverage& base) {
    const TierConfig& tier = single_tier(scn, "pcov_with_beam_errors");
    const BeamErrorStd err = scn.beam_error.value_or(BeamErrorStd{});
    const auto mix = beam_error_mixture(tier.bs_pattern, scn.mt_pattern, err);
    double v = 0.0;
    for (int i = 0; i < 4; ++i)
        if (mix.weights[i] > 0.0) v += mix.weights[i] * base(T, mix.gains[i]);
    return v;
}

double coverage(const Scenario& scn, double T, PowerMode mode) {
    if (scn.tiers.size() > 1) {
        if (scn.association != Association::HighestPower)
            throw std::invalid_argument("coverage: multi-tier analysis requires highest-power association");
        if (scn.beam_error) throw std::invalid_argument("coverage: beam errors are supported for a single tier only");
        return pcov_multitier(scn, T, mode);
    }
    GainCoverage base;
    if (scn.association == Association::SmallestPathLoss)
        base = [&](double t, ServingGain g) { return pcov_smallest_pathloss(scn, t, g); };
    else
        base = [&](double t, ServingGain g) { return pcov_highest_power(scn, t, mode, g); };
    if (scn.beam_error) return pcov_with_beam_errors(scn, T, base);
    return base(T, nominal_gain(scn));
}

CoverageCurve coverage_curve(const Scenario& scn, const std::vector<double>& thresholds, PowerMode mode) {
    CoverageCurve c;
    c.thresholds = thresholds;
    c.values.assign(thresholds.size(), 0.0);
    parallel_for(thresholds.size(), [&](std::size_t i) { c.values[i] = coverage(scn, thresholds[i], mode); });
    return c;
}

double coverage_log_center(const std::function<double(double)>& pcov) {
    double lo = -60.0, hi = 300.0;
    const double half = 0.5 * pcov(std::exp(lo));
    if (!(half > 0.0)) return 0.0;
    if (pcov(std::exp(hi)) >= half) return hi;
    for (int i = 0; i < 30; ++i) {
        const double mid = 0.5 * (lo + hi);
        (pcov(std::exp(mid)) >= half ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double rate_integral(const std::function<double(double)>& pcov, RateMode mode, const QuadratureSpec& spec) {
    if (mode == RateMode::HighSnr) throw std::invalid_argument("rate_integral: high-SNR mode needs a scenario");
    const double c = coverage_log_center(pcov);
    if (pcov(std::exp(-60.0)) == 0.0) return 0.0;
    if (mode == RateMode::Gcq) return gcq_rate(pcov, spec, c, 4.0);
    // t = e^v: int pcov(e^v) / (1 + e^{-v}) dv; the part below v_lo is < e^{v_lo}
    const double v_lo = std::min(c, 0.0) - 40.0;
    double v_hi = c;
    while (pcov(std::exp(v_hi)) > 1e-16 && v_hi < 700.0) v_hi += 2.0;
    auto f = [&](double v) { return pcov(std::exp(v)) / (1.0 + std::exp(-v)); };
    QuadratureSpec s = spec;
    s.abs_tol = std::max(spec.abs_tol, 1e-11);
    s.rel_tol = std::max(spec.rel_tol, 1e-8);
    try {
        return integrate(f, v_lo, v_hi, {c}, s).value;
    } catch (const NumericalError& e) {
        if (e.error_estimate() <= 1e-6 * std::abs(e.best_estimate())) return e.best_estimate();
        throw NumericalError(std::string("rate integral: ") + e.what(), e.best_estimate(), e.error_estimate());
    }
}

double rate_high_snr(const Scenario& scn, ServingGain g) {
    const TierConfig& tier = single_tier(scn, "rate_high_snr");
    const PathLossIntensity pi(scn.channel, tier.density);
    const double log_gamma0 = std::log(tier.tx_power_mw() * g.bs * g.mt / scn.noise_mw());
    std::array<LogNormalMoments, 2> mom{moments_of(scn.channel.path_loss[LinkState::LOS]),
                                        moments_of(scn.channel.path_loss[LinkState::NLOS])};
    // E[max(0, Y)], Y = ln(gamma0 A / x) ~ N(m, sigma^2)
    return integrate_serving(pi, [&](double u, LinkState s) {
        const auto& mm = mom[index(s)];
        const double m = mm.mu + log_gamma0 - u;
        const double z = m / (kSqrt2 * mm.sigma);
        return 0.5 * m * std::erfc(-z) + mm.sigma / std::sqrt(2.0 * kPi) * std::exp(-z * z);
    });
}

RateResult rate(const Scenario& scn, RateMode mode, PowerMode pmode, const QuadratureSpec& spec) {
    RateResult r;
    if (mode == RateMode::HighSnr) {
        if (scn.association != Association::SmallestPathLoss)
            throw std::invalid_argument("rate: high-SNR mode requires smallest path-loss association");
        const TierConfig& tier = single_tier(scn, "rate");
        const ServingGain g0 = nominal_gain(scn);
        const double gamma0 = tier.tx_power_mw() * g0.bs * g0.mt / scn.noise_mw();
        if (gamma0 < 100.0) {
            std::ostringstream os;
            os << "high-SNR premise weak: gamma0 = " << linear_to_db(gamma0) << " dB < 20 dB";
            r.warnings.push_back(os.str());
        }
        if (scn.beam_error) {
            const auto mix = beam_error_mixture(tier.bs_pattern, scn.mt_pattern, *scn.beam_error);
            for (int i = 0; i < 4; ++i)
                if (mix.weights[i] > 0.0) r.nats += mix.weights[i] * rate_high_snr(scn, mix.gains[i]);
        } else {
            r.nats = rate_high_snr(scn, g0);
        }
    } else {
        r.nats = rate_integral([&](double t) { return coverage(scn, t, pmode); }, mode, spec);
    }
    r.bps = scn.radio.bandwidth_hz / std::log(2.0) * r.nats;
    return r;
}

}  // namespace mmcov
