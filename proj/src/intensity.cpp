#include "mmcov/intensity.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mmcov {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// g(u)/u^2 with g(u) = 1 - e^{-u}(1 + u)
double g_over_u2(double u) {
    if (u < 0.5) {
        double term = 1.0, sum = 0.0, fact = 2.0;
        for (int n = 2; n < 30; ++n) {
            if (n > 2) {
                term *= -u;
                fact *= n;
            }
            sum += term * (n - 1) / fact;
        }
        return sum;
    }
    return -std::expm1(-u) / (u * u) - std::exp(-u) / u;
}

// 1/2 - g(u)/u^2, i.e. (u^2/2 - g(u))/u^2
double n_over_u2(double u) {
    if (u < 0.5) {
        double term = u, sum = 0.0, fact = 6.0;
        for (int n = 3; n < 32; ++n) {
            if (n > 3) {
                term *= -u;
                fact *= n;
            }
            sum += term * (n - 1) / fact;
        }
        return sum;
    }
    return 0.5 - g_over_u2(u);
}

double h_fn(double u) { return std::isinf(u) ? 0.0 : std::exp(-u) * (1.0 + u); }

// int_a^b r e^{-delta r} dr
double exp_moment(double delta, double a, double b) {
    if (!(b > a)) return 0.0;
    if (delta == 0.0) return std::isinf(b) ? kInf : 0.5 * (b - a) * (b + a);
    if (delta * b < 0.5) return b * b * g_over_u2(delta * b) - a * a * g_over_u2(delta * a);
    return (h_fn(delta * a) - h_fn(delta * b)) / (delta * delta);
}

// int_0^b r (1 - e^{-delta r}) dr
double exp_complement(double delta, double b) {
    if (b <= 0.0 || delta == 0.0) return 0.0;
    if (std::isinf(b)) return kInf;
    return b * b * n_over_u2(delta * b);
}

}  // namespace

LogNormalMoments moments_of(const StatePathLoss& s) { return {s.mu(), s.sigma()}; }

IntensityConstants intensity_constants(const ChannelModel& ch, double lambda) {
    const auto& L = ch.link;
    IntensityConstants c;
    c.lambda = lambda;
    c.break_distance = L.break_distance();
    const double d0 = c.break_distance;
    const double dl = L.delta_los, dsum = L.delta_los + L.delta_out;
    c.k1 = dl > 0.0 ? 2.0 * kPi * lambda * L.gamma_los / (dl * dl) : kInf;
    c.k2 = dsum > 0.0 ? 2.0 * kPi * lambda * L.gamma_los * L.gamma_out / (dsum * dsum) : kInf;
    c.r_const = dl * d0;
    c.w_const = dsum * d0;
    for (LinkState s : kLinkStates) {
        const auto& p = ch.path_loss[s];
        c.q[index(s)] = dl / p.kappa;
        c.t[index(s)] = L.delta_out / p.kappa;
        c.v[index(s)] = dsum / p.kappa;
        c.z[index(s)] = std::isinf(d0) ? kInf : std::pow(p.kappa * d0, p.beta);
    }
    return c;
}

PathLossIntensity::PathLossIntensity(const ChannelModel& ch, double lambda) : ch_(ch), lambda_(lambda) {
    ch_.validate();
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("intensity: lambda must be >= 0");
    c_ = intensity_constants(ch_, lambda);
    decay_ = ch_.link.has_outage_decay();
    d0_ = c_.break_distance;
    keep_ = decay_ ? 1.0 : std::min(1.0, ch_.link.gamma_out);
}

double PathLossIntensity::rho(double x, LinkState law) const {
    if (!(x >= 0.0)) throw std::domain_error("intensity: x must be >= 0");
    const auto& p = ch_.path_loss[law];
    return std::pow(x, 1.0 / p.beta) / p.kappa;
}

double PathLossIntensity::radial_los(double r) const {
    const auto& L = ch_.link;
    const double a = 2.0 * kPi * lambda_ * L.gamma_los;
    if (!decay_) return keep_ == 0.0 ? 0.0 : a * keep_ * exp_moment(L.delta_los, 0.0, r);
    double v = exp_moment(L.delta_los, 0.0, std::min(r, d0_));
    if (r > d0_) v += L.gamma_out * exp_moment(L.delta_los + L.delta_out, d0_, r);
    return a * v;
}

double PathLossIntensity::radial_all(double r) const {
    const auto& L = ch_.link;
    if (!decay_) return keep_ == 0.0 ? 0.0 : kPi * lambda_ * keep_ * r * r;
    const double m = std::min(r, d0_);
    double v = 0.5 * m * m;
    if (r > d0_) v += L.gamma_out * exp_moment(L.delta_out, d0_, r);
    return 2.0 * kPi * lambda_ * v;
}

double PathLossIntensity::radial_nlos(double r) const {
    const auto& L = ch_.link;
    const double gl = L.gamma_los;
    const double m = decay_ ? std::min(r, d0_) : r;
    double v = 0.0;
    if (m > 0.0) {
        if (gl < 1.0) v += (1.0 - gl) * 0.5 * m * m;
        v += gl * exp_complement(L.delta_los, m);
    }
    if (!decay_) return keep_ == 0.0 ? 0.0 : 2.0 * kPi * lambda_ * keep_ * v;
    if (r > d0_)
        v += L.gamma_out *
             (exp_moment(L.delta_out, d0_, r) - gl * exp_moment(L.delta_los + L.delta_out, d0_, r));
    return 2.0 * kPi * lambda_ * v;
}

double PathLossIntensity::upsilon0(double x, LinkState law) const { return radial_los(rho(x, law)); }
double PathLossIntensity::upsilon1(double x, LinkState law) const { return radial_all(rho(x, law)); }

double PathLossIntensity::lambda_los(double x) const { return radial_los(rho(x, LinkState::LOS)); }
double PathLossIntensity::lambda_nlos(double x) const { return radial_nlos(rho(x, LinkState::NLOS)); }

double PathLossIntensity::lambda_state(double x, LinkState s) const {
    return s == LinkState::LOS ? lambda_los(x) : lambda_nlos(x);
}

double PathLossIntensity::lambda_total(double x) const { return lambda_los(x) + lambda_nlos(x); }

double PathLossIntensity::lambda_deriv(double x, LinkState s) const {
    if (!(x >= 0.0)) throw std::domain_error("lambda_deriv: x must be >= 0");
    if (std::isinf(x)) return 0.0;
    const auto& p = ch_.path_loss[s];
    const double r = rho(x, s);
    const LinkProbs probs = link_state_probs(ch_.link, r);
    const double ps = s == LinkState::LOS ? probs.los : probs.nlos;
    if (ps == 0.0) return 0.0;
    // d/dx [2 pi lambda int_0^rho p_s(u) u du] with rho = x^{1/beta}/kappa
    return 2.0 * kPi * lambda_ * ps * std::pow(x, 2.0 / p.beta - 1.0) / (p.kappa * p.kappa * p.beta);
}

double PathLossIntensity::breakpoint(LinkState s) const { return c_.z[index(s)]; }

double PathLossIntensity::blockage_intensity() const { return radial_all(kInf); }

double PathLossIntensity::pathloss_cdf(double x) const { return -std::expm1(-lambda_total(x)); }

double blockage_probability(const LinkStateParams& p, double lambda) {
    p.validate();
    if (!(lambda >= 0.0)) throw std::invalid_argument("blockage_probability: lambda must be >= 0");
    if (lambda == 0.0) return 1.0;
    if (!p.has_outage_decay()) return p.gamma_out > 0.0 ? 0.0 : 1.0;
    const double d0 = p.break_distance();
    const double lam = kPi * lambda * d0 * d0 +
                       2.0 * kPi * lambda * p.gamma_out * h_fn(p.delta_out * d0) / (p.delta_out * p.delta_out);
    return std::exp(-lam);
}

PartialMoments lognormal_partial_moments(const LogNormalMoments& mom, double nu, double y) {
    if (!(y >= 0.0)) throw std::domain_error("lognormal_partial_moments: y must be >= 0");
    if (!(mom.sigma > 0.0)) throw std::domain_error("lognormal_partial_moments: sigma must be > 0");
    const double full = std::exp(nu * mom.mu + 0.5 * nu * nu * mom.sigma * mom.sigma);
    const double s2 = std::sqrt(2.0) * mom.sigma;
    const double w = (std::log(y) - mom.mu) / s2;  // -inf at y = 0, +inf at y = inf
    const double a = nu * mom.sigma / std::sqrt(2.0) - w;
    PartialMoments pm;
    pm.m = 0.5 * full * std::erfc(a);
    pm.mbar = 0.5 * full * std::erfc(-a);
    pm.f = 0.5 * std::erfc(-w);
    pm.fbar = 0.5 * std::erfc(w);
    return pm;
}

double expect_lognormal(const std::function<double(double)>& g, const LogNormalMoments& mom,
                        const std::vector<double>& kinks, int order) {
    if (!(mom.sigma > 0.0)) throw std::domain_error("expect_lognormal: sigma must be > 0");
    constexpr double kSupport = 9.0;
    std::vector<double> zk;
    for (double k : kinks) {
        if (!(k > 0.0) || std::isinf(k)) continue;
        const double z = (std::log(k) - mom.mu) / mom.sigma;
        if (std::abs(z) < kSupport) zk.push_back(z);
    }
    auto at = [&](double z) { return g(std::exp(mom.mu + mom.sigma * z)); };
    if (zk.empty()) {
        const auto& rule = gauss_hermite(order);
        double s = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * at(rule.nodes[i]);
        return s;
    }
    const double norm = 1.0 / std::sqrt(2.0 * kPi);
    auto f = [&](double z) { return at(z) * norm * std::exp(-0.5 * z * z); };
    QuadratureSpec spec;
    spec.abs_tol = 1e-300;
    spec.rel_tol = 1e-12;
    spec.max_subdivisions = 4000;
    try {
        return integrate(f, -14.0, 14.0, zk, spec).value;
    } catch (const NumericalError& e) {
        if (e.error_estimate() <= 1e-9 * std::abs(e.best_estimate())) return e.best_estimate();
        throw;
    }
}

double expected_intensity_numeric(const PathLossIntensity& pi, double x, LinkState s) {
    if (!(x >= 0.0)) throw std::domain_error("expected_intensity_numeric: x must be >= 0");
    if (x == 0.0) return 0.0;
    const auto mom = moments_of(pi.channel().path_loss[s]);
    std::vector<double> kinks;
    const double z = pi.breakpoint(s);
    if (std::isfinite(z) && z > 0.0) kinks.push_back(z / x);
    return expect_lognormal([&](double a) { return pi.lambda_state(a * x, s); }, mom, kinks);
}

double expected_intensity_numeric(const PathLossIntensity& pi, double x) {
    return expected_intensity_numeric(pi, x, LinkState::LOS) + expected_intensity_numeric(pi, x, LinkState::NLOS);
}

}  // namespace mmcov
