#pragma once

#include "mmcov/channel.hpp"
#include "mmcov/numerics.hpp"

#include <array>
#include <functional>

namespace mmcov {

// Closed-form constants of the path-loss intensity. Fields are informational
// (they reproduce the textbook parameterization); evaluation below uses the
// equivalent radial form, which also covers delta_los = 0 and no-outage limits.
struct IntensityConstants {
    double lambda = 0.0;
    double k1 = 0.0, k2 = 0.0;
    double r_const = 0.0, w_const = 0.0;
    std::array<double, 2> q{}, t{}, v{}, z{};
    double break_distance = 0.0;  // d0 = ln(gamma_out) / delta_out, +inf without outage decay
};

IntensityConstants intensity_constants(const ChannelModel& ch, double lambda);

struct LogNormalMoments {
    double mu = 0.0;
    double sigma = 1.0;
};

LogNormalMoments moments_of(const StatePathLoss& s);

// Per-state intensity measures of the path-loss process, Lambda_s([0, x)).
class PathLossIntensity {
public:
    PathLossIntensity(const ChannelModel& ch, double lambda);

    const ChannelModel& channel() const { return ch_; }
    double lambda() const { return lambda_; }
    const IntensityConstants& constants() const { return c_; }

    // Mass of LOS-type points (Upsilon_0) and of all non-outage points
    // (Upsilon_1) below x, both under the path-loss law of `law`.
    double upsilon0(double x, LinkState law) const;
    double upsilon1(double x, LinkState law) const;

    double lambda_los(double x) const;
    double lambda_nlos(double x) const;
    double lambda_state(double x, LinkState s) const;
    double lambda_total(double x) const;

    // d Lambda_s / dx; at a breakpoint the right limit is returned.
    double lambda_deriv(double x, LinkState s) const;

    // Path-loss value at which outage starts to thin the process (+inf if never).
    double breakpoint(LinkState s) const;

    double pathloss_cdf(double x) const;
    double blockage_intensity() const;  // Lambda_total(inf), +inf without outage

private:
    double rho(double x, LinkState law) const;
    double radial_los(double r) const;   // 2 pi lambda int_0^r p_los(u) u du
    double radial_all(double r) const;   // 2 pi lambda int_0^r (1 - p_out(u)) u du
    double radial_nlos(double r) const;  // 2 pi lambda int_0^r p_nlos(u) u du

    ChannelModel ch_;
    double lambda_;
    IntensityConstants c_;
    double keep_ = 1.0;  // 1 - p_out when outage does not decay with distance
    double d0_ = 0.0;
    bool decay_ = false;
};

double blockage_probability(const LinkStateParams& p, double lambda);

struct PartialMoments {
    double m;     // E[A^nu ; A < y]
    double f;     // P(A < y)
    double fbar;  // P(A >= y)
    double mbar;  // E[A^nu ; A >= y]
};

PartialMoments lognormal_partial_moments(const LogNormalMoments& mom, double nu, double y);

// E[g(A)] for A Log-Normal. Gauss-Hermite of the given order, or adaptive
// quadrature in z = (ln A - mu)/sigma when any kink of g (given in A) lies
// within the effective support.
double expect_lognormal(const std::function<double(double)>& g, const LogNormalMoments& mom,
                        const std::vector<double>& kinks = {}, int order = 64);

// sum_s E[Lambda_s([0, A_s x))] with A_s drawn from the state's shadowing law.
double expected_intensity_numeric(const PathLossIntensity& pi, double x);
double expected_intensity_numeric(const PathLossIntensity& pi, double x, LinkState s);

}  // namespace mmcov
