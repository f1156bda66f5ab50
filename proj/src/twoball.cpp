#include "mmcov/twoball.hpp"

#include "mmcov/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace mmcov {

void TwoBallParams::validate(double tol) const {
    if (!(d1 >= 0.0) || !(d2 >= d1) || !std::isfinite(d2))
        throw std::invalid_argument("two-ball: require 0 <= D1 <= D2 < inf");
    for (int b = 0; b < 3; ++b) {
        double sum = 0.0;
        for (int s = 0; s < 3; ++s) {
            if (!(q[s][b] >= 0.0 && q[s][b] <= 1.0))
                throw std::invalid_argument("two-ball: band probabilities must lie in [0, 1]");
            sum += q[s][b];
        }
        if (std::abs(sum - 1.0) > tol)
            throw std::invalid_argument("two-ball: band probabilities must sum to one in every band");
    }
}

namespace {

TwoBallParams make_table(double d1, double d2, std::array<double, 3> los, std::array<double, 3> nlos) {
    TwoBallParams tb;
    tb.d1 = d1;
    tb.d2 = d2;
    tb.q[0] = los;
    tb.q[1] = nlos;
    for (int b = 0; b < 3; ++b) tb.q[kOutState][b] = std::max(0.0, 1.0 - los[b] - nlos[b]);
    return tb;
}

}  // namespace

TwoBallParams table_two_ball_28ghz() {
    return make_table(56.9945, 201.4371, {0.8282, 0.1216, 0.0}, {0.1718, 0.7424, 0.0});
}

TwoBallParams table_two_ball_73ghz() {
    return make_table(53.6287, 195.3275, {0.8670, 0.1339, 0.0}, {0.1330, 0.7889, 0.0});
}

TwoBallConstants two_ball_constants(const TwoBallParams& tb, LinkState s, double lambda, const StatePathLoss& law) {
    const auto& q = tb.q[index(s)];
    const double pk = kPi * lambda / (law.kappa * law.kappa);
    const double pl = kPi * lambda;
    TwoBallConstants c;
    c.g = {pk * (q[0] - q[1]), pk * q[1],           pl * tb.d1 * tb.d1 * q[1],
           pl * tb.d1 * tb.d1 * q[0], pl * tb.d2 * tb.d2 * (q[1] - q[2]), pk * q[2]};
    return c;
}

double approx_intensity(double x, LinkState s, const TwoBallParams& tb, double lambda, const StatePathLoss& law) {
    if (!(x >= 0.0)) throw std::domain_error("approx_intensity: x must be >= 0");
    const auto& q = tb.q[index(s)];
    const double rho = std::pow(x, 1.0 / law.beta) / law.kappa;
    const double r1 = std::min(rho, tb.d1);
    const double r2 = std::clamp(rho, tb.d1, tb.d2);
    double v = q[0] * r1 * r1 + q[1] * (r2 - tb.d1) * (r2 + tb.d1);
    if (q[2] != 0.0 && rho > tb.d2) v += q[2] * (rho - tb.d2) * (rho + tb.d2);
    return kPi * lambda * v;
}

double approx_intensity_lognormal(double x, LinkState s, const TwoBallParams& tb, double lambda,
                                  const StatePathLoss& law, const LogNormalMoments& mom) {
    if (!(x > 0.0)) throw std::domain_error("approx_intensity_lognormal: x must be > 0");
    const double nu = 2.0 / law.beta;
    const double b1 = std::pow(law.kappa * tb.d1, law.beta);
    const double b2 = std::pow(law.kappa * tb.d2, law.beta);
    const auto c = two_ball_constants(tb, s, lambda, law);
    const auto p1 = lognormal_partial_moments(mom, nu, b1 / x);
    const auto p2 = lognormal_partial_moments(mom, nu, b2 / x);
    const double xn = std::pow(x, nu);
    double v = c.g[0] * xn * p1.m + c.g[1] * xn * p2.m + (c.g[3] - c.g[2]) * p1.fbar + c.g[4] * p2.fbar;
    if (c.g[5] != 0.0) v += c.g[5] * xn * p2.mbar;
    return v;
}

std::vector<double> FitGrid::values() const {
    if (points < 2 || !(hi_db > lo_db)) throw std::invalid_argument("fit grid: need >= 2 points and hi > lo");
    std::vector<double> xs(points);
    for (int i = 0; i < points; ++i) {
        const double db = lo_db + (hi_db - lo_db) * i / (points - 1);
        xs[i] = std::pow(10.0, db / 10.0);
    }
    return xs;
}

namespace {

constexpr int kParams = 11;  // D1, D2 - D1, q[LOS][3], q[NLOS][3], q[OUT][3]
constexpr double kMaxRadius = 1000.0;

TwoBallParams unpack(const Eigen::VectorXd& p) {
    TwoBallParams tb;
    tb.d1 = p(0);
    tb.d2 = p(0) + p(1);
    for (int s = 0; s < 3; ++s)
        for (int b = 0; b < 3; ++b) tb.q[s][b] = p(2 + 3 * s + b);
    return tb;
}

struct Model {
    std::vector<double> xs;
    std::vector<double> log_target;  // NaN marks excluded points
    PathLossParams laws;
    double lambda;

    Eigen::VectorXd residual(const Eigen::VectorXd& p) const {
        const TwoBallParams tb = unpack(p);
        Eigen::VectorXd r(static_cast<Eigen::Index>(xs.size()));
        Eigen::Index k = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (std::isnan(log_target[i])) continue;
            double m = 0.0;
            for (LinkState s : kLinkStates) m += approx_intensity(xs[i], s, tb, lambda, laws[s]);
            r(k++) = std::log(std::max(m, 1e-300)) - log_target[i];
        }
        return r.head(k);
    }

    Eigen::MatrixXd jacobian(const Eigen::VectorXd& p) const {
        const TwoBallParams tb = unpack(p);
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(xs.size()), kParams);
        Eigen::Index k = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (std::isnan(log_target[i])) continue;
            double m = 0.0;
            std::array<double, kParams> d{};
            for (LinkState s : kLinkStates) {
                const auto& law = laws[s];
                const auto& q = tb.q[index(s)];
                const double rho = std::pow(xs[i], 1.0 / law.beta) / law.kappa;
                const double r1 = std::min(rho, tb.d1);
                const double r2 = std::clamp(rho, tb.d1, tb.d2);
                const double r3 = std::max(rho, tb.d2);
                const double b0 = r1 * r1, b1 = (r2 - tb.d1) * (r2 + tb.d1), b2 = (r3 - tb.d2) * (r3 + tb.d2);
                m += kPi * lambda * (q[0] * b0 + q[1] * b1 + (q[2] != 0.0 ? q[2] * b2 : 0.0));
                const int o = 2 + 3 * static_cast<int>(index(s));
                d[o] += kPi * lambda * b0;
                d[o + 1] += kPi * lambda * b1;
                d[o + 2] += kPi * lambda * b2;
                const double dd1 = rho > tb.d1 ? 2.0 * tb.d1 * (q[0] - q[1]) : 0.0;
                const double dd2 = rho > tb.d2 ? 2.0 * tb.d2 * (q[1] - q[2]) : 0.0;
                d[0] += kPi * lambda * (dd1 + dd2);
                d[1] += kPi * lambda * dd2;
            }
            m = std::max(m, 1e-300);
            for (int j = 0; j < kParams; ++j) J(k, j) = d[j] / m;
            ++k;
        }
        return J.topRows(k);
    }
};

LeastSquaresProblem make_problem(const Model& model, bool constrained) {
    LeastSquaresProblem pb;
    pb.residual = [&model](const Eigen::VectorXd& p) { return model.residual(p); };
    pb.jacobian = [&model](const Eigen::VectorXd& p) { return model.jacobian(p); };
    pb.lower = Eigen::VectorXd::Zero(kParams);
    pb.upper = Eigen::VectorXd::Ones(kParams);
    pb.upper(0) = kMaxRadius;
    pb.upper(1) = kMaxRadius;
    if (constrained) {
        pb.eq_matrix = Eigen::MatrixXd::Zero(3, kParams);
        pb.eq_rhs = Eigen::VectorXd::Ones(3);
        for (int b = 0; b < 3; ++b)
            for (int s = 0; s < 3; ++s) pb.eq_matrix(b, 2 + 3 * s + b) = 1.0;
    }
    return pb;
}

// Scales LOS/NLOS down when they overshoot and assigns the rest to OUT.
Eigen::VectorXd project_bands(Eigen::VectorXd p) {
    for (int b = 0; b < 3; ++b) {
        double& l = p(2 + b);
        double& n = p(5 + b);
        const double sum = l + n;
        if (sum > 1.0) {
            l /= sum;
            n /= sum;
        }
        p(8 + b) = std::max(0.0, 1.0 - l - n);
    }
    return p;
}

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a(i) < b(i)) return true;
        if (a(i) > b(i)) return false;
    }
    return false;
}

}  // namespace

double max_abs_log_residual(const IntensityFn& target, const PathLossParams& laws, double lambda,
                            const TwoBallParams& tb, const FitGrid& grid) {
    double worst = 0.0;
    for (double x : grid.values()) {
        const double t = target(x);
        if (!(t > 0.0) || !std::isfinite(t)) continue;
        double m = 0.0;
        for (LinkState s : kLinkStates) m += approx_intensity(x, s, tb, lambda, laws[s]);
        worst = std::max(worst, std::abs(std::log(std::max(m, 1e-300)) - std::log(t)));
    }
    return worst;
}

FitReport fit_two_ball(const IntensityFn& target, const PathLossParams& laws, double lambda, const FitOptions& opts) {
    laws.validate();
    if (opts.starts < 1) throw std::invalid_argument("fit_two_ball: need at least one start");
    Model model;
    model.xs = opts.grid.values();
    model.laws = laws;
    model.lambda = lambda;
    FitReport rep;
    for (double x : model.xs) {
        const double t = target(x);
        if (t > 0.0 && std::isfinite(t)) {
            model.log_target.push_back(std::log(t));
        } else {
            model.log_target.push_back(std::numeric_limits<double>::quiet_NaN());
            ++rep.excluded_points;
        }
    }
    if (rep.excluded_points == static_cast<int>(model.xs.size()))
        throw std::invalid_argument("fit_two_ball: target intensity is zero on the whole grid");
    if (rep.excluded_points > 0)
        rep.warnings.push_back(std::to_string(rep.excluded_points) + " grid points with zero intensity excluded");

    // Draw all initial points up front so results do not depend on scheduling.
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Eigen::VectorXd> inits(opts.starts, Eigen::VectorXd(kParams));
    for (auto& p : inits) {
        const double d1 = 10.0 + 90.0 * unit(rng);
        const double d2 = d1 + (400.0 - d1) * unit(rng);
        p(0) = d1;
        p(1) = d2 - d1;
        for (int i = 2; i < kParams; ++i) p(i) = unit(rng);
    }

    const LeastSquaresProblem free_pb = make_problem(model, false);
    const LeastSquaresProblem cons_pb = make_problem(model, true);
    std::vector<LsqResult> phase1(opts.starts), phase2(opts.starts);
    parallel_for(static_cast<std::size_t>(opts.starts), [&](std::size_t i) {
        LeastSquaresProblem a = free_pb;
        a.x0 = inits[i];
        phase1[i] = solve_constrained_lsq(a, opts.lsq);
        LeastSquaresProblem b = cons_pb;
        b.x0 = project_bands(phase1[i].x);
        phase2[i] = solve_constrained_lsq(b, opts.lsq);
    });

    int best = 0;
    for (int i = 0; i < opts.starts; ++i) {
        FitStart st;
        for (int k = 0; k < kParams; ++k) st.initial[k] = inits[i](k);
        st.phase1_norm = phase1[i].norm;
        st.phase2_norm = phase2[i].norm;
        st.phase1_converged = phase1[i].converged;
        st.phase2_converged = phase2[i].converged;
        rep.starts.push_back(st);
        if (i == 0) continue;
        const double a = phase2[i].norm, b = phase2[best].norm;
        if (a < b || (a == b && lex_less(phase2[i].x, phase2[best].x))) best = i;
    }
    rep.best_start = best;
    rep.phase1_norm = phase1[best].norm;
    rep.phase2_norm = phase2[best].norm;
    if (!phase2[best].converged) rep.warnings.push_back("best start: " + phase2[best].message);

    TwoBallParams tb = unpack(phase2[best].x);
    constexpr double kDegenerate = 1e-6;
    if (tb.d1 < kDegenerate)
        for (int s = 0; s < 3; ++s) tb.q[s][kNear] = tb.q[s][kMid];
    if (tb.d2 - tb.d1 < kDegenerate)
        for (int s = 0; s < 3; ++s) tb.q[s][kMid] = tb.q[s][kNear];
    rep.params = tb;
    rep.far_band_zero = tb.q[0][kFar] < 1e-6 && tb.q[1][kFar] < 1e-6;

    rep.grid = model.xs;
    const Eigen::VectorXd r = model.residual(phase2[best].x);
    Eigen::Index k = 0;
    for (std::size_t i = 0; i < model.xs.size(); ++i) {
        if (std::isnan(model.log_target[i])) {
            rep.log_residual.push_back(std::numeric_limits<double>::quiet_NaN());
        } else {
            rep.log_residual.push_back(r(k));
            rep.max_abs_log_residual = std::max(rep.max_abs_log_residual, std::abs(r(k)));
            ++k;
        }
    }
    return rep;
}

FitReport fit_two_ball(const ChannelModel& ch, const FitOptions& opts) {
    // lambda scales target and model alike, so it drops out of the log residual
    constexpr double kLambda = 1e-4;
    PathLossIntensity pi(ch, kLambda);
    return fit_two_ball([&pi](double x) { return pi.lambda_total(x); }, ch.path_loss, kLambda, opts);
}

}  // namespace mmcov
