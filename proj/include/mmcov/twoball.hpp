#pragma once

#include "mmcov/channel.hpp"
#include "mmcov/intensity.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace mmcov {

enum Band : int { kNear = 0, kMid = 1, kFar = 2 };
inline constexpr int kOutState = 2;  // third row of TwoBallParams::q

// Piecewise-constant link-state probabilities on [0,D1), [D1,D2), [D2,inf).
struct TwoBallParams {
    double d1 = 0.0;
    double d2 = 0.0;
    std::array<std::array<double, 3>, 3> q{};  // q[LOS|NLOS|OUT][band]

    double prob(LinkState s, int band) const { return q[index(s)][band]; }
    void validate(double tol = 1e-9) const;
};

// 28 GHz and 73 GHz reference parameters reported with the model.
TwoBallParams table_two_ball_28ghz();
TwoBallParams table_two_ball_73ghz();

struct TwoBallConstants {
    std::array<double, 6> g{};  // G1..G6
};

TwoBallConstants two_ball_constants(const TwoBallParams& tb, LinkState s, double lambda, const StatePathLoss& law);

// Lambda_s^approx([0, x)).
double approx_intensity(double x, LinkState s, const TwoBallParams& tb, double lambda, const StatePathLoss& law);

// E[Lambda_s^approx([0, A x))] with A Log-Normal(mom), in closed form.
double approx_intensity_lognormal(double x, LinkState s, const TwoBallParams& tb, double lambda,
                                  const StatePathLoss& law, const LogNormalMoments& mom);

struct FitGrid {
    double lo_db = 80.0;
    double hi_db = 200.0;
    int points = 400;

    std::vector<double> values() const;
};

struct FitOptions {
    FitGrid grid;
    int starts = 16;
    std::uint64_t seed = 1;
    LsqOptions lsq;
};

struct FitStart {
    std::array<double, 11> initial{};
    double phase1_norm = 0.0;
    double phase2_norm = 0.0;
    bool phase1_converged = false;
    bool phase2_converged = false;
};

struct FitReport {
    TwoBallParams params;
    double phase1_norm = 0.0;
    double phase2_norm = 0.0;
    double max_abs_log_residual = 0.0;
    int best_start = -1;
    int excluded_points = 0;
    bool far_band_zero = false;  // q_LOS and q_NLOS on [D2, inf) came out (numerically) zero
    std::vector<double> grid;
    std::vector<double> log_residual;  // ln(model) - ln(target), NaN where excluded
    std::vector<FitStart> starts;
    std::vector<std::string> warnings;
};

using IntensityFn = std::function<double(double)>;

// Fits D1, D2 and the band probabilities by matching ln(sum_s Lambda_s) on a
// log-spaced path-loss grid: bound-only phase from a random start, then the
// simplex-constrained phase warm-started from the projected solution.
FitReport fit_two_ball(const IntensityFn& target, const PathLossParams& laws, double lambda, const FitOptions& opts);
FitReport fit_two_ball(const ChannelModel& ch, const FitOptions& opts);

// Log residual max over the grid for fixed parameters (used to compare fits).
double max_abs_log_residual(const IntensityFn& target, const PathLossParams& laws, double lambda,
                            const TwoBallParams& tb, const FitGrid& grid);

}  // namespace mmcov
