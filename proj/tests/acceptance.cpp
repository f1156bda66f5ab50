// End-to-end acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [--only N] [--expect-fail N[,M...]]
//
// Exit status is 0 when every criterion passes, or fails only where listed
// with --expect-fail. A listed criterion that passes is also an error, so a
// stale expectation cannot hide an improvement.

#include "mmcov/analysis.hpp"
#include "mmcov/mcsim.hpp"
#include "mmcov/presets.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace mmcov;

namespace {

struct Verdict {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [violated: " << what << "]";
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<double> db_grid(double lo, double hi, double step) {
    std::vector<double> v;
    for (double d = lo; d <= hi + 1e-9; d += step) v.push_back(db_to_linear(d));
    return v;
}

const std::vector<double> kRadii{50.0, 100.0, 150.0, 200.0};

std::string fmt(double v, int prec = 4) {
    char b[64];
    std::snprintf(b, sizeof b, "%.*g", prec, v);
    return b;
}

SimStats run_mc(const Scenario& scn, const std::vector<double>& T, std::uint64_t n = 100000, std::uint64_t seed = 1) {
    SimConfig c;
    c.scenario = scn;
    c.thresholds = T;
    c.realizations = n;
    c.seed = seed;
    return simulate(c);
}

// 1 --------------------------------------------------------------------------
Verdict two_ball_table() {
    Verdict v;
    const auto t0 = Clock::now();
    for (Preset p : {Preset::MmWave28, Preset::MmWave73}) {
        const FitReport rep = fit_two_ball(preset_channel(p), FitOptions{});
        const TwoBallParams ref = preset_two_ball(p);
        const double e1 = std::abs(rep.params.d1 / ref.d1 - 1.0), e2 = std::abs(rep.params.d2 / ref.d2 - 1.0);
        double eq = 0.0;
        for (int s = 0; s < 3; ++s)
            for (int b = 0; b < 3; ++b) eq = std::max(eq, std::abs(rep.params.q[s][b] - ref.q[s][b]));
        v.detail << " " << preset_name(p) << ": D1=" << fmt(rep.params.d1, 6) << " (" << fmt(100 * e1, 2) << "%)"
                 << " D2=" << fmt(rep.params.d2, 6) << " (" << fmt(100 * e2, 2) << "%)"
                 << " max|dq|=" << fmt(eq, 3) << ";";
        v.require(e1 <= 0.05, std::string(preset_name(p)) + " D1 within 5%");
        v.require(e2 <= 0.05, std::string(preset_name(p)) + " D2 within 5%");
        v.require(eq <= 0.03, std::string(preset_name(p)) + " band probabilities within 0.03");
    }
    const double t = seconds_since(t0);
    v.detail << " time " << fmt(t, 3) << " s";
    v.require(t < 120.0, "runtime < 2 min");
    return v;
}

// 2 --------------------------------------------------------------------------
Verdict intensity_oracle() {
    Verdict v;
    const auto t0 = Clock::now();
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = 0.0, worst_d = 0.0;
    int n_deriv = 0;
    for (int i = 0; i < 1000; ++i) {
        ChannelModel ch;
        ch.link = {U(rng) < 0.1 ? 0.0 : 1.0 / (10.0 + 190.0 * U(rng)), 0.3 + 0.7 * U(rng),
                   U(rng) < 0.1 ? 0.0 : 1.0 / (10.0 + 90.0 * U(rng)), 0.5 + 300.0 * U(rng)};
        for (LinkState s : kLinkStates)
            ch.path_loss[s] = {std::pow(10.0, 3.5 * U(rng)), 1.8 + 2.7 * U(rng), 0.0, 1.0 + 9.0 * U(rng)};
        const double lambda = std::pow(10.0, -6.0 + 3.0 * U(rng));
        const PathLossIntensity pi(ch, lambda);
        const oracle::Link o{ch.link.delta_los, ch.link.gamma_los, ch.link.delta_out, ch.link.gamma_out};
        const LinkState law = U(rng) < 0.5 ? LinkState::LOS : LinkState::NLOS;
        const auto& pl = ch.path_loss[law];
        const double r = std::pow(10.0, 3.3 * U(rng));
        const double x = std::pow(pl.kappa * r, pl.beta);
        auto radial = [&](const std::function<double(double)>& p, LinkState s) {
            const auto& l = ch.path_loss[s];
            return oracle::radial_integral(p, lambda, std::pow(x, 1.0 / l.beta) / l.kappa, o.kink());
        };
        auto los = [&](double u) { return o.p_los(u); };
        auto nlos = [&](double u) { return o.p_nlos(u); };
        auto all = [&](double u) { return 1.0 - o.p_out(u); };
        auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };
        worst = std::max({worst, rel(pi.upsilon0(x, law), radial(los, law)), rel(pi.upsilon1(x, law), radial(all, law)),
                          rel(pi.lambda_los(x), radial(los, LinkState::LOS)),
                          rel(pi.lambda_nlos(x), radial(nlos, LinkState::NLOS))});
        for (LinkState s : kLinkStates) {
            // the derivative has a corner at the outage breakpoint; FD is meaningless there
            if (std::abs(x / pi.breakpoint(s) - 1.0) < 1e-2) continue;
            const double d = pi.lambda_deriv(x, s);
            if (d == 0.0) continue;
            const double fd = oracle::five_point([&](double y) { return pi.lambda_state(y, s); }, x, 1e-4 * x);
            // FD noise is ~1e-12 * lambda/x; deep in the tails d itself sits below that
            const double scale = std::max(std::abs(fd), pi.lambda_state(x, s) / x);
            worst_d = std::max(worst_d, std::abs(d - fd) / std::max(scale, 1e-300));
            ++n_deriv;
        }
    }
    const double t = seconds_since(t0);
    v.detail << " max rel err " << fmt(worst, 3) << " (1000 draws); derivative max rel err " << fmt(worst_d, 3) << " ("
             << n_deriv << " checks); time " << fmt(t, 3) << " s";
    v.require(worst < 1e-7, "intensity rel err < 1e-7");
    v.require(worst_d < 1e-5, "derivative rel err < 1e-5");
    v.require(t < 60.0, "runtime < 1 min");
    return v;
}

// 3 --------------------------------------------------------------------------
Verdict blockage() {
    Verdict v;
    double worst_id = 0.0, worst_z = 0.0;
    for (Preset p : all_presets()) {
        for (double rc : {50.0, 100.0, 150.0, 200.0, 400.0}) {
            const Scenario scn = preset_scenario(p, rc);
            const PathLossIntensity pi(scn.channel, scn.tiers[0].density);
            const double pb = std::exp(-pi.blockage_intensity());
            worst_id = std::max(worst_id, std::abs(pb - (1.0 - pi.pathloss_cdf(INFINITY))));
            worst_id = std::max(worst_id, std::abs(pb - blockage_probability(scn.channel.link, scn.tiers[0].density)));
        }
    }
    for (Preset p : {Preset::MmWave28, Preset::UWave25}) {
        for (double rc : {150.0, 200.0}) {
            const Scenario scn = preset_scenario(p, rc);
            const double pb = blockage_probability(scn.channel.link, scn.tiers[0].density);
            const SimStats st = run_mc(scn, {}, 100000, 3);
            const double sd = std::sqrt(pb * (1.0 - pb) / 1e5);
            const double z = sd > 0.0 ? std::abs(st.blockage.mean - pb) / sd : (st.blockage.mean == pb ? 0.0 : INFINITY);
            worst_z = std::max(worst_z, z);
            v.detail << " " << preset_name(p) << " rc=" << rc << ": mc " << fmt(st.blockage.mean) << " vs " << fmt(pb) << ";";
        }
    }
    const auto link = mmwave_link_state();
    const double at_zero = blockage_probability(link, 0.0);
    const double near_zero = blockage_probability(link, 1e-15);
    LinkStateParams no_out = link;
    no_out.delta_out = 0.0;
    no_out.gamma_out = 1.0;
    const double without_outage = blockage_probability(no_out, 1e-4);
    ChannelModel ch = preset_channel(Preset::MmWave28);
    ch.link = no_out;
    const double without_outage_pi = std::exp(-PathLossIntensity(ch, 1e-4).blockage_intensity());
    v.detail << " identity err " << fmt(worst_id, 3) << "; MC max |z| " << fmt(worst_z, 3) << "; P(lambda=0)=" << at_zero
             << "; P(delta_out=0)=" << without_outage;
    v.require(worst_id <= 1e-10, "exp(-Lambda_inf) = 1 - F(inf)");
    v.require(worst_z <= 3.0, "MC within 3 sigma");
    v.require(at_zero == 1.0 && std::abs(near_zero - 1.0) < 1e-9, "blockage -> 1 as lambda -> 0");
    v.require(without_outage == 0.0 && without_outage_pi == 0.0, "no blockage without outage");
    return v;
}

// 4 and 5 share the simulation runs ---------------------------------------------
struct McCache {
    std::vector<double> T = db_grid(-10.0, 30.0, 1.0);
    std::vector<std::pair<std::pair<Preset, double>, SimStats>> runs;

    const SimStats& get(Preset p, double rc) {
        for (auto& [k, st] : runs)
            if (k.first == p && k.second == rc) return st;
        runs.push_back({{p, rc}, run_mc(preset_scenario(p, rc), T)});
        return runs.back().second;
    }
};

Verdict mc_coverage(McCache& mc) {
    Verdict v;
    const auto t0 = Clock::now();
    double worst = 0.0, worst_tb = 0.0;
    std::string where;
    for (Preset p : all_presets()) {
        double pw = 0.0;
        for (double rc : kRadii) {
            const SimStats& st = mc.get(p, rc);
            const Scenario scn = preset_scenario(p, rc);
            for (std::size_t i = 0; i < mc.T.size(); ++i) {
                const double a = std::abs(pcov_smallest_pathloss(scn, mc.T[i]) - st.pathloss.snr_coverage[i].mean);
                const double b = std::abs(pcov_highest_power(scn, mc.T[i], PowerMode::Exact) - st.power.snr_coverage[i].mean);
                const double c = std::abs(pcov_highest_power(scn, mc.T[i], PowerMode::TwoBall) - st.power.snr_coverage[i].mean);
                if (std::max(a, b) > worst) {
                    worst = std::max(a, b);
                    where = std::string(preset_name(p)) + " rc=" + fmt(rc) + " T=" + fmt(linear_to_db(mc.T[i])) + "dB " +
                            (a > b ? "pathloss" : "power");
                }
                pw = std::max({pw, a, b});
                worst_tb = std::max(worst_tb, c);
            }
        }
        v.detail << " " << preset_name(p) << " max|diff|=" << fmt(pw, 3) << ";";
    }
    const double t = seconds_since(t0);
    v.detail << " worst at " << where << "; two-ball power path max|diff|=" << fmt(worst_tb, 3) << " (informative); time "
             << fmt(t, 3) << " s";
    v.require(worst <= 0.01, "|analytic - MC| <= 0.01");
    v.require(t < 600.0, "runtime < 10 min");
    return v;
}

Verdict noise_limited(McCache& mc) {
    Verdict v;
    for (Preset p : {Preset::MmWave28, Preset::MmWave73}) {
        double gap150 = 0.0, gap30 = 0.0;
        const SimStats& st = mc.get(p, 150.0);
        const SimStats dense = run_mc(preset_scenario(p, 30.0), mc.T);
        for (std::size_t i = 0; i < mc.T.size(); ++i) {
            gap150 = std::max({gap150, st.pathloss.gap[i].mean, st.power.gap[i].mean});
            gap30 = std::max({gap30, dense.pathloss.gap[i].mean, dense.power.gap[i].mean});
        }
        v.detail << " " << preset_name(p) << ": max gap rc=150 " << fmt(gap150, 3) << ", rc=30 " << fmt(gap30, 3) << ";";
        v.require(gap150 <= 0.05, std::string(preset_name(p)) + " gap <= 0.05 at rc=150");
        v.require(gap30 > gap150, std::string(preset_name(p)) + " larger gap at rc=30");
    }
    return v;
}

// 6 --------------------------------------------------------------------------
Verdict ordering_limits() {
    Verdict v;
    const std::vector<double> T = db_grid(-20.0, 40.0, 1.0);
    double order_violation = 0.0, limit0 = 0.0, limit_inf = 0.0, mono_violation = 0.0, tail_inf = 0.0;
    auto track_mono = [&](double prev, double next) { mono_violation = std::max(mono_violation, prev - next); };
    for (Preset p : all_presets()) {
        for (double rc : kRadii) {
            const Scenario pl = preset_scenario(p, rc);
            const Scenario pw = preset_scenario(p, rc, Association::HighestPower);
            const double pb = blockage_probability(pl.channel.link, pl.tiers[0].density);
            double prev_pl = 2.0, prev_pw = 2.0;
            for (double t : T) {
                const double a = pcov_smallest_pathloss(pl, t);
                const double b = pcov_highest_power(pw, t, PowerMode::Exact);
                order_violation = std::max(order_violation, a - b);
                track_mono(a, prev_pl);  // non-increasing in T
                track_mono(b, prev_pw);
                prev_pl = a;
                prev_pw = b;
            }
            for (const Scenario* s : {&pl, &pw}) {
                const double lo = coverage(*s, 1e-9, PowerMode::Exact);
                const double hi = coverage(*s, 1e9, PowerMode::Exact);
                limit0 = std::max(limit0, std::abs(lo - (1.0 - pb)));
                limit_inf = std::max(limit_inf, hi);
            }
            // unbounded path loss near the origin: the tail only decays like a power of T
            tail_inf = std::max(tail_inf, coverage(pl, 1e15, PowerMode::Exact));
        }
        // monotone in density, power and serving gain at a few thresholds
        for (Association a : {Association::SmallestPathLoss, Association::HighestPower}) {
            for (double tdb : {-5.0, 10.0, 25.0}) {
                const double t = db_to_linear(tdb);
                double prev = -1.0;
                for (double rc : {300.0, 200.0, 150.0, 100.0, 50.0}) {
                    const double c = coverage(preset_scenario(p, rc, a), t, PowerMode::Exact);
                    track_mono(prev, c);
                    prev = c;
                }
                prev = -1.0;
                for (double dbm : {0.0, 10.0, 20.0, 30.0, 40.0}) {
                    Scenario s = preset_scenario(p, 120.0, a);
                    s.tiers[0].tx_power_dbm = dbm;
                    const double c = coverage(s, t, PowerMode::Exact);
                    track_mono(prev, c);
                    prev = c;
                }
                prev = -1.0;
                const Scenario base = preset_scenario(p, 120.0, a);
                for (double gdb : {0.0, 10.0, 20.0, 30.0, 40.0}) {
                    const double g = db_to_linear(gdb);
                    const double c = a == Association::SmallestPathLoss
                                         ? pcov_smallest_pathloss(base, t, ServingGain{g, 1.0})
                                         : pcov_highest_power(base, t, PowerMode::Exact, ServingGain{g, 1.0});
                    track_mono(prev, c);
                    prev = c;
                }
            }
        }
    }
    v.detail << " max(pathloss - power)=" << fmt(order_violation, 3) << "; |Pcov(T->0) - (1-Pb)|=" << fmt(limit0, 3)
             << "; max Pcov(T=1e9)=" << fmt(limit_inf, 3) << " (at T=1e15: " << fmt(tail_inf, 3)
             << "); worst monotonicity violation " << fmt(mono_violation, 3);
    v.require(order_violation <= 1e-9, "power association >= path-loss association");
    v.require(limit0 <= 1e-6, "T -> 0 limit");
    v.require(limit_inf <= 1e-6, "T -> inf limit");
    v.require(mono_violation <= 1e-9, "monotone in T, lambda, P, G");
    return v;
}

// 7 --------------------------------------------------------------------------
Verdict rates() {
    Verdict v;
    double gcq_err = 0.0, hs_err = 0.0;
    std::ostringstream hs_detail;
    for (Preset p : all_presets()) {
        for (double rc : kRadii) {
            for (Association a : {Association::SmallestPathLoss, Association::HighestPower}) {
                const Scenario s = preset_scenario(p, rc, a);
                const double ad = rate(s, RateMode::Adaptive, PowerMode::Exact).nats;
                const double gc = rate(s, RateMode::Gcq, PowerMode::Exact).nats;
                gcq_err = std::max(gcq_err, std::abs(gc / ad - 1.0));
                if (a == Association::SmallestPathLoss && p != Preset::UWave25) {
                    const ServingGain g = nominal_gain(s);
                    if (std::abs(linear_to_db(g.bs * g.mt) - 40.0) > 1e-9) v.require(false, "preset serving gain is 40 dB");
                    const double e = std::abs(rate(s, RateMode::HighSnr).nats / ad - 1.0);
                    hs_detail << " " << preset_name(p) << "@" << rc << "=" << fmt(100 * e, 3) << "%";
                    // gated at the stated configuration; other radii are informative
                    if (rc == 100.0) hs_err = std::max(hs_err, e);
                }
            }
        }
    }
    v.detail << " GCQ(64) vs adaptive max rel diff " << fmt(100 * gcq_err, 3) << "%; high-SNR vs adaptive at rc=100 max rel diff "
             << fmt(100 * hs_err, 3) << "% (" << hs_detail.str().substr(1) << ");";
    v.require(gcq_err <= 0.01, "GCQ within 1%");
    v.require(hs_err <= 0.05, "high-SNR within 5%");

    // Rate ratio against the uWave network. Simulated SINR rates are used for
    // the ratio: the uWave network is interference-limited, so its SNR-based
    // analytic rate overstates what it delivers.
    for (Preset p : {Preset::MmWave28, Preset::MmWave73}) {
        for (double rc : {50.0, 100.0}) {
            const Scenario mm = preset_scenario(p, rc), mu = preset_scenario(Preset::UWave25, rc);
            const double r_mm = run_mc(mm, {}).pathloss.rate_sinr_nats * mm.radio.bandwidth_hz;
            const double r_mu = run_mc(mu, {}).pathloss.rate_sinr_nats * mu.radio.bandwidth_hz;
            const double analytic = rate(mm, RateMode::Adaptive).bps / rate(mu, RateMode::Adaptive).bps;
            v.detail << " " << preset_name(p) << " rc=" << rc << " ratio " << fmt(r_mm / r_mu, 4) << " (SNR-only analytic "
                     << fmt(analytic, 4) << ");";
            v.require(r_mm / r_mu > 50.0, "ratio > 50 at rc <= 100");
        }
    }
    return v;
}

// 8 --------------------------------------------------------------------------
Verdict beam_errors() {
    Verdict v;
    double zero_err = 0.0, mc_err = 0.0;
    bool sums_exact = true;
    for (double sdeg = 0.0; sdeg <= 60.0; sdeg += 0.25) {
        for (Preset p : all_presets()) {
            const double s = deg_to_rad(sdeg);
            const auto m = beam_error_mixture(preset_bs_pattern(p), preset_mt_pattern(p), {s, 0.5 * s});
            sums_exact = sums_exact && (m.weights[0] + m.weights[1] + m.weights[2] + m.weights[3] == 1.0);
        }
    }
    const std::vector<double> T = db_grid(-10.0, 30.0, 1.0);
    for (Preset p : {Preset::MmWave28, Preset::MmWave73}) {
        for (Association a : {Association::SmallestPathLoss, Association::HighestPower}) {
            Scenario s = preset_scenario(p, 150.0, a);
            for (double t : {db_to_linear(-5.0), db_to_linear(15.0)}) {
                const double clean = coverage(s, t, PowerMode::Exact);
                for (double sd : {0.0, 1e-9, 1e-4}) {
                    Scenario e = s;
                    e.beam_error = BeamErrorStd{deg_to_rad(sd), deg_to_rad(sd)};
                    zero_err = std::max(zero_err, std::abs(coverage(e, t, PowerMode::Exact) - clean));
                }
            }
        }
        Scenario s = preset_scenario(p, 150.0, Association::HighestPower);
        s.beam_error = BeamErrorStd{deg_to_rad(6.0), deg_to_rad(6.0)};
        const SimStats st = run_mc(s, T, 100000, 11);
        for (std::size_t i = 0; i < T.size(); ++i)
            mc_err = std::max(mc_err, std::abs(coverage(s, T[i], PowerMode::Exact) - st.power.snr_coverage[i].mean));
    }
    v.detail << " sigma->0 max|diff|=" << fmt(zero_err, 3) << "; weights sum exactly 1: " << (sums_exact ? "yes" : "no")
             << "; sigma_BE=6deg MC max|diff|=" << fmt(mc_err, 3);
    v.require(zero_err <= 1e-12, "sigma -> 0 recovers the error-free curve");
    v.require(sums_exact, "weights sum to 1");
    v.require(mc_err <= 0.01, "MC within 0.01 at 6 deg");
    return v;
}

// 9 --------------------------------------------------------------------------
Verdict multi_tier() {
    Verdict v;
    double degenerate = 0.0, mc_err = 0.0;
    const std::vector<double> T = db_grid(-10.0, 30.0, 1.0);
    for (Preset p : {Preset::MmWave28, Preset::MmWave73}) {
        const Scenario one = preset_scenario(p, 150.0, Association::HighestPower);
        Scenario padded = one;
        for (int k = 0; k < 2; ++k) {
            TierConfig t = one.tiers[0];
            t.density = 0.0;
            padded.tiers.push_back(t);
        }
        for (double t : T)
            for (PowerMode m : {PowerMode::Exact, PowerMode::TwoBall}) {
                const double ref = pcov_highest_power(one, t, m);
                degenerate = std::max({degenerate, std::abs(pcov_multitier(one, t, m) - ref),
                                       std::abs(pcov_multitier(padded, t, m) - ref)});
            }
        const Scenario three = multitier_scenario(p);
        const SimStats st = run_mc(three, T, 100000, 5);
        double pe = 0.0;
        for (std::size_t i = 0; i < T.size(); ++i)
            pe = std::max(pe, std::abs(pcov_multitier(three, T[i], PowerMode::Exact) - st.power.snr_coverage[i].mean));
        mc_err = std::max(mc_err, pe);
        v.detail << " " << preset_name(p) << " three-tier MC max|diff|=" << fmt(pe, 3) << ";";
    }
    v.detail << " single-tier degeneracy max|diff|=" << degenerate;
    v.require(degenerate == 0.0, "single-tier degeneracy exact");
    v.require(mc_err <= 0.015, "three-tier MC within 0.015");
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> expect_fail;
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--only") && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else if (!std::strcmp(argv[i], "--expect-fail") && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            for (std::string tok; std::getline(ss, tok, ',');) expect_fail.insert(std::stoi(tok));
        } else {
            std::fprintf(stderr, "usage: %s [--only N] [--expect-fail N[,M...]]\n", argv[0]);
            return 2;
        }
    }

    McCache mc;
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
        {"two-ball fit reproduces the reference table", two_ball_table},
        {"intensity measures match the radial-integral oracle", intensity_oracle},
        {"blockage probability consistency", blockage},
        {"analytic vs Monte Carlo coverage, all presets", [&] { return mc_coverage(mc); }},
        {"noise-limited approximation at rc=150 m", [&] { return noise_limited(mc); }},
        {"association ordering, limits and monotonicity", ordering_limits},
        {"rate quadratures, high-SNR form and uWave ratio", rates},
        {"beam-error mixture", beam_errors},
        {"multi-tier degeneracy and three-tier Monte Carlo", multi_tier},
    };

    int unexpected = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const int id = static_cast<int>(k + 1);
        if (only && id != only) continue;
        const auto t0 = Clock::now();
        Verdict v;
        try {
            v = criteria[k].second();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail << " exception: " << e.what();
        }
        const bool expected = expect_fail.count(id) > 0;
        std::printf("%s criterion %d: %s |%s (%.1f s)%s\n", v.pass ? "PASS" : "FAIL", id, criteria[k].first,
                    v.detail.str().c_str(), seconds_since(t0), expected ? (v.pass ? " [expected FAIL]" : " [expected]") : "");
        std::fflush(stdout);
        if (v.pass == expected) ++unexpected;
    }
    return unexpected == 0 ? 0 : 1;
}
