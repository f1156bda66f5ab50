#include "mmcov/commands.hpp"

#include "mmcov/mcsim.hpp"
#include "mmcov/scenario_io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mmcov::cli {

namespace {

using json = nlohmann::json;

PowerMode parse_power_mode(const std::string& s) {
    if (s == "exact") return PowerMode::Exact;
    if (s == "twoball") return PowerMode::TwoBall;
    throw std::invalid_argument("--mode must be exact or twoball for coverage, got \"" + s + "\"");
}

RateMode parse_rate_mode(const std::string& s) {
    if (s == "gcq") return RateMode::Gcq;
    if (s == "adaptive") return RateMode::Adaptive;
    if (s == "highsnr") return RateMode::HighSnr;
    throw std::invalid_argument("--mode must be gcq, adaptive or highsnr for rate, got \"" + s + "\"");
}

struct Setup {
    ScenarioFile file;
    std::vector<double> radii;  // tier-0 cell radii to sweep
    std::vector<double> t_db;
    SimSettings sim;
};

Setup prepare(const CommonOptions& o) {
    if (o.format != "csv" && o.format != "json")
        throw std::invalid_argument("--format must be csv or json, got \"" + o.format + "\"");
    Setup s;
    s.file = resolve_scenario(o.scenario);
    Scenario& scn = s.file.scenario;
    if (!o.association.empty()) {
        if (o.association == "pathloss") scn.association = Association::SmallestPathLoss;
        else if (o.association == "power") scn.association = Association::HighestPower;
        else throw std::invalid_argument("--association must be pathloss or power, got \"" + o.association + "\"");
    }
    if (o.sigma_be_deg) {
        if (!(*o.sigma_be_deg >= 0.0)) throw std::invalid_argument("--sigma-be must be >= 0");
        const double r = deg_to_rad(*o.sigma_be_deg);
        scn.beam_error = BeamErrorStd{r, r};
    }
    s.radii = !o.rc.empty() ? o.rc : s.file.cell_radii;
    if (s.radii.empty()) s.radii = {scn.tiers.front().cell_radius()};
    for (double r : s.radii)
        if (!(r > 0.0)) throw std::invalid_argument("--rc values must be > 0");
    s.t_db = (o.t_grid.empty() ? s.file.t_grid : parse_t_grid(o.t_grid)).db_values();
    s.sim = s.file.simulation;
    if (o.realizations) {
        if (*o.realizations == 0) throw std::invalid_argument("--realizations must be >= 1");
        s.sim.realizations = *o.realizations;
    }
    if (o.seed) s.sim.seed = *o.seed;
    return s;
}

Scenario with_radius(Scenario scn, double rc) {
    scn.tiers.front().density = density_from_cell_radius(rc);
    return scn;
}

SimConfig sim_config(const Scenario& scn, const SimSettings& sim, const std::vector<double>& thresholds) {
    SimConfig c;
    c.scenario = scn;
    c.realizations = sim.realizations;
    c.seed = sim.seed;
    c.window_radius = sim.window_radius;
    c.interference = sim.interference;
    c.thresholds = thresholds;
    return c;
}

std::vector<double> to_linear(const std::vector<double>& db) {
    std::vector<double> v;
    for (double d : db) v.push_back(db_to_linear(d));
    return v;
}

std::string scenario_label(const ScenarioFile& f) { return f.preset ? preset_name(*f.preset) : "custom"; }

void write_csv_row(std::ostream& out, const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << format_number(v[i]);
    out << '\n';
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v == 0.0 ? 0.0 : v);
    return buf;
}

int run(const std::function<int()>& fn, std::ostream& err) {
    try {
        return fn();
    } catch (const SchemaError& e) {
        err << "error: schema violation at " << e.what() << '\n';
        return kSchema;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kSchema;
    } catch (const NumericalError& e) {
        err << "error: numerical failure: " << e.what() << " (best estimate " << e.best_estimate() << ", error "
            << e.error_estimate() << ")\n";
        return kNumeric;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kNumeric;
    }
}

int cmd_coverage(const CoverageOptions& o, std::ostream& out, std::ostream& err) {
    Setup s = prepare(o.common);
    const PowerMode mode = parse_power_mode(o.mode);
    Scenario& base = s.file.scenario;
    if (mode == PowerMode::TwoBall && base.association == Association::HighestPower && !base.two_ball) {
        err << "note: no two-ball parameters in scenario; fitting them first\n";
        ensure_two_ball(base);
    }
    const std::vector<double> T = to_linear(s.t_db);

    json doc;
    if (o.common.format == "json") {
        doc["scenario"] = scenario_label(s.file);
        doc["association"] = to_string(base.association);
        doc["mode"] = to_string(mode);
        doc["t_db"] = s.t_db;
        doc["curves"] = json::array();
    } else {
        out << "rc_m,t_db,pcov";
        if (o.common.with_mc) out << ",mc_snr,mc_snr_ci95,mc_sinr,mc_sinr_ci95";
        out << '\n';
    }
    for (double rc : s.radii) {
        const Scenario scn = with_radius(base, rc);
        const CoverageCurve curve = coverage_curve(scn, T, mode);
        curve.validate();
        SimStats st;
        if (o.common.with_mc) st = simulate(sim_config(scn, s.sim, T));
        const AssociationStats* as = o.common.with_mc ? &st.for_association(scn.association) : nullptr;
        if (o.common.format == "json") {
            json c;
            c["rc_m"] = rc;
            c["pcov"] = curve.values;
            if (as) {
                json mc;
                mc["realizations"] = st.realizations;
                mc["seed"] = s.sim.seed;
                mc["window_radius_m"] = st.window_radius;
                mc["blockage"] = st.blockage.mean;
                for (std::size_t i = 0; i < T.size(); ++i) {
                    mc["snr"].push_back(as->snr_coverage[i].mean);
                    mc["snr_ci95"].push_back(as->snr_coverage[i].half_width);
                    mc["sinr"].push_back(as->sinr_coverage[i].mean);
                    mc["sinr_ci95"].push_back(as->sinr_coverage[i].half_width);
                }
                c["mc"] = mc;
            }
            doc["curves"].push_back(c);
        } else {
            for (std::size_t i = 0; i < T.size(); ++i) {
                std::vector<double> row{rc, s.t_db[i], curve.values[i]};
                if (as)
                    row.insert(row.end(), {as->snr_coverage[i].mean, as->snr_coverage[i].half_width,
                                           as->sinr_coverage[i].mean, as->sinr_coverage[i].half_width});
                write_csv_row(out, row);
            }
        }
    }
    if (o.common.format == "json") out << doc.dump(2) << '\n';
    return kOk;
}

int cmd_rate(const RateOptions& o, std::ostream& out, std::ostream& err) {
    Setup s = prepare(o.common);
    const RateMode mode = parse_rate_mode(o.mode);
    PowerMode pmode = parse_power_mode(o.pcov_mode);
    Scenario& base = s.file.scenario;
    if (pmode == PowerMode::TwoBall && base.association == Association::HighestPower) ensure_two_ball(base);

    std::optional<Preset> baseline = s.file.baseline;
    if (o.baseline == "none") baseline.reset();
    else if (!o.baseline.empty()) {
        baseline = preset_from_name(o.baseline);
        if (!baseline) throw std::invalid_argument("--baseline: unknown preset \"" + o.baseline + "\"");
    } else if (!baseline) baseline = Preset::UWave25;
    const bool has_baseline = baseline.has_value();
    const Preset bpreset = baseline.value_or(Preset::UWave25);

    const double scale_main = o.normalize_bw ? 1.0 / base.radio.bandwidth_hz : 1.0;
    json doc;
    if (o.common.format == "json") {
        doc["scenario"] = scenario_label(s.file);
        doc["association"] = to_string(base.association);
        doc["mode"] = to_string(mode);
        doc["unit"] = o.normalize_bw ? "bit/s/Hz" : "bit/s";
        if (has_baseline) doc["baseline"] = preset_name(bpreset);
        doc["rows"] = json::array();
    } else {
        out << "rc_m,rate";
        if (has_baseline) out << ",baseline_rate,ratio";
        if (o.common.with_mc) out << ",mc_rate_snr,mc_rate_sinr";
        if (o.common.with_mc && has_baseline) out << ",mc_baseline_rate_sinr,mc_ratio_sinr";
        out << '\n';
    }
    std::vector<std::string> seen_warnings;
    for (double rc : s.radii) {
        const Scenario scn = with_radius(base, rc);
        const RateResult r = rate(scn, mode, pmode);
        for (const auto& w : r.warnings) {
            bool dup = false;
            for (const auto& x : seen_warnings) dup = dup || x == w;
            if (!dup) {
                err << "warning: " << w << '\n';
                seen_warnings.push_back(w);
            }
        }
        double b_bps = std::nan(""), ratio = std::nan("");
        double b_scale = 1.0;
        std::optional<Scenario> bscn;
        if (has_baseline) {
            bscn = preset_scenario(bpreset, rc, scn.association);
            bscn->beam_error = scn.beam_error;
            b_scale = o.normalize_bw ? 1.0 / bscn->radio.bandwidth_hz : 1.0;
            b_bps = rate(*bscn, mode, pmode).bps;
            ratio = b_bps > 0.0 ? r.bps / b_bps : std::nan("");
        }
        // Simulated rates in bit/s: SNR and SINR for the scenario, SINR for the baseline.
        double mc_snr = 0.0, mc_sinr = 0.0, mc_b_sinr = std::nan("");
        if (o.common.with_mc) {
            const auto& as = simulate(sim_config(scn, s.sim, {})).for_association(scn.association);
            const double k = scn.radio.bandwidth_hz / std::log(2.0);
            mc_snr = as.rate_snr_nats * k;
            mc_sinr = as.rate_sinr_nats * k;
            if (bscn)
                mc_b_sinr = simulate(sim_config(*bscn, s.sim, {})).for_association(scn.association).rate_sinr_nats *
                            bscn->radio.bandwidth_hz / std::log(2.0);
        }
        const double mc_ratio = mc_b_sinr > 0.0 ? mc_sinr / mc_b_sinr : std::nan("");
        if (o.common.format == "json") {
            json row;
            row["rc_m"] = rc;
            row["rate"] = r.bps * scale_main;
            if (has_baseline) {
                row["baseline_rate"] = b_bps * b_scale;
                row["ratio"] = std::isnan(ratio) ? json(nullptr) : json(ratio);
            }
            if (o.common.with_mc) {
                row["mc_rate_snr"] = mc_snr * scale_main;
                row["mc_rate_sinr"] = mc_sinr * scale_main;
                if (has_baseline) {
                    row["mc_baseline_rate_sinr"] = mc_b_sinr * b_scale;
                    row["mc_ratio_sinr"] = std::isnan(mc_ratio) ? json(nullptr) : json(mc_ratio);
                }
            }
            doc["rows"].push_back(row);
        } else {
            std::vector<double> row{rc, r.bps * scale_main};
            if (has_baseline) row.insert(row.end(), {b_bps * b_scale, ratio});
            if (o.common.with_mc) row.insert(row.end(), {mc_snr * scale_main, mc_sinr * scale_main});
            if (o.common.with_mc && has_baseline) row.insert(row.end(), {mc_b_sinr * b_scale, mc_ratio});
            write_csv_row(out, row);
        }
    }
    if (o.common.format == "json") {
        if (!seen_warnings.empty()) doc["warnings"] = seen_warnings;
        out << doc.dump(2) << '\n';
    }
    return kOk;
}

namespace {

json params_json(const TwoBallParams& tb) {
    json j;
    j["d1_m"] = tb.d1;
    j["d2_m"] = tb.d2;
    j["q_los"] = tb.q[0];
    j["q_nlos"] = tb.q[1];
    j["q_out"] = tb.q[kOutState];
    return j;
}

FitGrid parse_fit_grid(const std::string& text) {
    FitGrid g;
    if (text.empty()) return g;
    std::istringstream is(text);
    char c1 = 0, c2 = 0;
    if (!(is >> g.lo_db >> c1 >> g.hi_db >> c2 >> g.points) || c1 != ':' || c2 != ':' || !is.eof())
        throw std::invalid_argument("--grid must look like lo_db:hi_db:points, got \"" + text + "\"");
    g.values();  // validates
    return g;
}

}  // namespace

int cmd_fit_twoball(const FitCommandOptions& o, std::ostream& out, std::ostream& err) {
    if (o.starts < 1) throw std::invalid_argument("--starts must be >= 1");
    ScenarioFile f = resolve_scenario(o.scenario);
    const Scenario& scn = f.scenario;
    FitOptions fo;
    fo.grid = parse_fit_grid(o.grid);
    fo.starts = o.starts;
    fo.seed = o.seed;
    constexpr double kLambda = 1e-4;  // cancels in the log residual

    FitReport rep;
    IntensityFn target;
    std::optional<TwoBallParams> truth;
    if (o.synthetic) {
        if (!scn.two_ball) throw std::invalid_argument("--synthetic needs two-ball parameters in the scenario");
        truth = *scn.two_ball;
        target = [&](double x) {
            double v = 0.0;
            for (LinkState s : kLinkStates) v += approx_intensity(x, s, *truth, kLambda, scn.channel.path_loss[s]);
            return v;
        };
    } else {
        const PathLossIntensity pi(scn.channel, kLambda);
        target = [pi](double x) { return pi.lambda_total(x); };
    }
    rep = fit_two_ball(target, scn.channel.path_loss, kLambda, fo);
    for (const auto& w : rep.warnings) err << "warning: " << w << '\n';

    json doc;
    doc["scenario"] = scenario_label(f);
    doc["target"] = o.synthetic ? "two-ball" : "exact";
    doc["grid"] = {{"lo_db", fo.grid.lo_db}, {"hi_db", fo.grid.hi_db}, {"points", fo.grid.points}};
    doc["starts"] = fo.starts;
    doc["seed"] = fo.seed;
    doc["best_start"] = rep.best_start;
    doc["params"] = params_json(rep.params);
    doc["phase1_norm"] = rep.phase1_norm;
    doc["phase2_norm"] = rep.phase2_norm;
    doc["max_abs_log_residual"] = rep.max_abs_log_residual;
    doc["excluded_points"] = rep.excluded_points;
    doc["far_band_zero"] = rep.far_band_zero;
    doc["warnings"] = rep.warnings;

    auto compare = [&](const TwoBallParams& ref, const char* key) {
        json c;
        c["params"] = params_json(ref);
        c["max_abs_log_residual"] = max_abs_log_residual(target, scn.channel.path_loss, kLambda, ref, fo.grid);
        c["d1_rel_error"] = ref.d1 > 0.0 ? std::abs(rep.params.d1 - ref.d1) / ref.d1 : std::abs(rep.params.d1);
        c["d2_rel_error"] = ref.d2 > 0.0 ? std::abs(rep.params.d2 - ref.d2) / ref.d2 : std::abs(rep.params.d2);
        double dq = 0.0;
        for (int st = 0; st < 2; ++st)
            for (int b = 0; b < 3; ++b) dq = std::max(dq, std::abs(rep.params.q[st][b] - ref.q[st][b]));
        c["max_abs_q_error"] = dq;
        doc[key] = c;
    };
    if (truth) compare(*truth, "recovery");
    else if (f.preset && *f.preset != Preset::UWave25)
        compare(preset_two_ball(*f.preset), "published");

    if (!o.residuals.empty()) {
        std::ofstream rf(o.residuals, std::ios::binary);
        if (!rf) throw std::runtime_error("cannot write residuals to \"" + o.residuals + "\"");
        rf << "pathloss_db,log_residual\n";
        for (std::size_t i = 0; i < rep.grid.size(); ++i)
            rf << format_number(linear_to_db(rep.grid[i])) << ',' << format_number(rep.log_residual[i]) << '\n';
    }
    out << doc.dump(2) << '\n';
    return kOk;
}

int cmd_validate(const ValidateOptions& o, std::ostream& out, std::ostream& err) {
    std::vector<Preset> presets;
    if (o.presets.empty()) presets = all_presets();
    for (const auto& name : o.presets) {
        auto p = preset_from_name(name);
        if (!p) throw std::invalid_argument("--preset: unknown preset \"" + name + "\"");
        presets.push_back(*p);
    }
    const std::vector<double> radii = o.rc.empty() ? std::vector<double>{50, 100, 150, 200} : o.rc;
    ThresholdGrid g{-10.0, 30.0, 1.0};
    const std::vector<double> t_db = g.db_values();
    const std::vector<double> T = to_linear(t_db);
    int failures = 0;
    auto report = [&](bool ok, const std::string& name, const std::string& detail) {
        out << (ok ? "PASS " : "FAIL ") << name << "  " << detail << '\n';
        failures += !ok;
    };

    for (Preset p : presets) {
        for (double rc : radii) {
            const Scenario scn = preset_scenario(p, rc);
            SimConfig cfg;
            cfg.scenario = scn;
            cfg.realizations = o.realizations;
            cfg.seed = o.seed;
            cfg.thresholds = T;
            const SimStats st = simulate(cfg);
            const std::string tag = std::string(preset_name(p)) + " rc=" + format_number(rc);

            double d_pl = 0.0, d_pw = 0.0;
            for (std::size_t i = 0; i < T.size(); ++i) {
                d_pl = std::max(d_pl, std::abs(pcov_smallest_pathloss(scn, T[i]) - st.pathloss.snr_coverage[i].mean));
                d_pw = std::max(d_pw, std::abs(pcov_highest_power(scn, T[i], PowerMode::Exact) -
                                               st.power.snr_coverage[i].mean));
            }
            report(d_pl <= 0.01, tag + " pathloss coverage vs MC", "max|diff|=" + format_number(d_pl));
            report(d_pw <= 0.01, tag + " power coverage vs MC", "max|diff|=" + format_number(d_pw));

            const double pb = blockage_probability(scn.channel.link, scn.tiers.front().density);
            const double n = static_cast<double>(st.realizations);
            const double sd = std::sqrt(std::max(pb * (1.0 - pb), 1e-300) / n);
            const double z = std::abs(st.blockage.mean - pb) / sd;
            report(z <= 3.0 || std::abs(st.blockage.mean - pb) < 1e-12, tag + " blockage frequency",
                   "mc=" + format_number(st.blockage.mean) + " analytic=" + format_number(pb));
            report(st.sinr_above_snr == 0, tag + " SINR <= SNR", "violations=" + std::to_string(st.sinr_above_snr));

            if (p != Preset::UWave25 && rc >= 150.0) {
                double gap = 0.0;
                for (const auto& x : st.pathloss.gap) gap = std::max(gap, x.mean);
                for (const auto& x : st.power.gap) gap = std::max(gap, x.mean);
                report(gap <= 0.05, tag + " noise-limited gap", "max gap=" + format_number(gap));
            }
        }
    }
    out << (failures == 0 ? "all checks passed" : std::to_string(failures) + " check(s) failed") << '\n';
    if (failures) err << "validate: " << failures << " failure(s)\n";
    return failures == 0 ? kOk : kNumeric;
}

}  // namespace mmcov::cli
