// mmcov: coverage and rate analysis for mmWave cellular networks.
#include "mmcov/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace mmcov::cli;

void add_common(CLI::App* app, CommonOptions& c) {
    app->add_option("scenario", c.scenario, "Scenario JSON file or preset name")->required();
    app->add_option("--rc", c.rc, "Cell radii in m (sweep of the first tier)")->delimiter(',');
    app->add_option("--t-grid", c.t_grid, "SNR threshold grid start:stop:step in dB");
    app->add_option("--association", c.association, "pathloss or power");
    app->add_option("--format", c.format, "csv or json");
    app->add_flag("--with-mc", c.with_mc, "Add Monte Carlo columns");
    app->add_option("--realizations", c.realizations, "Monte Carlo realizations");
    app->add_option("--seed", c.seed, "Monte Carlo seed");
    app->add_option("--sigma-be", c.sigma_be_deg, "Beam-error standard deviation in degrees (BS and MT)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mmWave cellular coverage and rate analysis"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    CoverageOptions cov;
    auto* c = app.add_subcommand("coverage", "Coverage probability versus SNR threshold");
    add_common(c, cov.common);
    c->add_option("--mode", cov.mode, "exact or twoball");

    RateOptions rate;
    auto* r = app.add_subcommand("rate", "Average achievable rate versus cell radius");
    add_common(r, rate.common);
    r->add_option("--mode", rate.mode, "gcq, adaptive or highsnr");
    r->add_option("--pcov-mode", rate.pcov_mode, "Coverage evaluation for power association: exact or twoball");
    r->add_flag("--normalize-bw", rate.normalize_bw, "Report R/BW in bit/s/Hz");
    r->add_option("--baseline", rate.baseline, "Baseline preset for the ratio column, or none");

    FitCommandOptions fit;
    auto* f = app.add_subcommand("fit-twoball", "Fit two-ball link-state parameters");
    f->add_option("scenario", fit.scenario, "Scenario JSON file or preset name")->required();
    f->add_option("--starts", fit.starts, "Random starts");
    f->add_option("--seed", fit.seed, "Seed for the random starts");
    f->add_option("--grid", fit.grid, "Path-loss grid lo_db:hi_db:points");
    f->add_option("--residuals", fit.residuals, "Write the log residual curve to this CSV");
    f->add_flag("--synthetic", fit.synthetic, "Fit the scenario's own two-ball intensity");

    ValidateOptions val;
    auto* v = app.add_subcommand("validate", "Analytic versus Monte Carlo checks");
    v->add_option("--preset", val.presets, "Presets to check (default all)");
    v->add_option("--rc", val.rc, "Cell radii in m")->delimiter(',');
    v->add_option("--realizations", val.realizations, "Monte Carlo realizations");
    v->add_option("--seed", val.seed, "Monte Carlo seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kSchema;
    }

    std::ios::sync_with_stdio(false);
    if (c->parsed()) return run([&] { return cmd_coverage(cov, std::cout, std::cerr); }, std::cerr);
    if (r->parsed()) return run([&] { return cmd_rate(rate, std::cout, std::cerr); }, std::cerr);
    if (f->parsed()) return run([&] { return cmd_fit_twoball(fit, std::cout, std::cerr); }, std::cerr);
    return run([&] { return cmd_validate(val, std::cout, std::cerr); }, std::cerr);
}
