#include "mmcov/intensity.hpp"
#include "mmcov/presets.hpp"
#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace mmcov;
using Catch::Approx;

namespace {

oracle::Link as_oracle(const LinkStateParams& p) { return {p.delta_los, p.gamma_los, p.delta_out, p.gamma_out}; }

double rho(const StatePathLoss& s, double x) { return std::pow(x, 1.0 / s.beta) / s.kappa; }

}  // namespace

TEST_CASE("intensity matches the radial integral on the presets", "[intensity]") {
    for (Preset p : all_presets()) {
        const ChannelModel ch = preset_channel(p);
        const double lambda = density_from_cell_radius(120.0);
        const PathLossIntensity pi(ch, lambda);
        const auto o = as_oracle(ch.link);
        for (double xdb = 60.0; xdb <= 200.0; xdb += 7.0) {
            const double x = db_to_linear(xdb);
            const double rl = rho(ch.path_loss[LinkState::LOS], x), rn = rho(ch.path_loss[LinkState::NLOS], x);
            const double los = oracle::radial_integral([&](double r) { return o.p_los(r); }, lambda, rl, o.kink());
            const double nlos = oracle::radial_integral([&](double r) { return o.p_nlos(r); }, lambda, rn, o.kink());
            CHECK(pi.lambda_los(x) == Approx(los).epsilon(1e-9).margin(1e-300));
            CHECK(pi.lambda_nlos(x) == Approx(nlos).epsilon(1e-9).margin(1e-300));
            const double all = oracle::radial_integral([&](double r) { return 1.0 - o.p_out(r); }, lambda, rn, o.kink());
            CHECK(pi.upsilon1(x, LinkState::NLOS) == Approx(all).epsilon(1e-9));
            CHECK(pi.upsilon0(x, LinkState::NLOS) + pi.lambda_nlos(x) == Approx(all).epsilon(1e-12));
        }
    }
}

TEST_CASE("intensity on random parameters", "[intensity]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 150; ++i) {
        ChannelModel ch;
        ch.link = {U(rng) < 0.1 ? 0.0 : 1.0 / (10.0 + 190.0 * U(rng)), 0.3 + 0.7 * U(rng),
                   U(rng) < 0.1 ? 0.0 : 1.0 / (10.0 + 90.0 * U(rng)), 0.5 + 200.0 * U(rng)};
        for (LinkState s : kLinkStates)
            ch.path_loss[s] = {std::pow(10.0, 3.0 * U(rng)), 1.8 + 2.5 * U(rng), 0.0, 1.0 + 9.0 * U(rng)};
        const double lambda = std::pow(10.0, -6.0 + 3.0 * U(rng));
        const PathLossIntensity pi(ch, lambda);
        const auto o = as_oracle(ch.link);
        const double r = std::pow(10.0, 3.3 * U(rng));  // 1 m .. 2 km
        const LinkState s = U(rng) < 0.5 ? LinkState::LOS : LinkState::NLOS;
        const auto& law = ch.path_loss[s];
        const double x = std::pow(law.kappa * r, law.beta);
        const double ref = oracle::radial_integral(
            [&](double u) { return s == LinkState::LOS ? o.p_los(u) : o.p_nlos(u); }, lambda, r, o.kink());
        INFO("draw " << i);
        CHECK(pi.lambda_state(x, s) == Approx(ref).epsilon(1e-8).margin(1e-280));
    }
}

TEST_CASE("intensity derivative matches finite differences", "[intensity]") {
    const ChannelModel ch = preset_channel(Preset::MmWave28);
    const PathLossIntensity pi(ch, density_from_cell_radius(80.0));
    for (LinkState s : kLinkStates) {
        for (double xdb : {70.0, 95.0, 110.0, 130.0, 170.0}) {
            const double x = db_to_linear(xdb);
            if (std::abs(x / pi.breakpoint(s) - 1.0) < 1e-3) continue;
            const double fd = oracle::five_point([&](double v) { return pi.lambda_state(v, s); }, x, 1e-4 * x);
            CHECK(pi.lambda_deriv(x, s) == Approx(fd).epsilon(1e-6).margin(1e-9 * pi.lambda_total(x) / x));
        }
    }
}

TEST_CASE("path-loss distribution and blockage", "[intensity]") {
    const ChannelModel ch = preset_channel(Preset::MmWave73);
    for (double rc : {50.0, 150.0, 300.0}) {
        const double lambda = density_from_cell_radius(rc);
        const PathLossIntensity pi(ch, lambda);
        const auto o = as_oracle(ch.link);
        const double all = oracle::radial_integral([&](double r) { return 1.0 - o.p_out(r); }, lambda, 8000.0, o.kink());
        CHECK(pi.blockage_intensity() == Approx(all).epsilon(1e-9));
        CHECK(blockage_probability(ch.link, lambda) == Approx(std::exp(-all)).epsilon(1e-9));
        CHECK(pi.pathloss_cdf(1e300) == Approx(1.0 - std::exp(-all)).epsilon(1e-12));
    }
    const PathLossIntensity none(preset_channel(Preset::UWave25), 1e-4);
    CHECK(std::isinf(none.blockage_intensity()));
    CHECK(blockage_probability(preset_channel(Preset::UWave25).link, 1e-4) == 0.0);
}

TEST_CASE("log-normal partial moments", "[intensity]") {
    const LogNormalMoments m{0.3, 1.1};
    auto pdf = [&](double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * oracle::kPi); };
    for (double nu : {0.5, 2.0 / 2.92, 1.0}) {
        for (double y : {0.2, 1.0, 7.0}) {
            const double zy = (std::log(y) - m.mu) / m.sigma;
            const double below = oracle::simpson([&](double z) { return std::exp(nu * (m.mu + m.sigma * z)) * pdf(z); },
                                                 -40.0, zy, 1e-15);
            const double above = oracle::simpson([&](double z) { return std::exp(nu * (m.mu + m.sigma * z)) * pdf(z); },
                                                 zy, 40.0, 1e-15);
            const auto pm = lognormal_partial_moments(m, nu, y);
            CHECK(pm.m == Approx(below).epsilon(1e-10));
            CHECK(pm.mbar == Approx(above).epsilon(1e-10));
            CHECK(pm.f == Approx(oracle::normal_cdf(zy)).epsilon(1e-12));
            CHECK(pm.f + pm.fbar == Approx(1.0).epsilon(1e-15));
        }
    }
}

TEST_CASE("log-normal expectation with and without kinks", "[intensity]") {
    const LogNormalMoments m{-0.4, 0.9};
    CHECK(expect_lognormal([](double a) { return a; }, m) == Approx(std::exp(m.mu + 0.5 * m.sigma * m.sigma)).epsilon(1e-12));
    // E[min(A, c)] = E[A; A < c] + c P(A >= c)
    const double c = 0.8;
    const double zc = (std::log(c) - m.mu) / m.sigma;
    const double expect = std::exp(m.mu + 0.5 * m.sigma * m.sigma) * oracle::normal_cdf(zc - m.sigma) +
                          c * (1.0 - oracle::normal_cdf(zc));
    CHECK(expect_lognormal([c](double a) { return std::min(a, c); }, m, {c}) == Approx(expect).epsilon(1e-10));
}

TEST_CASE("expected intensity equals a direct shadowing average", "[intensity]") {
    const ChannelModel ch = preset_channel(Preset::MmWave28);
    const PathLossIntensity pi(ch, density_from_cell_radius(100.0));
    for (double xdb : {90.0, 120.0, 150.0}) {
        const double x = db_to_linear(xdb);
        for (LinkState s : kLinkStates) {
            const auto mom = moments_of(ch.path_loss[s]);
            const double ref = oracle::simpson(
                [&](double z) {
                    return pi.lambda_state(std::exp(mom.mu + mom.sigma * z) * x, s) * std::exp(-0.5 * z * z) /
                           std::sqrt(2.0 * oracle::kPi);
                },
                -14.0, 14.0, 1e-12);
            CHECK(expected_intensity_numeric(pi, x, s) == Approx(ref).epsilon(1e-8));
        }
    }
}
