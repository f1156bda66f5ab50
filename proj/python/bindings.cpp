#include "mmcov/analysis.hpp"
#include "mmcov/intensity.hpp"
#include "mmcov/mcsim.hpp"
#include "mmcov/presets.hpp"
#include "mmcov/scenario_io.hpp"
#include "mmcov/twoball.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <stdexcept>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace mmcov;

namespace {

Preset preset_arg(const std::string& name) {
    if (auto p = preset_from_name(name)) return *p;
    throw std::invalid_argument("unknown preset: " + name);
}

Association association_arg(const std::string& name) {
    if (name == "pathloss") return Association::SmallestPathLoss;
    if (name == "power") return Association::HighestPower;
    throw std::invalid_argument("association must be 'pathloss' or 'power'");
}

PowerMode power_mode_arg(const std::string& name) {
    if (name == "exact") return PowerMode::Exact;
    if (name == "twoball") return PowerMode::TwoBall;
    throw std::invalid_argument("power mode must be 'exact' or 'twoball'");
}

RateMode rate_mode_arg(const std::string& name) {
    if (name == "gcq") return RateMode::Gcq;
    if (name == "adaptive") return RateMode::Adaptive;
    if (name == "highsnr") return RateMode::HighSnr;
    throw std::invalid_argument("rate mode must be 'gcq', 'adaptive' or 'highsnr'");
}

py::dict two_ball_dict(const TwoBallParams& tb) {
    py::dict d;
    d["d1"] = tb.d1;
    d["d2"] = tb.d2;
    py::list q;
    for (const auto& row : tb.q) q.append(py::make_tuple(row[0], row[1], row[2]));
    d["q"] = q;
    return d;
}

py::list proportions(const std::vector<Proportion>& v) {
    py::list out;
    for (const auto& p : v) out.append(py::make_tuple(p.mean, p.half_width));
    return out;
}

py::dict association_dict(const AssociationStats& s) {
    py::dict d;
    d["snr_coverage"] = proportions(s.snr_coverage);
    d["sinr_coverage"] = proportions(s.sinr_coverage);
    d["rate_snr_nats"] = s.rate_snr_nats;
    d["rate_sinr_nats"] = s.rate_sinr_nats;
    return d;
}

}  // namespace

PYBIND11_MODULE(_mmcov, m) {
    m.doc() = "Coverage and rate of mmWave cellular networks under blockage and Log-Normal shadowing.";

    py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);

    py::class_<Scenario>(m, "Scenario")
        .def_property_readonly("association",
                               [](const Scenario& s) {
                                   return s.association == Association::SmallestPathLoss ? "pathloss" : "power";
                               })
        .def_property_readonly("tier_count", [](const Scenario& s) { return s.tiers.size(); })
        .def_property_readonly("cell_radius", [](const Scenario& s) { return s.tiers.at(0).cell_radius(); })
        .def_property_readonly("bandwidth_hz", [](const Scenario& s) { return s.radio.bandwidth_hz; })
        .def_property_readonly("noise_mw", &Scenario::noise_mw)
        .def_property_readonly("two_ball",
                               [](const Scenario& s) -> py::object {
                                   if (!s.two_ball) return py::none();
                                   return two_ball_dict(*s.two_ball);
                               })
        .def("with_beam_error",
             [](const Scenario& s, double bs_deg, double mt_deg) {
                 Scenario out = s;
                 out.beam_error = BeamErrorStd{deg_to_rad(bs_deg), deg_to_rad(mt_deg)};
                 out.validate();
                 return out;
             },
             py::arg("bs_deg"), py::arg("mt_deg"));

    m.def("preset_names", [] {
        std::vector<std::string> out;
        for (Preset p : all_presets()) out.emplace_back(preset_name(p));
        return out;
    });

    m.def("preset_scenario",
          [](const std::string& name, double rc, const std::string& assoc) {
              return preset_scenario(preset_arg(name), rc, association_arg(assoc));
          },
          py::arg("preset"), py::arg("cell_radius"), py::arg("association") = "pathloss");

    m.def("multitier_scenario", [](const std::string& name) { return multitier_scenario(preset_arg(name)); },
          py::arg("preset"));

    m.def("load_scenario", [](const std::string& path_or_preset) { return resolve_scenario(path_or_preset).scenario; },
          py::arg("path_or_preset"));

    m.def("parse_scenario", [](const std::string& text) { return parse_scenario(text).scenario; }, py::arg("json_text"));

    m.def("coverage",
          [](const Scenario& s, const std::vector<double>& t_db, const std::string& mode) {
              std::vector<double> T;
              T.reserve(t_db.size());
              for (double d : t_db) T.push_back(db_to_linear(d));
              const PowerMode pm = power_mode_arg(mode);
              py::gil_scoped_release nogil;
              return coverage_curve(s, T, pm).values;
          },
          py::arg("scenario"), py::arg("t_db"), py::arg("mode") = "exact");

    m.def("rate",
          [](const Scenario& s, const std::string& mode, const std::string& pcov_mode) {
              RateResult r;
              {
                  const RateMode rm = rate_mode_arg(mode);
                  const PowerMode pm = power_mode_arg(pcov_mode);
                  py::gil_scoped_release nogil;
                  r = rate(s, rm, pm);
              }
              py::dict d;
              d["nats_per_hz"] = r.nats;
              d["bps"] = r.bps;
              d["warnings"] = r.warnings;
              return d;
          },
          py::arg("scenario"), py::arg("mode") = "adaptive", py::arg("pcov_mode") = "exact");

    m.def("blockage_probability",
          [](const Scenario& s) { return blockage_probability(s.channel.link, s.tiers.at(0).density); },
          py::arg("scenario"));

    m.def("preset_two_ball", [](const std::string& name) { return two_ball_dict(preset_two_ball(preset_arg(name))); },
          py::arg("preset"));

    m.def("fit_two_ball",
          [](const std::string& name, int starts, std::uint64_t seed) {
              FitOptions opts;
              opts.starts = starts;
              opts.seed = seed;
              FitReport rep;
              {
                  py::gil_scoped_release nogil;
                  rep = fit_two_ball(preset_channel(preset_arg(name)), opts);
              }
              py::dict d = two_ball_dict(rep.params);
              d["max_abs_log_residual"] = rep.max_abs_log_residual;
              d["warnings"] = rep.warnings;
              return d;
          },
          py::arg("preset"), py::arg("starts") = 16, py::arg("seed") = 1);

    m.def("simulate",
          [](const Scenario& s, const std::vector<double>& t_db, std::uint64_t realizations, std::uint64_t seed) {
              SimConfig cfg;
              cfg.scenario = s;
              for (double d : t_db) cfg.thresholds.push_back(db_to_linear(d));
              cfg.realizations = realizations;
              cfg.seed = seed;
              SimStats st;
              {
                  py::gil_scoped_release nogil;
                  st = simulate(cfg);
              }
              py::dict d;
              d["realizations"] = st.realizations;
              d["window_radius"] = st.window_radius;
              d["blockage"] = py::make_tuple(st.blockage.mean, st.blockage.half_width);
              d["pathloss"] = association_dict(st.pathloss);
              d["power"] = association_dict(st.power);
              return d;
          },
          py::arg("scenario"), py::arg("t_db"), py::arg("realizations") = 100000, py::arg("seed") = 1);
}
