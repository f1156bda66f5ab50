#include "mmcov/scenario_io.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace mmcov {

namespace {

using json = nlohmann::json;

// Object reader that remembers which keys were consumed so leftovers can be
// reported as unknown.
class Obj {
public:
    Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw SchemaError(path_, "expected an object");
    }

    bool has(const char* key) const { return j_.contains(key); }
    std::string at(const char* key) const { return path_ + "." + key; }

    const json* get(const char* key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void number(const char* key, double& out) {
        if (const json* v = get(key)) out = as_number(*v, at(key));
    }

    void positive(const char* key, double& out) {
        if (const json* v = get(key)) {
            out = as_number(*v, at(key));
            if (!(out > 0.0)) throw SchemaError(at(key), "must be > 0");
        }
    }

    void non_negative(const char* key, double& out) {
        if (const json* v = get(key)) {
            out = as_number(*v, at(key));
            if (!(out >= 0.0)) throw SchemaError(at(key), "must be >= 0");
        }
    }

    void count(const char* key, std::uint64_t& out) {
        if (const json* v = get(key)) {
            if (!v->is_number_unsigned()) throw SchemaError(at(key), "expected a non-negative integer");
            out = v->get<std::uint64_t>();
        }
    }

    void boolean(const char* key, bool& out) {
        if (const json* v = get(key)) {
            if (!v->is_boolean()) throw SchemaError(at(key), "expected true or false");
            out = v->get<bool>();
        }
    }

    std::optional<std::string> string(const char* key) {
        const json* v = get(key);
        if (!v) return std::nullopt;
        if (!v->is_string()) throw SchemaError(at(key), "expected a string");
        return v->get<std::string>();
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw SchemaError(path_ + "." + it.key(), "unknown key");
    }

    static double as_number(const json& v, const std::string& path) {
        if (!v.is_number()) throw SchemaError(path, "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw SchemaError(path, "must be finite");
        return d;
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void require(const Obj& o, std::initializer_list<const char*> keys) {
    for (const char* k : keys)
        if (!o.has(k)) throw SchemaError(o.at(k), "required when no preset is given");
}

void read_antenna(const json& j, const std::string& path, AntennaPattern& a, bool strict) {
    Obj o(j, path);
    if (strict) require(o, {"gain_max_db", "gain_min_db", "beamwidth_deg"});
    double gmax = linear_to_db(a.gain_max), gmin = linear_to_db(a.gain_min);
    double width = a.beamwidth * 180.0 / kPi;
    o.number("gain_max_db", gmax);
    o.number("gain_min_db", gmin);
    o.positive("beamwidth_deg", width);
    o.finish();
    if (gmin > gmax) throw SchemaError(path + ".gain_min_db", "must not exceed gain_max_db");
    if (width > 360.0) throw SchemaError(path + ".beamwidth_deg", "must be <= 360");
    a = {db_to_linear(gmax), db_to_linear(gmin), deg_to_rad(width)};
}

void read_state_law(const json& j, const std::string& path, StatePathLoss& s, bool strict) {
    Obj o(j, path);
    if (strict) {
        require(o, {"beta", "sigma_db"});
        if (!o.has("alpha_db") && !o.has("kappa")) throw SchemaError(o.at("alpha_db"), "alpha_db or kappa required");
    }
    if (o.has("alpha_db") && o.has("kappa")) throw SchemaError(path, "give either alpha_db or kappa, not both");
    o.positive("beta", s.beta);
    if (o.has("alpha_db")) {
        double alpha = 0.0;
        o.number("alpha_db", alpha);
        s.kappa = kappa_from_floating_intercept(alpha, s.beta);
    } else {
        o.positive("kappa", s.kappa);
    }
    o.number("mu_db", s.mu_db);
    o.positive("sigma_db", s.sigma_db);
    o.finish();
}

void read_channel(const json& j, const std::string& path, ChannelModel& ch, bool strict) {
    Obj o(j, path);
    if (strict) require(o, {"link_state", "path_loss"});
    if (const json* ls = o.get("link_state")) {
        Obj l(*ls, o.at("link_state"));
        if (strict) require(l, {"delta_los", "gamma_los", "delta_out", "gamma_out"});
        l.non_negative("delta_los", ch.link.delta_los);
        l.positive("gamma_los", ch.link.gamma_los);
        l.non_negative("delta_out", ch.link.delta_out);
        l.non_negative("gamma_out", ch.link.gamma_out);
        l.finish();
        if (ch.link.gamma_los > 1.0) throw SchemaError(o.at("link_state") + ".gamma_los", "must be <= 1");
    }
    if (const json* pl = o.get("path_loss")) {
        Obj p(*pl, o.at("path_loss"));
        if (strict) require(p, {"los", "nlos"});
        if (const json* v = p.get("los")) read_state_law(*v, p.at("los"), ch.path_loss[LinkState::LOS], strict);
        if (const json* v = p.get("nlos")) read_state_law(*v, p.at("nlos"), ch.path_loss[LinkState::NLOS], strict);
        p.finish();
    }
    o.finish();
}

TierConfig read_tier(const json& j, const std::string& path, const TierConfig& base, bool strict) {
    Obj o(j, path);
    if (strict) {
        require(o, {"tx_power_dbm", "bs_antenna"});
        if (!o.has("cell_radius_m") && !o.has("density_per_m2"))
            throw SchemaError(o.at("cell_radius_m"), "cell_radius_m or density_per_m2 required");
    }
    TierConfig t = base;
    if (o.has("cell_radius_m") && o.has("density_per_m2"))
        throw SchemaError(path, "give either cell_radius_m or density_per_m2, not both");
    if (o.has("cell_radius_m")) {
        double rc = 0.0;
        o.positive("cell_radius_m", rc);
        t.density = density_from_cell_radius(rc);
    } else {
        o.non_negative("density_per_m2", t.density);
    }
    o.number("tx_power_dbm", t.tx_power_dbm);
    if (const json* a = o.get("bs_antenna")) read_antenna(*a, o.at("bs_antenna"), t.bs_pattern, strict);
    o.finish();
    return t;
}

std::array<double, 3> read_triple(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 3) throw SchemaError(path, "expected an array of 3 numbers");
    std::array<double, 3> out{};
    for (int i = 0; i < 3; ++i) {
        out[i] = Obj::as_number(j[i], path + "[" + std::to_string(i) + "]");
        if (out[i] < 0.0 || out[i] > 1.0) throw SchemaError(path + "[" + std::to_string(i) + "]", "must lie in [0, 1]");
    }
    return out;
}

TwoBallParams read_two_ball(const json& j, const std::string& path) {
    Obj o(j, path);
    TwoBallParams tb;
    o.non_negative("d1_m", tb.d1);
    o.non_negative("d2_m", tb.d2);
    if (tb.d2 < tb.d1) throw SchemaError(path + ".d2_m", "must be >= d1_m");
    std::array<double, 3> l{}, n{};
    if (const json* v = o.get("q_los")) l = read_triple(*v, o.at("q_los"));
    else throw SchemaError(o.at("q_los"), "required");
    if (const json* v = o.get("q_nlos")) n = read_triple(*v, o.at("q_nlos"));
    else throw SchemaError(o.at("q_nlos"), "required");
    o.finish();
    tb.q[0] = l;
    tb.q[1] = n;
    for (int b = 0; b < 3; ++b) {
        if (l[b] + n[b] > 1.0 + 1e-12)
            throw SchemaError(path + ".q_nlos[" + std::to_string(b) + "]", "q_los + q_nlos exceeds 1");
        tb.q[kOutState][b] = std::max(0.0, 1.0 - l[b] - n[b]);
    }
    return tb;
}

Association read_association(const std::string& s, const std::string& path) {
    if (s == "pathloss") return Association::SmallestPathLoss;
    if (s == "power") return Association::HighestPower;
    throw SchemaError(path, "expected \"pathloss\" or \"power\"");
}

Preset read_preset(const std::string& s, const std::string& path) {
    if (auto p = preset_from_name(s)) return *p;
    throw SchemaError(path, "unknown preset \"" + s + "\"");
}

}  // namespace

std::vector<double> ThresholdGrid::db_values() const {
    validate();
    std::vector<double> v;
    const long n = std::lround(std::floor((stop_db - start_db) / step_db + 1e-9));
    for (long i = 0; i <= n; ++i) v.push_back(start_db + static_cast<double>(i) * step_db);
    return v;
}

void ThresholdGrid::validate() const {
    if (!std::isfinite(start_db) || !std::isfinite(stop_db) || !(step_db > 0.0) || stop_db < start_db)
        throw std::invalid_argument("threshold grid: need start <= stop and step > 0");
    if ((stop_db - start_db) / step_db > 1e6) throw std::invalid_argument("threshold grid: too many points");
}

ThresholdGrid parse_t_grid(const std::string& text) {
    ThresholdGrid g;
    std::istringstream is(text);
    char c1 = 0, c2 = 0;
    if (!(is >> g.start_db >> c1 >> g.stop_db >> c2 >> g.step_db) || c1 != ':' || c2 != ':' || !is.eof())
        throw std::invalid_argument("threshold grid must look like start:stop:step (dB), got \"" + text + "\"");
    g.validate();
    return g;
}

ScenarioFile preset_file(Preset p) {
    ScenarioFile f;
    f.preset = p;
    f.scenario = preset_scenario(p, 150.0);
    return f;
}

ScenarioFile parse_scenario(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw SchemaError("$", std::string("invalid JSON: ") + e.what());
    }
    Obj root(doc, "$");
    ScenarioFile f;
    if (auto p = root.string("preset")) {
        f = preset_file(read_preset(*p, root.at("preset")));
    } else {
        for (const char* key : {"channel", "radio", "tiers", "mt_antenna"})
            if (!root.has(key)) throw SchemaError(root.at(key), "required when no preset is given");
        f.scenario.two_ball.reset();
    }
    Scenario& s = f.scenario;
    const bool strict = !f.preset;
    if (auto a = root.string("association")) s.association = read_association(*a, root.at("association"));
    if (const json* v = root.get("channel")) {
        read_channel(*v, root.at("channel"), s.channel, strict);
        if (f.preset) s.two_ball.reset();  // published two-ball fit no longer applies
    }
    if (const json* v = root.get("radio")) {
        Obj o(*v, root.at("radio"));
        if (strict) require(o, {"bandwidth_hz", "noise_figure_db"});
        o.positive("bandwidth_hz", s.radio.bandwidth_hz);
        o.number("noise_figure_db", s.radio.noise_figure_db);
        o.finish();
    }
    if (const json* v = root.get("mt_antenna")) read_antenna(*v, root.at("mt_antenna"), s.mt_pattern, strict);
    if (const json* v = root.get("tiers")) {
        const std::string tp = root.at("tiers");
        if (!v->is_array() || v->empty()) throw SchemaError(tp, "expected a non-empty array");
        TierConfig base = s.tiers.empty() ? TierConfig{} : s.tiers.front();
        std::vector<TierConfig> tiers;
        for (std::size_t i = 0; i < v->size(); ++i) {
            const std::string ip = tp + "[" + std::to_string(i) + "]";
            tiers.push_back(read_tier((*v)[i], ip, base, strict));
        }
        s.tiers = std::move(tiers);
    }
    if (const json* v = root.get("beam_error_deg")) {
        Obj o(*v, root.at("beam_error_deg"));
        double bs = 0.0, mt = 0.0;
        o.non_negative("bs", bs);
        o.non_negative("mt", mt);
        o.finish();
        s.beam_error = BeamErrorStd{deg_to_rad(bs), deg_to_rad(mt)};
    }
    if (const json* v = root.get("two_ball")) s.two_ball = read_two_ball(*v, root.at("two_ball"));
    if (const json* v = root.get("simulation")) {
        Obj o(*v, root.at("simulation"));
        o.count("realizations", f.simulation.realizations);
        o.count("seed", f.simulation.seed);
        o.non_negative("window_radius_m", f.simulation.window_radius);
        o.boolean("interference", f.simulation.interference);
        o.finish();
        if (f.simulation.realizations == 0) throw SchemaError(o.at("realizations"), "must be >= 1");
    }
    if (const json* v = root.get("sweep")) {
        Obj o(*v, root.at("sweep"));
        if (const json* rc = o.get("cell_radius_m")) {
            const std::string rp = o.at("cell_radius_m");
            if (!rc->is_array() || rc->empty()) throw SchemaError(rp, "expected a non-empty array");
            for (std::size_t i = 0; i < rc->size(); ++i) {
                const std::string ip = rp + "[" + std::to_string(i) + "]";
                const double r = Obj::as_number((*rc)[i], ip);
                if (!(r > 0.0)) throw SchemaError(ip, "must be > 0");
                f.cell_radii.push_back(r);
            }
        }
        if (const json* tg = o.get("t_grid_db")) {
            Obj g(*tg, o.at("t_grid_db"));
            g.number("start", f.t_grid.start_db);
            g.number("stop", f.t_grid.stop_db);
            g.positive("step", f.t_grid.step_db);
            g.finish();
            if (f.t_grid.stop_db < f.t_grid.start_db) throw SchemaError(o.at("t_grid_db") + ".stop", "must be >= start");
        }
        o.finish();
    }
    if (auto b = root.string("baseline")) f.baseline = read_preset(*b, root.at("baseline"));
    root.finish();
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw SchemaError("$", e.what());
    }
    return f;
}

ScenarioFile load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("$", "cannot open scenario file \"" + path + "\"");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

ScenarioFile resolve_scenario(const std::string& path_or_preset) {
    if (std::ifstream(path_or_preset).good()) return load_scenario_file(path_or_preset);
    if (auto p = preset_from_name(path_or_preset)) return preset_file(*p);
    throw SchemaError("$", "\"" + path_or_preset + "\" is neither a readable file nor a preset name");
}

}  // namespace mmcov
