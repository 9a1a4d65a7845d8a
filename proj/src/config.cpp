#include "sfa/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "sfa/error.hpp"

namespace sfa {

using nlohmann::json;

namespace {

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : j.items())
        if (!ok.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

double number(const json& j, const std::string& where) {
    if (!j.is_number()) throw ConfigError(where + ": expected a number");
    return j.get<double>();
}

// [list] or {start, stop, step} or {start, stop, count}
std::vector<double> number_list(const json& j, const std::string& where) {
    std::vector<double> out;
    if (j.is_array()) {
        for (const auto& v : j) out.push_back(number(v, where));
    } else if (j.is_object()) {
        double a = number(j.at("start"), where), b = number(j.at("stop"), where);
        if (j.contains("count")) {
            only_keys(j, where, {"start", "stop", "count"});
            int n = j["count"].get<int>();
            if (n < 1) throw ConfigError(where + ": count must be positive");
            for (int i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
        } else {
            only_keys(j, where, {"start", "stop", "step"});
            double h = number(j.at("step"), where);
            if (!(h > 0)) throw ConfigError(where + ": step must be positive");
            for (long i = 0; a + i * h <= b + 1e-9 * h; ++i) out.push_back(a + i * h);
        }
    } else {
        throw ConfigError(where + ": expected a list or a range object");
    }
    if (out.empty()) throw ConfigError(where + ": empty list");
    return out;
}

cplx complex_of(const json& j, const std::string& where) {
    if (j.is_number()) return j.get<double>();
    if (j.is_array() && j.size() == 2) return {number(j[0], where), number(j[1], where)};
    throw ConfigError(where + ": expected a number or [re, im]");
}

}  // namespace

double parse_energy(const json& v, double omega) {
    if (v.is_number()) return v.get<double>();
    if (!v.is_string()) throw ConfigError("energy: expected a number or \"<value> <unit>\"");
    std::istringstream ss(v.get<std::string>());
    double x;
    std::string unit, rest;
    if (!(ss >> x >> unit) || (ss >> rest)) throw ConfigError("energy: cannot parse '" + v.get<std::string>() + "'");
    if (unit == "au") return x;
    if (unit == "eV") return x / hartree_eV;
    if (unit == "orders") return x * omega;
    throw ConfigError("energy: unknown unit '" + unit + "' (au, eV, orders)");
}

FourierField FieldSpec::build() const {
    if (type == "linear") return linear_field(F0, omega, ellipticity);
    if (type == "bicircular") return bicircular_field(F0, theta, omega);
    return FourierField(omega, harmonics);
}

std::vector<double> RunConfig::grid() const { return omega_grid(grid_start, grid_stop, grid_step); }

bool RunConfig::wants(const std::string& m) const {
    return std::find(methods.begin(), methods.end(), m) != methods.end();
}

namespace {

RunConfig parse_unchecked(const json& j) {
    only_keys(j, "config", {"field", "atom", "omega_grid", "methods", "prefactor", "qpi",
                            "tolerances", "eta_override", "scan"});
    RunConfig c;

    json f = j.value("field", json::object());
    only_keys(f, "field", {"type", "wavelength_nm", "omega_au", "intensity_W_cm2", "F0_au",
                           "ellipticity", "mixing_angle_deg", "harmonics"});
    c.field.type = f.value("type", "linear");
    if (c.field.type != "linear" && c.field.type != "bicircular" && c.field.type != "fourier")
        throw ConfigError("field.type: expected linear, bicircular or fourier");
    if (f.contains("wavelength_nm") && f.contains("omega_au"))
        throw ConfigError("field: give wavelength_nm or omega_au, not both");
    if (f.contains("intensity_W_cm2") && f.contains("F0_au"))
        throw ConfigError("field: give intensity_W_cm2 or F0_au, not both");
    LabField lab = from_experiment(f.contains("wavelength_nm") ? number(f["wavelength_nm"], "field.wavelength_nm") : 800.0,
                                   f.contains("intensity_W_cm2") ? number(f["intensity_W_cm2"], "field.intensity_W_cm2") : 2e14);
    c.field.omega = f.contains("omega_au") ? number(f["omega_au"], "field.omega_au") : lab.omega;
    c.field.F0 = f.contains("F0_au") ? number(f["F0_au"], "field.F0_au") : lab.F0;
    if (!(c.field.omega > 0) || !(c.field.F0 >= 0)) throw ConfigError("field: omega must be positive, F0 non-negative");
    c.field.ellipticity = f.contains("ellipticity") ? number(f["ellipticity"], "field.ellipticity") : 0.0;
    if (f.contains("mixing_angle_deg")) c.field.theta = number(f["mixing_angle_deg"], "field.mixing_angle_deg") * pi / 180;
    if (c.field.type == "fourier") {
        if (!f.contains("harmonics") || !f["harmonics"].is_array() || f["harmonics"].empty())
            throw ConfigError("field.harmonics: required for a fourier field");
        for (const auto& h : f["harmonics"]) {
            only_keys(h, "field.harmonics[]", {"n", "ax", "ay"});
            int n = h.at("n").get<int>();
            if (n < 1) throw ConfigError("field.harmonics[].n must be >= 1");
            c.field.harmonics.push_back({n, {complex_of(h.value("ax", json(0.0)), "ax"),
                                             complex_of(h.value("ay", json(0.0)), "ay")}});
        }
    } else if (f.contains("harmonics")) {
        throw ConfigError("field.harmonics: only valid for a fourier field");
    }
    double w = c.field.omega;

    json a = j.value("atom", json::object());
    only_keys(a, "atom", {"Ip"});
    c.Ip = parse_energy(a.value("Ip", json("21.5645 eV")), w);
    if (!(c.Ip > 0)) throw ConfigError("atom.Ip must be positive");

    json g = j.value("omega_grid", json::object());
    only_keys(g, "omega_grid", {"start", "stop", "step"});
    c.grid_start = parse_energy(g.value("start", json("13 orders")), w);
    c.grid_stop = parse_energy(g.value("stop", json("61 orders")), w);
    c.grid_step = parse_energy(g.value("step", json("0.25 orders")), w);
    if (!(c.grid_step > 0) || c.grid_stop < c.grid_start || c.grid().empty())
        throw ConfigError("omega_grid: empty grid");

    if (j.contains("methods")) {
        c.methods.clear();
        for (const auto& m : j["methods"]) {
            auto s = m.get<std::string>();
            if (s != "spa" && s != "ua" && s != "hca") throw ConfigError("methods: unknown method '" + s + "'");
            if (!c.wants(s)) c.methods.push_back(s);
        }
        if (c.methods.empty()) throw ConfigError("methods: empty selection");
    }
    try {
        c.prefactor = parse_prefactor(j.value("prefactor", "unity"));
    } catch (const Error& e) {
        throw ConfigError(std::string("prefactor: ") + e.what());
    }
    if (j.contains("qpi")) {
        only_keys(j["qpi"], "qpi", {"cutoff", "r", "full_contrast"});
        QpiConfig q;
        q.cutoff = j["qpi"].value("cutoff", 0);
        q.r = j["qpi"].value("r", 1.0);
        q.full_contrast = j["qpi"].value("full_contrast", false);
        if (q.r < 0 || q.cutoff < 0) throw ConfigError("qpi: r and cutoff must be non-negative");
        c.qpi = q;
    }
    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        only_keys(t, "tolerances", {"newton", "max_iter", "jump", "eta_floor", "dedupe"});
        c.solver.tol = t.value("newton", c.solver.tol);
        c.solver.max_iter = t.value("max_iter", c.solver.max_iter);
        c.solver.jump_threshold = t.value("jump", c.solver.jump_threshold);
        c.solver.dedupe = t.value("dedupe", c.solver.dedupe);
        c.eta_floor = t.value("eta_floor", c.eta_floor);
        if (!(c.solver.tol > 0) || c.solver.max_iter < 1 || !(c.solver.jump_threshold > 0))
            throw ConfigError("tolerances: values must be positive");
    }
    if (j.contains("eta_override")) {
        c.eta_override = number(j["eta_override"], "eta_override");
        if (c.eta_override != 1 && c.eta_override != -1) throw ConfigError("eta_override: expected +1 or -1");
    }

    if (j.contains("scan")) {
        const auto& s = j["scan"];
        only_keys(s, "scan", {"cutoff_law", "mixing", "mesh"});
        if (s.contains("cutoff_law")) {
            const auto& cl = s["cutoff_law"];
            only_keys(cl, "scan.cutoff_law", {"gamma", "Ip", "c_cl"});
            CutoffLawConfig x;
            x.gamma = number_list(cl.at("gamma"), "scan.cutoff_law.gamma");
            if (cl.contains("Ip")) {
                if (!cl["Ip"].is_array()) throw ConfigError("scan.cutoff_law.Ip: expected a list");
                for (const auto& v : cl["Ip"]) x.Ip.push_back(parse_energy(v, w));
            } else {
                x.Ip = {c.Ip};
            }
            x.c_cl = cl.value("c_cl", x.c_cl);
            for (double gm : x.gamma)
                if (!(gm > 0)) throw ConfigError("scan.cutoff_law.gamma: values must be positive");
            c.cutoff_law = x;
        }
        if (s.contains("mixing")) {
            const auto& m = s["mixing"];
            only_keys(m, "scan.mixing", {"theta_deg", "cutoff_id"});
            MixingConfig x;
            x.theta_deg = number_list(m.at("theta_deg"), "scan.mixing.theta_deg");
            x.cutoff_id = m.value("cutoff_id", 0);
            for (double th : x.theta_deg)
                if (!(th > 0 && th < 90)) throw ConfigError("scan.mixing.theta_deg: values must lie in (0, 90)");
            c.mixing = x;
        }
        if (s.contains("mesh")) {
            const auto& m = s["mesh"];
            only_keys(m, "scan.mesh", {"re_omega_au", "im_omega_au", "re_step", "im_step", "im_extent"});
            MeshConfig x;
            if (m.contains("re_omega_au")) {
                auto r = number_list(m["re_omega_au"], "scan.mesh.re_omega_au");
                if (r.size() != 2) throw ConfigError("scan.mesh.re_omega_au: expected [lo, hi]");
                x.lo.real(r[0]), x.hi.real(r[1]);
            }
            if (m.contains("im_omega_au")) {
                auto r = number_list(m["im_omega_au"], "scan.mesh.im_omega_au");
                if (r.size() != 2) throw ConfigError("scan.mesh.im_omega_au: expected [lo, hi]");
                x.lo.imag(r[0]), x.hi.imag(r[1]);
            }
            x.opt.re_step = m.value("re_step", x.opt.re_step);
            x.opt.im_step = m.value("im_step", x.opt.im_step);
            x.opt.im_extent = m.value("im_extent", x.opt.im_extent);
            if (!(x.opt.re_step > 0 && x.opt.im_step > 0 && x.opt.im_extent > 0))
                throw ConfigError("scan.mesh: steps and extent must be positive");
            if (!(x.lo.real() < x.hi.real() && x.lo.imag() < x.hi.imag()))
                throw ConfigError("scan.mesh: empty Omega rectangle");
            c.mesh = x;
        }
        if (!c.cutoff_law && !c.mixing && !c.mesh) throw ConfigError("scan: no scan selected");
    }
    return c;
}

}  // namespace

RunConfig parse_config(const json& j) {
    try {
        return parse_unchecked(j);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid config value: ") + e.what());
    }
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(in, nullptr, true, true);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    return parse_config(j);
}

json RunConfig::resolved() const {
    json f = {{"type", field.type}, {"omega_au", field.omega}, {"F0_au", field.F0}};
    if (field.type == "linear") f["ellipticity"] = field.ellipticity;
    if (field.type == "bicircular") f["mixing_angle_deg"] = field.theta * 180 / pi;
    if (field.type == "fourier") {
        f["harmonics"] = json::array();
        for (const auto& h : field.harmonics)
            f["harmonics"].push_back({{"n", h.n},
                                      {"ax", {h.a.x.real(), h.a.x.imag()}},
                                      {"ay", {h.a.y.real(), h.a.y.imag()}}});
    }
    json j = {{"field", f},
              {"atom", {{"Ip", Ip}}},
              {"omega_grid", {{"start", grid_start}, {"stop", grid_stop}, {"step", grid_step}}},
              {"methods", methods},
              {"prefactor", to_string(prefactor)},
              {"tolerances", {{"newton", solver.tol}, {"max_iter", solver.max_iter},
                              {"jump", solver.jump_threshold}, {"eta_floor", eta_floor},
                              {"dedupe", solver.dedupe}}},
              {"eta_override", eta_override}};
    if (qpi) j["qpi"] = {{"cutoff", qpi->cutoff}, {"r", qpi->r}, {"full_contrast", qpi->full_contrast}};
    json s = json::object();
    if (cutoff_law) s["cutoff_law"] = {{"gamma", cutoff_law->gamma}, {"Ip", cutoff_law->Ip}, {"c_cl", cutoff_law->c_cl}};
    if (mixing) s["mixing"] = {{"theta_deg", mixing->theta_deg}, {"cutoff_id", mixing->cutoff_id}};
    if (mesh)
        s["mesh"] = {{"re_omega_au", {mesh->lo.real(), mesh->hi.real()}},
                     {"im_omega_au", {mesh->lo.imag(), mesh->hi.imag()}},
                     {"re_step", mesh->opt.re_step},
                     {"im_step", mesh->opt.im_step},
                     {"im_extent", mesh->opt.im_extent}};
    if (!s.empty()) j["scan"] = s;
    return j;
}

}  // namespace sfa
