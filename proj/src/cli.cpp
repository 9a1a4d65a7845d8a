#include "sfa/cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "sfa/config.hpp"
#include "sfa/error.hpp"
#include "sfa/parallel.hpp"

#ifndef SFA_VERSION
#define SFA_VERSION "0.1.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace sfa {

std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ull;
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

std::string g17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x == 0 ? 0.0 : x);
    return buf;
}

struct Run {
    RunConfig cfg;
    fs::path out;
    int threads = 1;
    std::string command;
    std::vector<std::string> outputs;
    json failures = json::array();

    std::ofstream open(const std::string& name) {
        outputs.push_back(name);
        std::ofstream f(out / name);
        if (!f) throw ConfigError("cannot write " + (out / name).string());
        return f;
    }
    void write_json(const std::string& name, const json& j) { open(name) << j.dump(2) << '\n'; }
    std::string metadata() const {
        std::ostringstream ss;
        ss << "# sfa-orbits " << SFA_VERSION << " " << command << "\n"
           << "# config_hash " << fnv1a_hex(cfg.resolved().dump()) << "\n"
           << "# omega0_au " << g17(cfg.field.omega) << " Ip_au " << g17(cfg.Ip) << "\n";
        return ss.str();
    }
};

std::string join_labels(const std::vector<OrbitLabel>& ls) {
    std::string s;
    for (const auto& l : ls) s += (s.empty() ? "" : " ") + to_string(l);
    return s;
}

struct Orbits {
    std::vector<HarmonicCutoff> cutoffs;
    LabeledCloud cloud;
    AuditReport audit;
};

Orbits compute_orbits(const Run& r, const VolkovAction& m, bool need_cloud) {
    Orbits o;
    auto win = default_window(m.field());
    o.cutoffs = find_all_cutoffs(m, win, r.cfg.solver);
    if (!need_cloud) return o;
    auto raw = solve_cloud(m, r.cfg.grid(), win, r.cfg.solver, r.threads);
    o.cloud = classify_cloud(raw, o.cutoffs, {r.cfg.eta_floor, r.cfg.eta_override});
    AuditOptions ao;
    ao.jump_threshold = r.cfg.solver.jump_threshold;
    ao.eta_floor = r.cfg.eta_floor;
    o.audit = audit_orbits(m, o.cloud, o.cutoffs, ao);
    return o;
}

json audit_json(const Orbits& o, double omega0) {
    json fam = json::array();
    for (const auto& f : o.audit.families) {
        json ls = json::array();
        for (const auto& l : f.labels) ls.push_back(to_string(l));
        fam.push_back({{"labels", ls},
                       {"touches_energy_cutoff", f.touches_energy_cutoff},
                       {"touches_threshold_cutoff", f.touches_threshold_cutoff}});
    }
    json cr = json::array();
    for (const auto& c : o.audit.crossings) {
        json x = {{"cutoff", c.cutoff_index}, {"dropped", to_string(c.dropped)},
                  {"drop_above", c.drop_above}};
        x["stokes_omega_au"] = c.has_stokes ? json(c.omega_stokes) : json(nullptr);
        x["anti_stokes_omega_au"] = c.has_anti_stokes ? json(c.omega_anti_stokes) : json(nullptr);
        cr.push_back(x);
    }
    json ex = json::array();
    for (const auto& e : o.audit.exempt)
        ex.push_back({{"label", to_string(e.label)}, {"omega_lo_au", e.omega_lo},
                      {"omega_hi_au", e.omega_hi}, {"jump", e.jump}});
    return {{"duplicates", o.audit.duplicates},
            {"max_jump", o.audit.max_jump},
            {"max_jump_raw", o.audit.max_jump_raw},
            {"coalescence_steps", ex},
            {"families", fam},
            {"energy_families", o.audit.energy_families()},
            {"cutoffs", o.cutoffs.size()},
            {"cutoffs_alternate", cutoffs_alternate(o.cutoffs)},
            {"stokes", cr},
            {"omega0_au", omega0}};
}

void write_cutoffs(Run& r, const std::vector<HarmonicCutoff>& cs) {
    auto f = r.open("cutoffs.csv");
    f << r.metadata();
    f << "index,type,re_t,im_t,re_tp,im_tp,re_omega_hc,im_omega_hc,re_A_hc,im_A_hc,arg_A_hc_deg,residual\n";
    for (std::size_t k = 0; k < cs.size(); ++k) {
        const auto& c = cs[k];
        f << k << ',' << (c.type == CutoffType::energy ? "energy" : "threshold") << ','
          << g17(c.t_hc.real()) << ',' << g17(c.t_hc.imag()) << ',' << g17(c.tp_hc.real()) << ','
          << g17(c.tp_hc.imag()) << ',' << g17(c.omega_hc.real()) << ',' << g17(c.omega_hc.imag())
          << ',' << g17(c.A_hc.real()) << ',' << g17(c.A_hc.imag()) << ','
          << g17(std::arg(c.A_hc) * 180 / pi) << ',' << g17(c.residual) << '\n';
    }
}

int cmd_orbits(Run& r) {
    VolkovAction m(r.cfg.field.build(), {r.cfg.Ip});
    auto o = compute_orbits(r, m, true);
    {
        auto f = r.open("saddles.csv");
        f << r.metadata() << "# S = S_V - omega t\n";
        f << "omega_au,label_strip,label_side,re_t,im_t,re_tp,im_tp,re_S,im_S,residual\n";
        for (const auto& row : o.cloud)
            for (const auto& x : row) {
                cplx S = total_action(x.s);
                f << g17(x.s.omega) << ',' << x.label.strip_index << ',' << x.label.side << ','
                  << g17(x.s.t.real()) << ',' << g17(x.s.t.imag()) << ',' << g17(x.s.tp.real())
                  << ',' << g17(x.s.tp.imag()) << ',' << g17(S.real()) << ',' << g17(S.imag())
                  << ',' << g17(x.s.residual) << '\n';
            }
    }
    write_cutoffs(r, o.cutoffs);
    json a = audit_json(o, r.cfg.field.omega);
    bool pass = o.audit.duplicates == 0 && o.audit.max_jump < r.cfg.solver.jump_threshold;
    a["pass"] = pass;
    r.write_json("audit.json", a);
    if (!pass) throw OrbitLost("orbit audit failed: duplicate labels or continuity jump");
    return exit_ok;
}

int cmd_spectrum(Run& r) {
    const auto& c = r.cfg;
    VolkovAction m(c.field.build(), {c.Ip});
    Prefactor pf{c.prefactor, c.Ip};
    auto grid = c.grid();
    bool need_cloud = c.wants("spa") || c.wants("ua");
    auto o = compute_orbits(r, m, need_cloud);
    std::vector<SpectrumLine> lines(grid.size());
    if (need_cloud) {
        auto tracks = family_tracks(o.cloud, o.audit, pf);
        lines = spa_spectrum(tracks, o.audit, grid);
        if (c.wants("ua")) add_uniform(lines, tracks, o.audit, o.cutoffs);
    }
    std::vector<CVec2> hca, qpi;
    if (c.wants("hca")) hca = hca_spectrum(m, o.cutoffs, grid, pf);
    if (c.qpi) {
        if (c.qpi->cutoff >= int(o.cutoffs.size())) throw ConfigError("qpi.cutoff: index beyond the cutoff list");
        qpi = hca_qpi_variant(m, o.cutoffs[c.qpi->cutoff], {c.qpi->r, c.qpi->full_contrast}, grid, pf);
    }
    std::string all_cutoffs;
    for (std::size_t k = 0; k < o.cutoffs.size(); ++k) all_cutoffs += (k ? " hc" : "hc") + std::to_string(k);

    auto f = r.open("spectrum.csv");
    f << r.metadata() << "# prefactor " << to_string(c.prefactor) << "\n";
    f << "omega_au,harmonic_order,method,re_Dx,im_Dx,re_Dy,im_Dy,yield,included_orbits\n";
    auto row = [&](double om, const char* method, const CVec2& d, const std::string& inc) {
        f << g17(om) << ',' << g17(om / c.field.omega) << ',' << method << ',' << g17(d.x.real())
          << ',' << g17(d.x.imag()) << ',' << g17(d.y.real()) << ',' << g17(d.y.imag()) << ','
          << g17(yield(d)) << ',' << inc << '\n';
    };
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& L = lines[i];
        if (c.wants("spa") && L.has_spa) {
            std::vector<OrbitLabel> inc;
            for (const auto& x : L.orbits)
                if (x.included) inc.push_back(x.label);
            row(grid[i], "spa", L.spa, join_labels(inc));
        }
        if (c.wants("ua") && L.has_ua) {
            std::vector<OrbitLabel> inc;
            for (const auto& x : L.orbits) {
                int k = x.label.strip_index;
                bool paired = k >= 0 && k < int(o.cutoffs.size()) && o.cutoffs[k].type == CutoffType::energy;
                if (x.included || paired) inc.push_back(x.label);
            }
            row(grid[i], "ua", L.ua, join_labels(inc));
        }
        if (c.wants("hca")) row(grid[i], "hca", hca[i], all_cutoffs);
        if (c.qpi) row(grid[i], "hca_qpi", qpi[i], "hc" + std::to_string(c.qpi->cutoff));
    }
    return exit_ok;
}

int cmd_scan(Run& r) {
    const auto& c = r.cfg;
    if (!c.cutoff_law && !c.mixing && !c.mesh) throw ConfigError("scan: config has no scan section");
    auto fail = [&](const std::string& scan, const json& what, const std::string& msg) {
        r.failures.push_back({{"scan", scan}, {"sample", what}, {"error", msg}});
    };
    if (c.cutoff_law) {
        std::vector<double> ips, ups;
        for (double ip : c.cutoff_law->Ip)
            for (double g : c.cutoff_law->gamma) {
                ips.push_back(ip);
                ups.push_back(ip / (2 * g * g));
            }
        std::vector<CutoffLawSample> samples(ips.size());
        parallel_for(ips.size(), r.threads, [&](std::size_t i) {
            samples[i] = cutoff_law_sample(ips[i], ups[i], c.cutoff_law->c_cl, c.field.omega);
        });
        auto f = r.open("cutoff_law.csv");
        f << r.metadata() << "# c_cl " << g17(c.cutoff_law->c_cl) << "\n";
        f << "Ip,Up,gamma,re_omega_hc,im_omega_hc,re_F,im_F\n";
        for (const auto& s : samples) {
            if (!s.ok) {
                fail("cutoff_law", {{"Ip", s.Ip}, {"Up", s.Up}, {"gamma", s.gamma}}, s.error);
                continue;
            }
            f << g17(s.Ip) << ',' << g17(s.Up) << ',' << g17(s.gamma) << ',' << g17(s.omega_hc.real())
              << ',' << g17(s.omega_hc.imag()) << ',' << g17(s.F_value.real()) << ','
              << g17(s.F_value.imag()) << '\n';
        }
        auto fit = fit_cutoff_law(samples);
        r.write_json("cutoff_law_fit.json", {{"re_F", {{"const", fit.re0}, {"gamma2", fit.re2}, {"rms", fit.rms_re}}},
                                             {"im_F", {{"gamma", fit.im1}, {"gamma3", fit.im3}, {"rms", fit.rms_im}}}});
    }
    if (c.mixing) {
        std::vector<double> th;
        for (double d : c.mixing->theta_deg) th.push_back(d * pi / 180);
        MixingOptions mo;
        mo.F = c.field.F0;
        mo.omega = c.field.omega;
        mo.atom = {c.Ip};
        mo.cutoff_id = c.mixing->cutoff_id;
        try {
            auto res = mixing_scan(th, mo);
            auto f = r.open("transitions.csv");
            f << r.metadata() << "# eta = Im omega_hc (a.u.) along the continued cutoff\n";
            f << "theta_deg,cutoff_id,eta\n";
            for (std::size_t i = 0; i < res.track.theta.size(); ++i)
                f << g17(c.mixing->theta_deg[i]) << ',' << mo.cutoff_id << ','
                  << g17(res.track.cutoffs[i].omega_hc.imag()) << '\n';
            json ev = json::array();
            for (const auto& e : res.events)
                ev.push_back({{"theta_deg", e.theta * 180 / pi}, {"cutoff_id", e.cutoff_id},
                              {"eta_before", e.eta_before}, {"eta_after", e.eta_after},
                              {"eta_at_event", e.cutoff.omega_hc.imag()},
                              {"re_omega_hc", e.cutoff.omega_hc.real()},
                              {"coalescence", e.coalescence}});
            r.write_json("transition_events.json", ev);
        } catch (const Error& e) {
            fail("mixing", c.mixing->cutoff_id, e.what());
        }
    }
    if (c.mesh) {
        try {
            VolkovAction m(c.field.build(), {c.Ip});
            auto o = compute_orbits(r, m, true);
            auto mesh = riemann_mesh(m, o.cutoffs, o.audit.families, default_window(m.field()), c.mesh->opt);
            {
                auto f = r.open("mesh.txt");
                write_mesh(f, mesh, c.field.omega);
            }
            json cov = json::array();
            for (const auto& s : cover_audit(mesh, c.mesh->lo, c.mesh->hi))
                cov.push_back({{"family", s.family},
                               {"labels", join_labels(o.audit.families[s.family].labels)},
                               {"single", s.single}, {"holes", s.holes}, {"overlap", s.overlap}});
            r.write_json("mesh_cover.json", {{"gaps", mesh.gaps}, {"families", cov}});
        } catch (const Error& e) {
            fail("mesh", nullptr, e.what());
        }
    }
    return r.failures.empty() ? exit_ok : exit_partial;
}

int resolve_threads(int flag) {
    if (flag > 0) return flag;
    if (const char* e = std::getenv("SFA_ORBITS_THREADS")) {
        char* end = nullptr;
        long n = std::strtol(e, &end, 10);
        if (end != e && *end == 0 && n > 0) return int(n);
        throw ConfigError("SFA_ORBITS_THREADS must be a positive integer");
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::string utc_now() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

void report_error(const fs::path& out, const std::string& kind, const std::string& msg, int code) {
    json e = {{"status", "error"}, {"kind", kind}, {"message", msg}, {"exit_code", code}};
    std::cerr << e.dump() << '\n';
    std::error_code ec;
    if (out.empty()) return;
    fs::create_directories(out, ec);
    std::ofstream f(out / "error.json");
    if (f) f << e.dump(2) << '\n';
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"Quantum-orbit harmonic-cutoff toolkit"};
    app.require_subcommand(1);
    std::string config, out;
    int threads = 0;
    double tol = 0;
    for (const char* name : {"orbits", "spectrum", "scan"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config, "JSON run configuration")->required();
        sub->add_option("--out", out, "output directory")->required();
        sub->add_option("--threads", threads, "worker threads (default: SFA_ORBITS_THREADS or all cores)");
        sub->add_option("--tol", tol, "Newton residual tolerance");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config;
    }

    Run r;
    r.command = app.get_subcommands().front()->get_name();
    r.out = out;
    auto t0 = std::chrono::steady_clock::now();
    std::string started = utc_now();
    int code = exit_ok;
    try {
        r.cfg = load_config(config);
        if (tol < 0) throw ConfigError("--tol must be positive");
        if (tol > 0) r.cfg.solver.tol = tol;
        r.threads = resolve_threads(threads);
        fs::create_directories(r.out);
        fs::remove(r.out / "error.json");
        r.write_json("config.resolved.json", r.cfg.resolved());
        if (r.command == "orbits") code = cmd_orbits(r);
        else if (r.command == "spectrum") code = cmd_spectrum(r);
        else code = cmd_scan(r);
    } catch (const ConfigError& e) {
        report_error(r.out, e.kind(), e.what(), exit_config);
        return exit_config;
    } catch (const Error& e) {
        report_error(r.out, e.kind(), e.what(), exit_solver);
        code = exit_solver;
    } catch (const std::exception& e) {
        report_error(r.out, "InternalError", e.what(), exit_solver);
        code = exit_solver;
    }
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::error_code ec;
    if (fs::is_directory(r.out, ec)) {
        json man = {{"tool", "sfa-orbits"},
                    {"version", SFA_VERSION},
                    {"command", r.command},
                    {"config_hash", fnv1a_hex(r.cfg.resolved().dump())},
                    {"status", code == exit_ok ? "ok" : code == exit_partial ? "partial" : "error"},
                    {"exit_code", code},
                    {"outputs", r.outputs},
                    {"wall_time_s", wall},
                    {"failed_samples", r.failures}};
        std::ofstream(r.out / "manifest.json") << man.dump(2) << '\n';
        json tim = {{"started_utc", started}, {"finished_utc", utc_now()}, {"threads", r.threads}};
        std::ofstream(r.out / "timing.json") << tim.dump(2) << '\n';
    }
    return code;
}

}  // namespace sfa
