#include "sfa/scans.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <cstdio>

#include "sfa/error.hpp"
#include "sfa/parallel.hpp"

namespace sfa {

double classical_return_energy(double phi0) {
    // F0 = w = 1: A = -sin t, electron born at rest at phi0, U_p = 1/4
    double s0 = std::sin(phi0), c0 = std::cos(phi0);
    auto x = [&](double t) { return std::cos(t) - c0 + (t - phi0) * s0; };
    double prev = x(phi0 + 1e-3);
    for (double t = phi0 + 1e-3 + 0.01; t < phi0 + 4 * pi; t += 0.01) {
        double cur = x(t);
        if ((cur < 0) != (prev < 0)) {
            double lo = t - 0.01, hi = t;
            for (int it = 0; it < 100; ++it) {
                double mid = 0.5 * (lo + hi);
                if ((x(mid) < 0) == (x(lo) < 0))
                    lo = mid;
                else
                    hi = mid;
            }
            double v = -std::sin(0.5 * (lo + hi)) + s0;
            return 2 * v * v;
        }
        prev = cur;
    }
    return 0;
}

double classical_cutoff_constant() {
    int n = 4000;
    double best = 0, arg = 0;
    for (int i = 1; i < n; ++i) {
        double phi = 0.5 * pi * i / n;
        double e = classical_return_energy(phi);
        if (e > best) best = e, arg = phi;
    }
    double h = 0.5 * pi / n, a = arg - h, b = arg + h;
    const double g = 0.5 * (std::sqrt(5.0) - 1);
    for (int it = 0; it < 100; ++it) {
        double c = b - g * (b - a), d = a + g * (b - a);
        if (classical_return_energy(c) > classical_return_energy(d))
            b = d;
        else
            a = c;
    }
    return classical_return_energy(0.5 * (a + b));
}

CutoffLawSample cutoff_law_sample(double Ip, double Up, double c_cl, double omega) {
    CutoffLawSample s;
    s.Ip = Ip;
    s.Up = Up;
    s.gamma = std::sqrt(Ip / (2 * Up));
    VolkovAction m(linear_field(2 * omega * std::sqrt(Up), omega), {Ip});
    for (double re : {4.40, 4.2, 4.6})
        for (double im : {s.gamma, 0.5 * s.gamma + 0.3, 1.0}) {
            try {
                auto c = solve_cutoff(m, {cplx(re, 0) / omega, cplx(0.30, im) / omega});
                double wt = (c.t_hc * omega).real();
                if (c.type != CutoffType::energy || wt < 3.5 || wt > 5.5 ||
                    (c.tp_hc * omega).imag() <= 0)
                    continue;
                s.omega_hc = c.omega_hc;
                s.F_value = (c.omega_hc - c_cl * Up) / Ip;
                s.ok = true;
                return s;
            } catch (const Error& e) {
                s.error = e.what();
            }
        }
    if (s.error.empty()) s.error = "no energy-type cutoff near the first return";
    return s;
}

std::vector<CutoffLawSample> cutoff_law_scan(const std::vector<double>& Ip,
                                             const std::vector<double>& Up, double c_cl,
                                             int threads) {
    if (Ip.size() != Up.size()) throw ConfigError("Ip and Up lists differ in length");
    std::vector<CutoffLawSample> out(Ip.size());
    parallel_for(Ip.size(), threads,
                 [&](std::size_t i) { out[i] = cutoff_law_sample(Ip[i], Up[i], c_cl); });
    return out;
}

namespace {

// least squares y = a f(x) + b g(x)
std::pair<double, double> lsq2(const std::vector<double>& f, const std::vector<double>& g,
                               const std::vector<double>& y) {
    double ff = 0, fg = 0, gg = 0, fy = 0, gy = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ff += f[i] * f[i], fg += f[i] * g[i], gg += g[i] * g[i];
        fy += f[i] * y[i], gy += g[i] * y[i];
    }
    double det = ff * gg - fg * fg;
    if (det == 0) return {0, 0};
    return {(fy * gg - gy * fg) / det, (gy * ff - fy * fg) / det};
}

}  // namespace

CutoffLawFit fit_cutoff_law(const std::vector<CutoffLawSample>& samples) {
    std::vector<double> one, g1, g2, g3, re, im;
    for (const auto& s : samples) {
        if (!s.ok) continue;
        one.push_back(1);
        g1.push_back(s.gamma);
        g2.push_back(s.gamma * s.gamma);
        g3.push_back(s.gamma * s.gamma * s.gamma);
        re.push_back(s.F_value.real());
        im.push_back(s.F_value.imag());
    }
    CutoffLawFit f;
    std::tie(f.re0, f.re2) = lsq2(one, g2, re);
    std::tie(f.im1, f.im3) = lsq2(g1, g3, im);
    for (std::size_t i = 0; i < re.size(); ++i) {
        double dr = re[i] - f.re0 - f.re2 * g2[i];
        double di = im[i] - f.im1 * g1[i] - f.im3 * g3[i];
        f.rms_re += dr * dr;
        f.rms_im += di * di;
    }
    if (!re.empty()) {
        f.rms_re = std::sqrt(f.rms_re / re.size());
        f.rms_im = std::sqrt(f.rms_im / re.size());
    }
    return f;
}

double pair_coalescence(const ActionModel& m, const HarmonicCutoff& c) {
    double w = m.omega();
    double om = c.omega_hc.real();
    cplx r = std::sqrt((om - c.omega_hc) / c.A_hc);
    if (std::abs(r) < 1e-4 / w) r = (std::abs(r) > 0 ? r / std::abs(r) : std::sqrt(1.0 / c.A_hc) / std::abs(std::sqrt(1.0 / c.A_hc))) * (1e-4 / w);
    auto a = solve_saddle(m, om, {c.t_hc + 1.5 * r, c.tp_hc});
    auto b = solve_saddle(m, om, {c.t_hc - 1.5 * r, c.tp_hc});
    return w * std::abs(a.t - b.t);
}

MixingResult mixing_scan(const std::vector<double>& theta, const MixingOptions& opt) {
    MixingResult res;
    if (theta.empty()) return res;
    for (double th : theta)
        if (!(th > 0 && th < pi / 2)) throw ConfigError("mixing angle outside (0, 90) degrees");
    auto model = [&](double th) { return VolkovAction(bicircular_field(opt.F, th, opt.omega), opt.atom); };

    HarmonicCutoff cur;
    {
        auto m = model(theta[0]);
        auto cs = find_all_cutoffs(m, default_window(m.field()));
        int n = 0;
        bool found = false;
        for (const auto& c : cs)
            if (c.type == CutoffType::energy && n++ == opt.cutoff_id) {
                cur = c;
                found = true;
                break;
            }
        if (!found) throw OrbitLost("selected energy-type cutoff not found at the first angle");
    }
    auto advance = [&](const HarmonicCutoff& from, double th0, double th1) {
        double th = th0;
        HarmonicCutoff c = from;
        double h = 1;
        int halvings = 0;
        while (th != th1) {
            double target = h >= 1 ? th1 : th + h * (th1 - th);
            try {
                auto n = solve_cutoff(model(target), {c.t_hc, c.tp_hc});
                if (std::abs(n.t_hc - c.t_hc) * opt.omega > 0.3) throw NonConvergence("jump");
                c = n;
                th = target;
                h = 1;
                halvings = 0;
            } catch (const Error&) {
                if (++halvings > 8) throw OrbitLost("cutoff lost during mixing-angle continuation");
                h *= 0.5;
            }
        }
        return c;
    };

    res.track.theta.push_back(theta[0]);
    res.track.cutoffs.push_back(cur);
    for (std::size_t i = 1; i < theta.size(); ++i) {
        cur = advance(cur, theta[i - 1], theta[i]);
        res.track.theta.push_back(theta[i]);
        res.track.cutoffs.push_back(cur);
    }
    for (std::size_t i = 0; i + 1 < theta.size(); ++i) {
        double e0 = res.track.cutoffs[i].omega_hc.imag();
        double e1 = res.track.cutoffs[i + 1].omega_hc.imag();
        if ((e0 < 0) == (e1 < 0)) continue;
        double lo = theta[i], hi = theta[i + 1];
        HarmonicCutoff clo = res.track.cutoffs[i], chi = res.track.cutoffs[i + 1];
        for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
            double mid = 0.5 * (lo + hi);
            auto cm = advance(clo, lo, mid);
            if ((cm.omega_hc.imag() < 0) == (clo.omega_hc.imag() < 0))
                lo = mid, clo = cm;
            else
                hi = mid, chi = cm;
            if (cm.omega_hc.imag() == 0) break;
        }
        const auto& best = std::abs(clo.omega_hc.imag()) < std::abs(chi.omega_hc.imag()) ? clo : chi;
        TransitionEvent ev;
        ev.theta = std::abs(clo.omega_hc.imag()) < std::abs(chi.omega_hc.imag()) ? lo : hi;
        ev.cutoff_id = opt.cutoff_id;
        ev.eta_before = e0;
        ev.eta_after = e1;
        ev.cutoff = best;
        ev.coalescence = pair_coalescence(model(ev.theta), best);
        res.events.push_back(ev);
    }
    return res;
}

int color_of(const OrbitLabel& l) { return 2 * l.strip_index + (l.side > 0 ? 1 : 0); }
OrbitLabel label_of_color(int c) { return {c / 2, c % 2 ? +1 : -1}; }

RiemannMesh riemann_mesh(const VolkovAction& m, const std::vector<HarmonicCutoff>& cutoffs,
                         const std::vector<Family>& families, const TimeWindow& w,
                         const MeshOptions& opt) {
    RiemannMesh mesh;
    mesh.families = families;
    double w0 = m.omega();
    double t0 = w.t_min - opt.re_margin;
    int nre = int(std::floor((w.t_max - w.t_min + 2 * opt.re_margin) / opt.re_step)) + 1;
    int nim = 2 * int(std::round(opt.im_extent / opt.im_step)) + 1;
    int mid = nim / 2;
    std::vector<cplx> tp(std::size_t(nre) * nim);
    std::vector<char> ok(tp.size(), 0);
    auto at = [&](int i, int j) { return std::size_t(i) * nim + j; };
    auto wt_of = [&](int i, int j) { return cplx(t0 + i * opt.re_step, (j - mid) * opt.im_step); };

    auto solve_tp = [&](cplx t, cplx guess, cplx& out) {
        NewtonSystem sys = [&](const C2& z, C2& F, M2& J) {
            Partials p = m.partials(t, z[0]);
            F = {p.Sp, 0};
            J = {{{p.Spp, 0}, {0, 1}}};
        };
        try {
            auto r = newton2(sys, {guess, 0}, 1e-12, 40);
            cplx wtp = r.z[0] * w0;
            if (wtp.real() < w.tp_min - 0.5 || wtp.real() > w.tp_max + 0.5 || wtp.imag() <= 0)
                return false;
            out = r.z[0];
            return true;
        } catch (const Error&) {
            return false;
        }
    };

    // real axis: continuity in Re t, re-anchored by a scan when lost
    cplx prev;
    bool have_prev = false;
    for (int i = 0; i < nre; ++i) {
        cplx t = wt_of(i, mid) / w0;
        cplx got;
        bool found = have_prev && solve_tp(t, prev, got) && std::abs(got - prev) * w0 < 0.2;
        if (!found) {
            double best = INFINITY;
            for (double re = w.tp_min + 0.1; re < w.tp_max; re += 0.2)
                for (double im : {0.5, 0.9, 1.3}) {
                    cplx cand;
                    if (!solve_tp(t, cplx(re, im) / w0, cand)) continue;
                    cplx wc = cand * w0;
                    if (wc.real() < w.tp_min || wc.real() >= w.tp_max) continue;
                    double score = have_prev ? std::abs(cand - prev) : wc.imag();
                    if (score < best) best = score, got = cand, found = true;
                }
        }
        if (found) {
            tp[at(i, mid)] = got;
            ok[at(i, mid)] = 1;
            prev = got;
            have_prev = true;
        }
    }
    // columns: continuation away from the real axis
    for (int i = 0; i < nre; ++i) {
        if (!ok[at(i, mid)]) continue;
        for (int dir : {+1, -1}) {
            cplx g = tp[at(i, mid)];
            for (int j = mid + dir; j >= 0 && j < nim; j += dir) {
                cplx got;
                if (!solve_tp(wt_of(i, j) / w0, g, got) || std::abs(got - g) * w0 > 0.2) break;
                tp[at(i, j)] = got;
                ok[at(i, j)] = 1;
                g = got;
            }
        }
    }

    std::vector<Separatrix> seps;
    for (const auto& c : cutoffs) seps.push_back(separatrix(c));
    std::vector<int> index(tp.size(), -1);
    for (int i = 0; i < nre; ++i)
        for (int j = 0; j < nim; ++j) {
            if (!ok[at(i, j)]) {
                ++mesh.gaps;
                continue;
            }
            SaddleSolution s;
            s.t = wt_of(i, j) / w0;
            s.tp = tp[at(i, j)];
            Partials p = m.partials(s.t, s.tp);
            index[at(i, j)] = int(mesh.vertices.size());
            mesh.vertices.push_back({p.St, wt_of(i, j), color_of(classify_one(s, cutoffs, seps))});
        }
    for (int i = 0; i + 1 < nre; ++i)
        for (int j = 0; j + 1 < nim; ++j) {
            int a = index[at(i, j)], b = index[at(i + 1, j)], c = index[at(i, j + 1)],
                d = index[at(i + 1, j + 1)];
            if (a >= 0 && b >= 0 && d >= 0) mesh.triangles.push_back({a, b, d});
            if (a >= 0 && d >= 0 && c >= 0) mesh.triangles.push_back({a, d, c});
        }
    return mesh;
}

std::vector<CoverStats> cover_audit(const RiemannMesh& mesh, cplx lo, cplx hi, int nre, int nim) {
    std::vector<CoverStats> out;
    for (std::size_t f = 0; f < mesh.families.size(); ++f) {
        std::vector<int> colors;
        for (const auto& l : mesh.families[f].labels) colors.push_back(color_of(l));
        auto in_family = [&](int v) {
            return std::find(colors.begin(), colors.end(), mesh.vertices[v].color) != colors.end();
        };
        struct Tri {
            cplx a, b, c;
            double x0, x1, y0, y1;
        };
        std::vector<Tri> tris;
        for (const auto& t : mesh.triangles) {
            // a triangle straddling a separatrix belongs to the family of its majority
            if (in_family(t[0]) + in_family(t[1]) + in_family(t[2]) < 2) continue;
            cplx a = mesh.vertices[t[0]].omega, b = mesh.vertices[t[1]].omega,
                 c = mesh.vertices[t[2]].omega;
            tris.push_back({a, b, c, std::min({a.real(), b.real(), c.real()}),
                            std::max({a.real(), b.real(), c.real()}),
                            std::min({a.imag(), b.imag(), c.imag()}),
                            std::max({a.imag(), b.imag(), c.imag()})});
        }
        CoverStats st;
        st.family = int(f);
        int total = 0;
        for (int i = 0; i < nre; ++i)
            for (int j = 0; j < nim; ++j) {
                cplx p(lo.real() + (hi.real() - lo.real()) * i / (nre - 1),
                       lo.imag() + (hi.imag() - lo.imag()) * j / (nim - 1));
                int count = 0;
                for (const auto& t : tris) {
                    if (p.real() < t.x0 || p.real() > t.x1 || p.imag() < t.y0 || p.imag() > t.y1)
                        continue;
                    auto cross = [](cplx u, cplx v) { return u.real() * v.imag() - u.imag() * v.real(); };
                    double d1 = cross(t.b - t.a, p - t.a), d2 = cross(t.c - t.b, p - t.b),
                           d3 = cross(t.a - t.c, p - t.c);
                    bool neg = d1 < 0 || d2 < 0 || d3 < 0, pos = d1 > 0 || d2 > 0 || d3 > 0;
                    if (!(neg && pos)) ++count;
                }
                ++total;
                if (count == 0) st.holes += 1;
                else if (count == 1) st.single += 1;
                else st.overlap += 1;
            }
        st.single /= total;
        st.holes /= total;
        st.overlap /= total;
        out.push_back(st);
    }
    return out;
}

void write_mesh(std::ostream& os, const RiemannMesh& mesh, double omega0) {
    char buf[160];
    os << "# sfa-orbits riemann mesh v1\n";
    std::snprintf(buf, sizeof buf, "# omega0_au %.17g\n", omega0);
    os << buf;
    for (std::size_t f = 0; f < mesh.families.size(); ++f) {
        os << "# family " << f;
        for (const auto& l : mesh.families[f].labels) os << ' ' << color_of(l);
        os << '\n';
    }
    os << "vertices " << mesh.vertices.size() << '\n';
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "%.12g %.12g %.12g %.12g %d\n", v.omega.real(),
                      v.omega.imag(), v.wt.real(), v.wt.imag(), v.color);
        os << buf;
    }
    os << "triangles " << mesh.triangles.size() << '\n';
    for (const auto& t : mesh.triangles) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

RiemannMesh read_mesh(std::istream& is) {
    RiemannMesh mesh;
    std::string line;
    auto record = [&](std::size_t i, std::size_t n, const char* what) {
        if (!std::getline(is, line))
            throw ConfigError("mesh file truncated: " + std::to_string(i) + " of " + std::to_string(n) + " " + what);
        return std::istringstream(line);
    };
    while (std::getline(is, line)) {
        if (line.rfind("# family", 0) == 0) {
            std::istringstream ss(line.substr(8));
            int id, c;
            if (!(ss >> id)) throw ConfigError("malformed mesh family line");
            Family f;
            while (ss >> c) f.labels.push_back(label_of_color(c));
            mesh.families.push_back(f);
            continue;
        }
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string key;
        std::size_t n;
        if (!(ss >> key >> n)) throw ConfigError("malformed mesh file");
        if (key == "vertices") {
            for (std::size_t i = 0; i < n; ++i) {
                auto vs = record(i, n, "vertices");
                double a, b, c, d;
                int col;
                if (!(vs >> a >> b >> c >> d >> col)) throw ConfigError("malformed mesh vertex: " + line);
                mesh.vertices.push_back({{a, b}, {c, d}, col});
            }
        } else if (key == "triangles") {
            for (std::size_t i = 0; i < n; ++i) {
                auto ts = record(i, n, "triangles");
                std::array<int, 3> t;
                if (!(ts >> t[0] >> t[1] >> t[2])) throw ConfigError("malformed mesh triangle: " + line);
                for (int v : t)
                    if (v < 0 || std::size_t(v) >= mesh.vertices.size())
                        throw ConfigError("mesh triangle references a missing vertex: " + line);
                mesh.triangles.push_back(t);
            }
        } else {
            throw ConfigError("malformed mesh file");
        }
    }
    return mesh;
}

}  // namespace sfa
