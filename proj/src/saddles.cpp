#include "sfa/saddles.hpp"

#include <algorithm>
#include <cmath>

#include "sfa/error.hpp"
#include "sfa/parallel.hpp"

namespace sfa {

namespace {

double maxabs(const C2& F) { return std::max(std::abs(F[0]), std::abs(F[1])); }

bool finite(const C2& z) {
    return std::isfinite(z[0].real()) && std::isfinite(z[0].imag()) &&
           std::isfinite(z[1].real()) && std::isfinite(z[1].imag());
}

double dist(const SaddleSolution& a, const SaddleSolution& b) {
    return std::abs(a.t - b.t) + std::abs(a.tp - b.tp);
}

void add_unique(std::vector<SaddleSolution>& set, const SaddleSolution& s, double tol) {
    for (auto& o : set)
        // roots closer than their own error estimates (a numerically double root) are one
        if (dist(o, s) < tol + o.error + s.error) {
            if (s.error < o.error) o = s;
            return;
        }
    set.push_back(s);
}

void sort_by_time(std::vector<SaddleSolution>& set) {
    std::sort(set.begin(), set.end(), [](const auto& a, const auto& b) {
        if (a.t.real() != b.t.real()) return a.t.real() < b.t.real();
        return a.t.imag() < b.t.imag();
    });
}

}  // namespace

namespace {

// Extra full steps after convergence: near a double root Newton only halves the error
// per step while the residual drops quadratically, so the residual test stops far too
// early (error ~ sqrt(tol)) and distinct seeds land on distinct points.
NewtonResult polish(const NewtonSystem& sys, C2 z, C2 F, M2 J, double r, int it) {
    C2 z0 = z;
    double r0 = r;
    bool settled = false;
    for (int k = 0; k < 80 && r > 0; ++k) {
        cplx det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
        if (std::abs(det) == 0 || !std::isfinite(std::abs(det))) break;
        C2 d{(J[1][1] * F[0] - J[0][1] * F[1]) / det, (J[0][0] * F[1] - J[1][0] * F[0]) / det};
        z = {z[0] - d[0], z[1] - d[1]};
        try {
            sys(z, F, J);
        } catch (const Error&) {
            return {z0, r0, it};
        }
        r = maxabs(F);
        if (!std::isfinite(r)) return {z0, r0, it};
        double scale = 1 + std::max(std::abs(z[0]), std::abs(z[1]));
        if (std::max(std::abs(d[0]), std::abs(d[1])) < 1e-10 * scale) {
            settled = true;
            break;
        }
    }
    if (settled && r <= std::max(r0, 1e-13)) return {z, r, it};
    return {z0, r0, it};
}

}  // namespace

NewtonResult newton2(const NewtonSystem& sys, C2 z, double tol, int max_iter, int max_backtrack) {
    C2 F;
    M2 J;
    sys(z, F, J);
    double r = maxabs(F);
    for (int it = 0; it < max_iter; ++it) {
        if (!std::isfinite(r)) throw NonConvergence("non-finite residual");
        if (r < tol) return polish(sys, z, F, J, r, it);
        cplx det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
        if (std::abs(det) == 0 || !std::isfinite(std::abs(det)))
            throw SingularJacobian("singular Jacobian in Newton iteration");
        C2 d{(J[1][1] * F[0] - J[0][1] * F[1]) / det, (J[0][0] * F[1] - J[1][0] * F[0]) / det};
        double step = 1;
        C2 zn, Fn;
        M2 Jn;
        double rn = 0;
        for (int b = 0; b <= max_backtrack; ++b) {
            zn = {z[0] - step * d[0], z[1] - step * d[1]};
            try {
                sys(zn, Fn, Jn);
                rn = maxabs(Fn);
            } catch (const Error&) {
                rn = INFINITY;
            }
            if (std::isfinite(rn) && rn < r) break;
            step *= 0.5;
        }
        if (!std::isfinite(rn) || !finite(zn)) throw NonConvergence("Newton step left the domain");
        double dz = std::max(std::abs(z[0] - zn[0]), std::abs(z[1] - zn[1]));
        double scale = 1 + std::max(std::abs(zn[0]), std::abs(zn[1]));
        z = zn, F = Fn, J = Jn, r = rn;
        // stagnation at machine precision
        if (dz < 1e-15 * scale && r < std::sqrt(tol)) return polish(sys, z, F, J, r, it + 1);
    }
    if (r < tol) return polish(sys, z, F, J, r, max_iter);
    throw NonConvergence("Newton did not converge");
}

bool TimeWindow::admits(cplx t, cplx tp, double w) const {
    cplx wt = w * t, wtp = w * tp;
    return wt.real() >= t_min && wt.real() < t_max && wtp.real() >= tp_min &&
           wtp.real() < tp_max && wtp.imag() > 0 && (wt - wtp).real() > tau_min &&
           std::abs(wt.imag()) < im_t_max;
}

bool TimeWindow::admits_cutoff(cplx t, cplx tp, double w) const {
    cplx wt = w * t, wtp = w * tp;
    return wt.real() >= t_min && wt.real() < t_max && wtp.real() >= tp_min &&
           wtp.real() < tp_max && wtp.imag() > 0 && (wt - wtp).real() > cutoff_tau_min &&
           std::abs(wt.imag()) < cutoff_im_t_max;
}

TimeWindow default_window(const FourierField& f) {
    int order = 2;
    for (const auto& h : f.components())
        if (h.n == 2) order = 3;
    TimeWindow w;
    w.tp_min = -pi / order;
    w.tp_max = pi / order;
    return w;
}

SaddleSolution solve_saddle(const ActionModel& m, double omega, C2 guess, const SolverOptions& opt) {
    NewtonSystem sys = [&](const C2& z, C2& F, M2& J) {
        Partials p = m.partials(z[0], z[1]);
        F = {p.St - omega, p.Sp};
        J = {{{p.Stt, p.Stp}, {p.Stp, p.Spp}}};
    };
    NewtonResult r = newton2(sys, guess, opt.tol, opt.max_iter, opt.max_backtrack);
    SaddleSolution s;
    s.omega = omega;
    s.t = r.z[0];
    s.tp = r.z[1];
    Partials p = m.partials(s.t, s.tp);
    s.bundle = make_bundle(p);
    s.residual = std::max(std::abs(p.St - omega), std::abs(p.Sp));
    cplx det = p.Stt * p.Spp - p.Stp * p.Stp;
    // Newton overshoots a simple root's error by ~1 and a double root's by ~1/2
    if (std::abs(det) > 0)
        s.error = 2 * (std::abs((p.Spp * (p.St - omega) - p.Stp * p.Sp) / det) +
                       std::abs((p.Stt * p.Sp - p.Stp * (p.St - omega)) / det));
    if (auto* v = dynamic_cast<const VolkovAction*>(&m)) {
        s.p_s = v->momentum(s.t, s.tp);
        s.velocity = s.p_s + v->field().A(s.t);
    }
    return s;
}

namespace {

std::vector<SaddleSolution> seeds_at(const ActionModel& m, double omega, const TimeWindow& w,
                                     const SolverOptions& opt) {
    double wf = m.omega(), T = 2 * pi / wf;
    std::vector<SaddleSolution> out;
    for (int deg = 0; deg < 720; deg += 10) {
        double re = deg * pi / 180;
        if (re < w.t_min || re >= w.t_max) continue;
        for (double im : {-0.4, -0.1, 0.1, 0.4})
            for (double exc : {0.3, 0.6, 0.9, 1.2, 1.5, 1.8}) {
                cplx t = cplx(re, im) / wf;
                cplx tp = t - exc * T + cplx(0, 0.3 / wf);
                try {
                    auto s = solve_saddle(m, omega, {t, tp}, opt);
                    if (w.admits(s.t, s.tp, wf)) add_unique(out, s, opt.dedupe);
                } catch (const Error&) {
                }
            }
    }
    sort_by_time(out);
    return out;
}

}  // namespace

std::vector<SaddleSolution> seed_saddles(const ActionModel& m, double omega0, const TimeWindow& w,
                                         const SolverOptions& opt) {
    return seeds_at(m, omega0, w, opt);
}

std::vector<std::vector<SaddleSolution>> solve_cloud(const ActionModel& m,
                                                     const std::vector<double>& grid,
                                                     const TimeWindow& w,
                                                     const SolverOptions& opt, int threads) {
    std::size_t n = grid.size();
    std::vector<std::vector<SaddleSolution>> sets(n);
    parallel_for(n, threads, [&](std::size_t i) { sets[i] = seeds_at(m, grid[i], w, opt); });

    double wf = m.omega();
    auto push = [&](std::size_t from, std::size_t to) {
        bool changed = false;
        for (const auto& s : sets[from]) {
            try {
                auto r = solve_saddle(m, grid[to], {s.t, s.tp}, opt);
                if (!w.admits(r.t, r.tp, wf)) continue;
                std::size_t before = sets[to].size();
                add_unique(sets[to], r, opt.dedupe);
                changed |= sets[to].size() != before;
            } catch (const Error&) {
            }
        }
        return changed;
    };
    for (int pass = 0; pass < 20; ++pass) {
        bool changed = false;
        for (std::size_t i = 0; i + 1 < n; ++i) changed |= push(i, i + 1);
        for (std::size_t i = n; i-- > 1;) changed |= push(i, i - 1);
        if (!changed) break;
    }
    for (auto& s : sets) sort_by_time(s);
    return sets;
}

std::vector<SaddleSolution> continue_orbit(const ActionModel& m, const std::vector<double>& grid,
                                           const SaddleSolution& seed, const SolverOptions& opt) {
    std::vector<SaddleSolution> out;
    if (grid.empty()) return out;
    double jump = opt.jump_threshold / m.omega();
    SaddleSolution cur = solve_saddle(m, grid[0], {seed.t, seed.tp}, opt);
    out.push_back(cur);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        double target = grid[i];
        double h = 1;
        int halvings = 0;
        while (cur.omega != target) {
            double om = (h >= 1) ? target : cur.omega + h * (target - cur.omega);
            bool ok = false;
            try {
                auto s = solve_saddle(m, om, {cur.t, cur.tp}, opt);
                ok = std::abs(s.t - cur.t) < jump;
                if (ok) cur = s;
            } catch (const Error&) {
            }
            if (ok) {
                h = 1;
                halvings = 0;
            } else {
                if (++halvings > opt.max_halvings) throw OrbitLost("continuation lost the orbit");
                h *= 0.5;
            }
        }
        out.push_back(cur);
    }
    return out;
}

HarmonicCutoff solve_cutoff(const ActionModel& m, C2 guess, const SolverOptions& opt) {
    NewtonSystem sys = [&](const C2& z, C2& F, M2& J) {
        Partials p = m.partials(z[0], z[1]);
        cplx N = p.Stt * p.Spp - p.Stp * p.Stp;
        cplx Nt = p.Sttt * p.Spp + p.Stt * p.Stpp - 2.0 * p.Stp * p.Sttp;
        cplx Np = p.Sttp * p.Spp + p.Stt * p.Sppp - 2.0 * p.Stp * p.Stpp;
        F = {N, p.Sp};
        J = {{{Nt, Np}, {p.Stp, p.Spp}}};
    };
    NewtonResult r = newton2(sys, guess, opt.tol, opt.max_iter, opt.max_backtrack);
    Partials p = m.partials(r.z[0], r.z[1]);
    DerivativeBundle b = make_bundle(p);
    HarmonicCutoff c;
    c.t_hc = r.z[0];
    c.tp_hc = r.z[1];
    c.omega_hc = p.St;
    c.A_hc = 0.5 * b.d3S_constrained;
    c.residual = std::max(std::abs(b.d2S_constrained), std::abs(p.Sp));
    c.type = (c.omega_hc.real() - m.Ip() < 0.5 * m.Up()) ? CutoffType::threshold
                                                          : CutoffType::energy;
    return c;
}

std::vector<HarmonicCutoff> find_all_cutoffs(const ActionModel& m, const TimeWindow& w,
                                             const SolverOptions& opt) {
    double wf = m.omega(), T = 2 * pi / wf;
    std::vector<HarmonicCutoff> out;
    for (int deg = 0; deg < 720; deg += 10) {
        double re = deg * pi / 180;
        if (re < w.t_min || re >= w.t_max) continue;
        for (double im : {-0.5, -0.1, 0.1, 0.5})
            for (int k = 0; k < 13; ++k) {
                double exc = 0.1 + 0.15 * k;
                cplx t = cplx(re, im) / wf;
                cplx tp = t - exc * T + cplx(0, 0.5 / wf);
                try {
                    auto c = solve_cutoff(m, {t, tp}, opt);
                    if (!w.admits_cutoff(c.t_hc, c.tp_hc, wf)) continue;
                    bool dup = false;
                    for (const auto& o : out) dup |= std::abs(o.t_hc - c.t_hc) < opt.dedupe;
                    if (!dup) out.push_back(c);
                } catch (const Error&) {
                }
            }
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.t_hc.real() < b.t_hc.real(); });
    return out;
}

bool cutoffs_alternate(const std::vector<HarmonicCutoff>& cs) {
    for (std::size_t i = 1; i < cs.size(); ++i)
        if (cs[i].type == cs[i - 1].type) return false;
    return true;
}

std::vector<double> omega_grid(double start, double stop, double step) {
    std::vector<double> g;
    if (!(step > 0)) return g;
    long n = std::lround(std::floor((stop - start) / step + 1e-9));
    for (long i = 0; i <= n; ++i) g.push_back(start + i * step);
    return g;
}

}  // namespace sfa
