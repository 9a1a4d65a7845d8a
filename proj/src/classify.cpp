#include "sfa/classify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sfa/error.hpp"

namespace sfa {

std::string to_string(const OrbitLabel& l) {
    return std::to_string(l.strip_index) + (l.side > 0 ? "+" : "-");
}

Separatrix separatrix(const HarmonicCutoff& c, double eta_floor, double eta_override) {
    if (std::abs(c.A_hc) == 0) throw VanishingCubic("cubic coefficient vanishes at cutoff");
    Separatrix s;
    s.t_hc = c.t_hc;
    s.eta = c.omega_hc.imag();
    double eta = s.eta;
    if (std::abs(eta) < eta_floor) {
        s.degenerate = true;
        eta = eta_override;
    }
    s.delta_t_sep = std::sqrt(-I * eta / c.A_hc);
    if (c.flip_separatrix) s.delta_t_sep = -s.delta_t_sep;
    return s;
}

OrbitLabel classify_one(const SaddleSolution& s, const std::vector<HarmonicCutoff>& cutoffs,
                        const std::vector<Separatrix>& seps) {
    OrbitLabel l;
    if (cutoffs.empty()) {
        l.outside = true;
        return l;
    }
    int k = 0;
    for (std::size_t i = 0; i + 1 < cutoffs.size(); ++i) {
        double mid = 0.5 * (cutoffs[i].t_hc.real() + cutoffs[i + 1].t_hc.real());
        if (s.t.real() >= mid) k = int(i) + 1;
    }
    l.strip_index = k;
    cplx proj = std::conj(s.t - seps[k].t_hc) * seps[k].delta_t_sep;
    // a saddle on the separatrix line itself (a coalescing pair whose tiny eta has the
    // opposite sign of the override) is ordered along the line instead
    double v = std::abs(proj.real()) > 1e-6 * std::abs(proj) ? proj.real() : proj.imag();
    l.side = v >= 0 ? +1 : -1;
    return l;
}

std::vector<OrbitLabel> classify(const std::vector<SaddleSolution>& saddles,
                                 const std::vector<HarmonicCutoff>& cutoffs,
                                 const ClassifyOptions& opt) {
    std::vector<Separatrix> seps;
    for (const auto& c : cutoffs) seps.push_back(separatrix(c, opt.eta_floor, opt.eta_override));
    std::vector<OrbitLabel> out;
    for (const auto& s : saddles) out.push_back(classify_one(s, cutoffs, seps));
    // A pair closer to a degenerate cutoff than eta_floor can resolve straddles the cutoff
    // only to the accuracy of t_hc itself; side it against the pair midpoint instead.
    for (std::size_t k = 0; k < cutoffs.size(); ++k) {
        if (!seps[k].degenerate) continue;
        double radius = 2 * std::sqrt(opt.eta_floor / std::abs(cutoffs[k].A_hc));
        std::vector<std::size_t> near;
        for (std::size_t i = 0; i < saddles.size(); ++i)
            if (out[i].strip_index == int(k) && std::abs(saddles[i].t - cutoffs[k].t_hc) < radius)
                near.push_back(i);
        if (near.size() != 2) continue;
        cplx mid = 0.5 * (saddles[near[0]].t + saddles[near[1]].t);
        cplx proj = std::conj(saddles[near[0]].t - mid) * seps[k].delta_t_sep;
        double v = std::abs(proj.real()) > 1e-6 * std::abs(proj) ? proj.real() : proj.imag();
        out[near[0]].side = v >= 0 ? +1 : -1;
        out[near[1]].side = -out[near[0]].side;
    }
    return out;
}

LabeledCloud classify_cloud(const std::vector<std::vector<SaddleSolution>>& cloud,
                            const std::vector<HarmonicCutoff>& cutoffs,
                            const ClassifyOptions& opt) {
    LabeledCloud out(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        auto labels = classify(cloud[i], cutoffs, opt);
        for (std::size_t j = 0; j < labels.size(); ++j) out[i].push_back({cloud[i][j], labels[j]});
        std::sort(out[i].begin(), out[i].end(),
                  [](const auto& a, const auto& b) { return a.label < b.label; });
    }
    return out;
}

std::size_t AuditReport::energy_families() const {
    return std::count_if(families.begin(), families.end(),
                         [](const Family& f) { return f.touches_energy_cutoff; });
}

namespace {

const LabeledSaddle* find(const std::vector<LabeledSaddle>& v, const OrbitLabel& l) {
    for (const auto& x : v)
        if (x.label == l) return &x;
    return nullptr;
}

struct UnionFind {
    std::vector<int> p;
    explicit UnionFind(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
    int root(int i) { return p[i] == i ? i : p[i] = root(p[i]); }
    void join(int a, int b) { p[root(a)] = root(b); }
};

SaddleSolution interp_solve(const ActionModel& m, const SaddleSolution& a,
                            const SaddleSolution& b, double om) {
    double u = (om - a.omega) / (b.omega - a.omega);
    C2 g{a.t + u * (b.t - a.t), a.tp + u * (b.tp - a.tp)};
    return solve_saddle(m, om, g);
}

// Refines a sign change of part(S_a - S_b) between grid points i and i+1.
double refine_crossing(const ActionModel& m, const LabeledSaddle& a0, const LabeledSaddle& a1,
                       const LabeledSaddle& b0, const LabeledSaddle& b1, bool real_part) {
    auto part = [&](cplx z) { return real_part ? z.real() : z.imag(); };
    double lo = a0.s.omega, hi = a1.s.omega;
    double flo = part(total_action(a0.s) - total_action(b0.s));
    double fhi = part(total_action(a1.s) - total_action(b1.s));
    try {
        for (int it = 0; it < 60 && hi - lo > 1e-12 * std::abs(hi); ++it) {
            double mid = 0.5 * (lo + hi);
            double f = part(total_action(interp_solve(m, a0.s, a1.s, mid)) -
                            total_action(interp_solve(m, b0.s, b1.s, mid)));
            if ((f < 0) == (flo < 0))
                lo = mid, flo = f;
            else
                hi = mid, fhi = f;
        }
    } catch (const Error&) {
    }
    return fhi == flo ? 0.5 * (lo + hi) : lo + (hi - lo) * flo / (flo - fhi);
}

}  // namespace

AuditReport audit_orbits(const ActionModel& m, const LabeledCloud& cloud,
                         const std::vector<HarmonicCutoff>& cutoffs, const AuditOptions& opt) {
    AuditReport rep;
    double w = m.omega();

    std::vector<OrbitLabel> labels;
    for (const auto& row : cloud) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j > 0 && row[j].label == row[j - 1].label) ++rep.duplicates;
            if (std::find(labels.begin(), labels.end(), row[j].label) == labels.end())
                labels.push_back(row[j].label);
        }
    }
    std::sort(labels.begin(), labels.end());
    auto index_of = [&](const OrbitLabel& l) {
        return int(std::lower_bound(labels.begin(), labels.end(), l) - labels.begin());
    };

    // continuity within labels
    for (std::size_t i = 0; i + 1 < cloud.size(); ++i) {
        double lo = cloud[i].empty() ? 0 : cloud[i][0].s.omega;
        double hi = cloud[i + 1].empty() ? 0 : cloud[i + 1][0].s.omega;
        for (const auto& x : cloud[i]) {
            const auto* y = find(cloud[i + 1], x.label);
            if (!y) continue;
            double jump = w * std::abs(y->s.t - x.s.t);
            rep.max_jump_raw = std::max(rep.max_jump_raw, jump);
            bool exempt = false;
            for (std::size_t k = 0; k < cutoffs.size(); ++k) {
                double oc = cutoffs[k].omega_hc.real();
                if (int(k) == x.label.strip_index &&
                    std::abs(cutoffs[k].omega_hc.imag()) < opt.eta_floor &&
                    std::min(lo, hi) <= oc && oc <= std::max(lo, hi))
                    exempt = true;
            }
            if (exempt) {
                rep.exempt.push_back({x.label, lo, hi, jump});
                continue;
            }
            rep.max_jump = std::max(rep.max_jump, jump);
            auto& j = rep.jump_by_label[x.label];
            j = std::max(j, jump);
        }
    }

    // families: labels in adjacent strips linked by omega-continuity
    UnionFind uf(int(labels.size()));
    double jump_abs = opt.jump_threshold / w;
    for (std::size_t i = 0; i + 1 < cloud.size(); ++i) {
        for (const auto& x : cloud[i]) {
            const LabeledSaddle* best = nullptr;
            double bd = INFINITY;
            for (const auto& y : cloud[i + 1]) {
                double d = std::abs(y.s.t - x.s.t);
                if (d < bd) bd = d, best = &y;
            }
            if (best && bd < jump_abs &&
                std::abs(best->label.strip_index - x.label.strip_index) == 1)
                uf.join(index_of(x.label), index_of(best->label));
        }
    }
    std::map<int, Family> fam;
    for (std::size_t j = 0; j < labels.size(); ++j) {
        auto& f = fam[uf.root(int(j))];
        f.labels.push_back(labels[j]);
        int k = labels[j].strip_index;
        if (k >= 0 && k < int(cutoffs.size())) {
            if (cutoffs[k].type == CutoffType::energy)
                f.touches_energy_cutoff = true;
            else
                f.touches_threshold_cutoff = true;
        }
    }
    for (auto& [r, f] : fam) rep.families.push_back(f);

    // Stokes / anti-Stokes per cutoff pair
    for (std::size_t k = 0; k < cutoffs.size(); ++k) {
        PairCrossing pc;
        pc.cutoff_index = int(k);
        pc.a = {int(k), +1};
        pc.b = {int(k), -1};
        double oc = cutoffs[k].omega_hc.real();
        bool energy = cutoffs[k].type == CutoffType::energy;
        pc.drop_above = energy;
        double best_re = INFINITY, best_im = INFINITY;
        std::size_t first = cloud.size(), last = 0;
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            if (find(cloud[i], pc.a) && find(cloud[i], pc.b)) {
                first = std::min(first, i);
                last = i;
            }
        }
        if (first >= last) continue;
        for (std::size_t i = first; i < last; ++i) {
            const auto *a0 = find(cloud[i], pc.a), *b0 = find(cloud[i], pc.b);
            const auto *a1 = find(cloud[i + 1], pc.a), *b1 = find(cloud[i + 1], pc.b);
            if (!a0 || !b0 || !a1 || !b1) continue;
            cplx d0 = total_action(a0->s) - total_action(b0->s);
            cplx d1 = total_action(a1->s) - total_action(b1->s);
            double mid = 0.5 * (a0->s.omega + a1->s.omega);
            if ((d0.real() < 0) != (d1.real() < 0) && std::abs(mid - oc) < best_re) {
                best_re = std::abs(mid - oc);
                pc.has_stokes = true;
                pc.omega_stokes = opt.refine_crossings
                                      ? refine_crossing(m, *a0, *a1, *b0, *b1, true)
                                      : mid;
            }
            if ((d0.imag() < 0) != (d1.imag() < 0) && std::abs(mid - oc) < best_im) {
                best_im = std::abs(mid - oc);
                pc.has_anti_stokes = true;
                pc.omega_anti_stokes = opt.refine_crossings
                                           ? refine_crossing(m, *a0, *a1, *b0, *b1, false)
                                           : mid;
            }
        }
        // at an exact coalescence both lines pass through the cutoff itself
        if (std::abs(cutoffs[k].omega_hc.imag()) < opt.eta_floor) {
            pc.has_stokes = pc.has_anti_stokes = true;
            pc.omega_stokes = pc.omega_anti_stokes = oc;
        }
        // growing member: larger Im S (|e^{-iS}| = e^{Im S}) at the far evanescent end
        std::size_t far = energy ? last : first;
        const auto *fa = find(cloud[far], pc.a), *fb = find(cloud[far], pc.b);
        pc.dropped = total_action(fa->s).imag() > total_action(fb->s).imag() ? pc.a : pc.b;
        rep.crossings.push_back(pc);
    }
    return rep;
}

std::vector<QuantumOrbit> orbits_by_label(const LabeledCloud& cloud) {
    std::map<OrbitLabel, QuantumOrbit> m;
    for (const auto& row : cloud)
        for (const auto& x : row) {
            auto& o = m[x.label];
            o.label = x.label;
            o.points.push_back(x.s);
        }
    std::vector<QuantumOrbit> out;
    for (auto& [l, o] : m) out.push_back(std::move(o));
    return out;
}

}  // namespace sfa
