#include "sfa/spectra.hpp"

#include <algorithm>
#include <map>

#include "sfa/error.hpp"
#include "sfa/specfun.hpp"

namespace sfa {

namespace {

constexpr double sqrt_pi = 1.772453850905516027298;

CVec2 elements(const Prefactor& pf, cplx tau, const CVec2& v) {
    cplx g = 1;
    if (pf.model != PrefactorModel::unity) {
        cplx r = std::sqrt(2 * pi / (I * tau));
        g = r * r * r;
    }
    if (pf.model == PrefactorModel::short_range_s_state) return g * pf.matrix_elements(v);
    return {g, 0};
}

// Branch-sensitive Gaussian factors of one saddle: sqrt(2pi/(i Spp)), sqrt(2pi/(i d2S)).
std::pair<cplx, cplx> gauss_factors(const SaddleSolution& s) {
    return {std::sqrt(2 * pi / (I * s.bundle.d2S_dtp2)),
            std::sqrt(2 * pi / (I * s.bundle.d2S_constrained))};
}

cplx cbrt_principal(cplx w) { return std::pow(w, 1.0 / 3.0); }

}  // namespace

CVec2 Prefactor::matrix_elements(const CVec2& v) const {
    // zero-range s state: psi(k) = sqrt(kappa)/(pi (k^2 + kappa^2)), Upsilon constant
    double kappa = std::sqrt(2 * Ip);
    cplx den = dot(v, v) + kappa * kappa;
    return (I * kappa / (pi * pi * den * den)) * v;
}

PrefactorModel parse_prefactor(const std::string& s) {
    if (s == "unity") return PrefactorModel::unity;
    if (s == "tau_dispersion_only") return PrefactorModel::tau_dispersion_only;
    if (s == "short_range_s_state") return PrefactorModel::short_range_s_state;
    throw ConfigError("unknown prefactor model: " + s);
}

std::string to_string(PrefactorModel m) {
    switch (m) {
        case PrefactorModel::unity: return "unity";
        case PrefactorModel::tau_dispersion_only: return "tau_dispersion_only";
        case PrefactorModel::short_range_s_state: return "short_range_s_state";
    }
    return "?";
}

CVec2 spa_amplitude(const SaddleSolution& s, const Prefactor& pf) {
    auto [gp, gt] = gauss_factors(s);
    return (gp * gt * std::exp(-I * total_action(s))) * elements(pf, s.t - s.tp, s.velocity);
}

std::vector<FamilyTrack> family_tracks(const LabeledCloud& cloud, const AuditReport& audit,
                                       const Prefactor& pf) {
    std::vector<FamilyTrack> out;
    for (std::size_t f = 0; f < audit.families.size(); ++f) {
        const auto& fam = audit.families[f];
        FamilyTrack tr;
        tr.id = int(f);
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            const LabeledSaddle* pick = nullptr;
            for (const auto& x : cloud[i]) {
                if (std::find(fam.labels.begin(), fam.labels.end(), x.label) == fam.labels.end())
                    continue;
                if (!pick || (!tr.points.empty() && std::abs(x.s.t - tr.points.back().t) <
                                                        std::abs(pick->s.t - tr.points.back().t)))
                    pick = &x;
            }
            if (!pick) continue;
            tr.grid_index.push_back(i);
            tr.points.push_back(pick->s);
            tr.labels.push_back(pick->label);
        }
        std::size_t n = tr.points.size();
        if (n == 0) continue;

        // branch factors: orient the most-real point forward, then unwrap both ways
        std::vector<cplx> b(n);
        std::size_t i0 = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (std::abs(tr.points[i].t.imag()) < std::abs(tr.points[i0].t.imag())) i0 = i;
        {
            auto [gp, gt] = gauss_factors(tr.points[i0]);
            if (gp.real() < 0) gp = -gp;
            if (gt.real() < 0) gt = -gt;
            b[i0] = gp * gt;
        }
        auto step = [&](std::size_t i, std::size_t prev) {
            auto [gp, gt] = gauss_factors(tr.points[i]);
            cplx raw = gp * gt;
            if (std::abs(std::arg(raw / b[prev])) > pi / 2) raw = -raw;
            if (std::abs(std::arg(raw / b[prev])) > pi / 2)
                throw BranchTracking("phase jump above pi/2 along an orbit");
            b[i] = raw;
        };
        for (std::size_t i = i0 + 1; i < n; ++i) step(i, i - 1);
        for (std::size_t i = i0; i-- > 0;) step(i, i + 1);

        for (std::size_t i = 0; i < n; ++i) {
            const auto& s = tr.points[i];
            tr.amplitude.push_back((b[i] * std::exp(-I * total_action(s))) *
                                   elements(pf, s.t - s.tp, s.velocity));
        }
        out.push_back(std::move(tr));
    }
    return out;
}

namespace {

bool dropped(const AuditReport& audit, const OrbitLabel& l, double omega) {
    for (const auto& pc : audit.crossings) {
        if (!pc.has_stokes || !(pc.dropped == l)) continue;
        if (pc.drop_above ? omega > pc.omega_stokes : omega < pc.omega_stokes) return true;
    }
    return false;
}

}  // namespace

std::vector<SpectrumLine> spa_spectrum(const std::vector<FamilyTrack>& tracks,
                                       const AuditReport& audit, const std::vector<double>& grid) {
    std::vector<SpectrumLine> lines(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) lines[i].omega = grid[i];
    for (const auto& tr : tracks)
        for (std::size_t j = 0; j < tr.points.size(); ++j) {
            auto& line = lines[tr.grid_index[j]];
            bool inc = !dropped(audit, tr.labels[j], line.omega);
            line.orbits.push_back({tr.id, tr.labels[j], tr.amplitude[j], inc});
            if (inc) line.spa += tr.amplitude[j];
            line.has_spa = true;
        }
    return lines;
}

std::vector<std::optional<CVec2>> uniform_approx(const FamilyTrack& a, const FamilyTrack& b,
                                                 std::size_t grid_size) {
    std::vector<std::optional<CVec2>> out(grid_size);
    std::map<std::size_t, std::size_t> ia, ib;
    for (std::size_t j = 0; j < a.grid_index.size(); ++j) ia[a.grid_index[j]] = j;
    for (std::size_t j = 0; j < b.grid_index.size(); ++j) ib[b.grid_index[j]] = j;
    std::vector<std::size_t> common;
    for (const auto& [g, j] : ia)
        if (ib.count(g)) common.push_back(g);
    if (common.empty()) throw PairMismatch("orbit pair shares no omega points");

    auto pre = [](const FamilyTrack& t, std::size_t j) {
        return t.amplitude[j] * std::exp(I * total_action(t.points[j]));
    };
    auto S = [](const FamilyTrack& t, std::size_t j) { return total_action(t.points[j]); };

    // start where both saddles are closest to the real axis (deep plateau)
    std::size_t c0 = 0;
    double best = INFINITY;
    for (std::size_t c = 0; c < common.size(); ++c) {
        double im = std::max(std::abs(a.points[ia[common[c]]].t.imag()),
                             std::abs(b.points[ib[common[c]]].t.imag()));
        if (im < best) best = im, c0 = c;
    }
    // phi = -S; w = (3/4)(phi_- - phi_+) = (3/4)(S_+ - S_-)
    bool a_plus;
    {
        cplx w = 0.75 * (S(a, ia[common[c0]]) - S(b, ib[common[c0]]));
        a_plus = w.real() > 0;
    }
    std::vector<cplx> s(common.size()), q(common.size());
    auto eval = [&](std::size_t c, const cplx* s_prev, const cplx* q_prev) {
        std::size_t g = common[c];
        const FamilyTrack& P = a_plus ? a : b;
        const FamilyTrack& M = a_plus ? b : a;
        std::size_t jp = a_plus ? ia[g] : ib[g], jm = a_plus ? ib[g] : ia[g];
        cplx Sp = S(P, jp), Sm = S(M, jm);
        cplx w = 0.75 * (Sp - Sm);
        cplx sc = cbrt_principal(w);
        if (s_prev) {
            cplx bestc = sc;
            for (int k = 1; k < 3; ++k) {
                cplx cand = sc * std::exp(2 * pi * I * double(k) / 3.0);
                if (std::abs(cand - *s_prev) < std::abs(bestc - *s_prev)) bestc = cand;
            }
            sc = bestc;
        }
        cplx qc = std::sqrt(sc);
        if (q_prev && std::abs(-qc - *q_prev) < std::abs(qc - *q_prev)) qc = -qc;
        s[c] = sc;
        q[c] = qc;
        cplx z = sc * sc;
        CVec2 Pp = pre(P, jp) * (qc * std::exp(-I * pi / 4.0) / sqrt_pi);
        CVec2 Pm = pre(M, jm) * (qc * std::exp(I * pi / 4.0) / sqrt_pi);
        CVec2 p = 0.5 * (Pp + Pm), dq = (Pp - Pm) / (2.0 * sc);
        auto ai = airy_ai(-z);
        cplx phase = std::exp(-0.5 * I * (Sp + Sm));
        out[g] = (2 * pi * phase) * (ai.ai * p - (I * ai.ai_prime) * dq);
    };
    eval(c0, nullptr, nullptr);
    for (std::size_t c = c0 + 1; c < common.size(); ++c) eval(c, &s[c - 1], &q[c - 1]);
    for (std::size_t c = c0; c-- > 0;) eval(c, &s[c + 1], &q[c + 1]);
    return out;
}

void add_uniform(std::vector<SpectrumLine>& lines, const std::vector<FamilyTrack>& tracks,
                 const AuditReport& audit, const std::vector<HarmonicCutoff>& cutoffs) {
    auto track_with = [&](const OrbitLabel& l) -> const FamilyTrack* {
        for (const auto& t : tracks)
            if (std::find(t.labels.begin(), t.labels.end(), l) != t.labels.end()) return &t;
        return nullptr;
    };
    std::vector<int> paired;
    std::vector<std::vector<std::optional<CVec2>>> uas;
    for (std::size_t k = 0; k < cutoffs.size(); ++k) {
        if (cutoffs[k].type != CutoffType::energy) continue;
        const auto* a = track_with({int(k), +1});
        const auto* b = track_with({int(k), -1});
        if (!a || !b || a == b) throw MissingPair("energy cutoff without two adjacent orbits");
        uas.push_back(uniform_approx(*a, *b, lines.size()));
        paired.push_back(a->id);
        paired.push_back(b->id);
    }
    (void)audit;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto& line = lines[i];
        line.ua = CVec2{};
        std::vector<int> covered;
        for (std::size_t p = 0; p < uas.size(); ++p)
            if (uas[p][i]) {
                line.ua += *uas[p][i];
                covered.push_back(paired[2 * p]);
                covered.push_back(paired[2 * p + 1]);
            }
        for (const auto& o : line.orbits)
            if (o.included && std::find(covered.begin(), covered.end(), o.family) == covered.end())
                line.ua += o.amplitude;
        line.has_ua = true;
    }
}

namespace {

cplx hca_scalar(const ActionModel& m, const HarmonicCutoff& c, double omega, cplx X, cplx shift,
                const Prefactor& pf, CVec2& f) {
    Partials p = m.partials(c.t_hc, c.tp_hc);
    CVec2 v;
    if (auto* vm = dynamic_cast<const VolkovAction*>(&m))
        v = vm->momentum(c.t_hc, c.tp_hc) + vm->field().A(c.t_hc);
    f = elements(pf, c.t_hc - c.tp_hc, v);
    cplx g = std::sqrt(2 * pi / (I * p.Spp));
    cplx ai = airy_ai((shift - omega) / X).ai;
    return g * (2 * pi / X) * std::exp(-I * p.S + I * omega * c.t_hc) * ai;
}

}  // namespace

CVec2 hca_term(const ActionModel& m, const HarmonicCutoff& c, double omega, const Prefactor& pf) {
    cplx X = branch_root(c.A_hc, select_branch(c.A_hc));
    CVec2 f;
    cplx s = hca_scalar(m, c, omega, X, c.omega_hc, pf, f);
    return s * f;
}

std::vector<CVec2> hca_spectrum(const ActionModel& m, const std::vector<HarmonicCutoff>& cutoffs,
                                const std::vector<double>& grid, const Prefactor& pf) {
    std::vector<CVec2> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (const auto& c : cutoffs) out[i] += hca_term(m, c, grid[i], pf);
    return out;
}

std::vector<CVec2> hca_qpi_variant(const ActionModel& m, const HarmonicCutoff& c,
                                   const QpiOptions& q, const std::vector<double>& grid,
                                   const Prefactor& pf) {
    cplx X = q.full_contrast ? cplx(-std::cbrt(std::abs(c.A_hc)), 0)
                             : branch_root(c.A_hc, select_branch(c.A_hc));
    cplx shift(c.omega_hc.real(), q.r * c.omega_hc.imag());
    std::vector<CVec2> out;
    for (double om : grid) {
        CVec2 f;
        cplx s = hca_scalar(m, c, om, X, shift, pf, f);
        out.push_back(s * f);
    }
    return out;
}

}  // namespace sfa
