#include "sfa/action.hpp"

#include "sfa/error.hpp"

namespace sfa {

namespace {

cplx check_tau(cplx t, cplx tp) {
    cplx tau = t - tp;
    if (std::abs(tau) < coincident_floor) throw CoincidentTimes("t and t' coincide");
    return tau;
}

}  // namespace

CVec2 stationary_momentum(const FourierField& f, cplx t, cplx tp) {
    cplx tau = check_tau(t, tp);
    return -(f.intA(t) - f.intA(tp)) / tau;
}

CVec2 VolkovAction::momentum(cplx t, cplx tp) const { return stationary_momentum(field_, t, tp); }

Partials VolkovAction::partials(cplx t, cplx tp) const {
    const auto& f = field_;
    cplx tau = check_tau(t, tp);
    CVec2 dG = f.intA(t) - f.intA(tp);
    cplx dH = f.intA2(t) - f.intA2(tp);
    CVec2 p = -dG / tau;
    CVec2 v = p + f.A(t), w = p + f.A(tp);
    CVec2 Ft = f.F(t), Fp = f.F(tp);
    double Ip = atom_.Ip;

    Partials r;
    r.S = 0.5 * dH - dot(dG, dG) / (2.0 * tau) + Ip * tau;
    r.St = 0.5 * dot(v, v) + Ip;
    r.Sp = -(0.5 * dot(w, w) + Ip);

    // dp/dt = -v/tau, dp/dt' = w/tau
    CVec2 vt = -v / tau - Ft, vp = w / tau;
    CVec2 wp = w / tau - Fp;
    r.Stt = dot(v, vt);
    r.Stp = dot(v, vp);
    r.Spp = -dot(w, wp);

    CVec2 vtt = -vt / tau + v / (tau * tau) - f.dF(t);
    CVec2 vtp = -vp / tau - v / (tau * tau);
    CVec2 vpp = wp / tau + w / (tau * tau);
    CVec2 wpp = vpp - f.dF(tp);
    r.Sttt = dot(vt, vt) + dot(v, vtt);
    r.Sttp = dot(vp, vt) + dot(v, vtp);
    r.Stpp = dot(vp, vp) + dot(v, vpp);
    r.Sppp = -(dot(wp, wp) + dot(w, wpp));
    return r;
}

Partials CubicModel::partials(cplx t, cplx tp) const {
    Partials r;
    r.S = A_ / 3.0 * t * t * t + w_ * t + 0.5 * tp * tp;
    r.St = A_ * t * t + w_;
    r.Sp = tp;
    r.Stt = 2.0 * A_ * t;
    r.Stp = 0;
    r.Spp = 1;
    r.Sttt = 2.0 * A_;
    r.Sttp = r.Stpp = r.Sppp = 0;
    return r;
}

DerivativeBundle make_bundle(const Partials& p) {
    if (std::abs(p.Spp) < denominator_floor)
        throw DegenerateDenominator("d2S/dt'2 vanishes; constrained derivatives undefined");
    DerivativeBundle b;
    b.S_V = p.S;
    b.dS_dt = p.St;
    b.dS_dtp = p.Sp;
    b.d2S_dt2 = p.Stt;
    b.d2S_dtdtp = p.Stp;
    b.d2S_dtp2 = p.Spp;
    b.N = p.Stt * p.Spp - p.Stp * p.Stp;
    b.dN_dt = p.Sttt * p.Spp + p.Stt * p.Stpp - 2.0 * p.Stp * p.Sttp;
    b.dN_dtp = p.Sttp * p.Spp + p.Stt * p.Sppp - 2.0 * p.Stp * p.Stpp;
    b.d2S_constrained = b.N / p.Spp;
    // d/dt along the constraint, dt'/dt = -Stp/Spp
    cplx Dt = (b.dN_dt * p.Spp - b.N * p.Stpp) / (p.Spp * p.Spp);
    cplx Dp = (b.dN_dtp * p.Spp - b.N * p.Sppp) / (p.Spp * p.Spp);
    b.d3S_constrained = Dt - p.Stp / p.Spp * Dp;
    return b;
}

cplx volkov_action(const FourierField& f, const AtomParams& a, cplx t, cplx tp) {
    return VolkovAction(f, a).partials(t, tp).S;
}

cplx dS_dt(const FourierField& f, const AtomParams& a, cplx t, cplx tp) {
    return VolkovAction(f, a).partials(t, tp).St;
}

cplx dS_dtp(const FourierField& f, const AtomParams& a, cplx t, cplx tp) {
    return VolkovAction(f, a).partials(t, tp).Sp;
}

SecondPartials second_partials(const FourierField& f, const AtomParams& a, cplx t, cplx tp) {
    auto p = VolkovAction(f, a).partials(t, tp);
    return {p.Stt, p.Stp, p.Spp};
}

cplx constrained_d2S(const FourierField& f, const AtomParams& a, cplx t, cplx tp) {
    return make_bundle(VolkovAction(f, a).partials(t, tp)).d2S_constrained;
}

cplx constrained_d3S(const FourierField& f, const AtomParams& a, cplx t, cplx tp) {
    return make_bundle(VolkovAction(f, a).partials(t, tp)).d3S_constrained;
}

}  // namespace sfa
