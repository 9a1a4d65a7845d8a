#pragma once

#include "sfa/cvec.hpp"
#include "sfa/waveform.hpp"

namespace sfa {

struct AtomParams {
    double Ip = 0.5;
};

// Partial derivatives of S(t, t') up to third order, (t, t') independent.
struct Partials {
    cplx S, St, Sp;
    cplx Stt, Stp, Spp;
    cplx Sttt, Sttp, Stpp, Sppp;
};

struct DerivativeBundle {
    cplx S_V;
    cplx dS_dt, dS_dtp;
    cplx d2S_dt2, d2S_dtdtp, d2S_dtp2;
    cplx d2S_constrained;
    cplx d3S_constrained;
    // numerator of the constrained second derivative and its gradient
    cplx N, dN_dt, dN_dtp;
};

inline constexpr double coincident_floor = 1e-12;
inline constexpr double denominator_floor = 1e-14;

// Anything providing partials of an action in (t, t'); the Volkov action is the
// physical case, cubic/quadratic models serve as exactly solvable harnesses.
class ActionModel {
public:
    virtual ~ActionModel() = default;
    virtual Partials partials(cplx t, cplx tp) const = 0;
    virtual double omega() const { return 1.0; }
    virtual double Ip() const { return 0.0; }
    virtual double Up() const { return 0.0; }
};

class VolkovAction : public ActionModel {
public:
    VolkovAction(FourierField field, AtomParams atom) : field_(std::move(field)), atom_(atom) {}
    Partials partials(cplx t, cplx tp) const override;
    double omega() const override { return field_.omega(); }
    double Ip() const override { return atom_.Ip; }
    double Up() const override { return field_.ponderomotive(); }
    const FourierField& field() const { return field_; }
    const AtomParams& atom() const { return atom_; }
    CVec2 momentum(cplx t, cplx tp) const;

private:
    FourierField field_;
    AtomParams atom_;
};

// S = (A/3) t^3 + omega_hc t + tp^2/2: cutoff at t = 0, tp = 0.
class CubicModel : public ActionModel {
public:
    CubicModel(cplx A, cplx omega_hc) : A_(A), w_(omega_hc) {}
    Partials partials(cplx t, cplx tp) const override;

private:
    cplx A_, w_;
};

DerivativeBundle make_bundle(const Partials& p);

CVec2 stationary_momentum(const FourierField& f, cplx t, cplx tp);
cplx volkov_action(const FourierField& f, const AtomParams& a, cplx t, cplx tp);
cplx dS_dt(const FourierField& f, const AtomParams& a, cplx t, cplx tp);
cplx dS_dtp(const FourierField& f, const AtomParams& a, cplx t, cplx tp);

struct SecondPartials {
    cplx tt, ttp, tptp;
};
SecondPartials second_partials(const FourierField& f, const AtomParams& a, cplx t, cplx tp);
cplx constrained_d2S(const FourierField& f, const AtomParams& a, cplx t, cplx tp);
cplx constrained_d3S(const FourierField& f, const AtomParams& a, cplx t, cplx tp);

}  // namespace sfa
