#include "sfa/waveform.hpp"

#include <map>

#include "sfa/error.hpp"

namespace sfa {

FourierField::FourierField(double omega, std::vector<Harmonic> components)
    : omega_(omega), comps_(std::move(components)) {
    if (!(omega > 0)) throw ConfigError("field frequency must be positive");
    for (const auto& h : comps_)
        if (h.n <= 0) throw ConfigError("harmonic index must be positive");

    // signed-index coefficients c_m, c_{-n} = conj(a_n)
    std::vector<std::pair<int, CVec2>> c;
    for (const auto& h : comps_) {
        c.push_back({h.n, h.a});
        c.push_back({-h.n, conj(h.a)});
    }
    std::map<int, cplx> b;
    for (const auto& [m, cm] : c)
        for (const auto& [m2, cm2] : c) b[m + m2] += dot(cm, cm2);
    for (const auto& [k, bk] : b) {
        if (k == 0)
            a2_mean_ = bk;
        else
            a2_.push_back({k, bk});
    }
}

bool FourierField::is_zero() const {
    for (const auto& h : comps_)
        if (norm(h.a) != 0) return false;
    return true;
}

CVec2 FourierField::A(cplx t) const {
    CVec2 r;
    for (const auto& h : comps_) {
        cplx e = std::exp(-I * double(h.n) * omega_ * t);
        r += h.a * e + conj(h.a) / e;
    }
    return r;
}

CVec2 FourierField::F(cplx t) const {
    CVec2 r;
    for (const auto& h : comps_) {
        double nw = h.n * omega_;
        cplx e = std::exp(-I * nw * t);
        r += (I * nw) * (h.a * e - conj(h.a) / e);
    }
    return r;
}

CVec2 FourierField::dF(cplx t) const {
    CVec2 r;
    for (const auto& h : comps_) {
        double nw = h.n * omega_;
        cplx e = std::exp(-I * nw * t);
        r += (nw * nw) * (h.a * e + conj(h.a) / e);
    }
    return r;
}

CVec2 FourierField::intA(cplx t) const {
    CVec2 r;
    for (const auto& h : comps_) {
        double nw = h.n * omega_;
        cplx e = std::exp(-I * nw * t);
        r += (I / nw) * (h.a * e - conj(h.a) / e);
    }
    return r;
}

cplx FourierField::intA2(cplx t) const {
    cplx r = a2_mean_ * t;
    for (const auto& term : a2_) {
        double kw = term.k * omega_;
        r += term.b * std::exp(-I * kw * t) * (I / kw);
    }
    return r;
}

double FourierField::ponderomotive() const { return 0.5 * a2_mean_.real(); }

FourierField linear_field(double F0, double omega, double eps) {
    double Fn = F0 / std::sqrt(1 + eps * eps);
    Harmonic h{1, {cplx(0, -Fn / (2 * omega)), cplx(eps * Fn / (2 * omega), 0)}};
    return FourierField(omega, {h});
}

FourierField bicircular_field(double F, double theta, double omega) {
    double F1 = F * std::cos(theta), F2 = F * std::sin(theta);
    Harmonic h1{1, {cplx(0, -F1 / (2 * omega)), cplx(F1 / (2 * omega), 0)}};
    Harmonic h2{2, {cplx(0, -F2 / (4 * omega)), cplx(-F2 / (4 * omega), 0)}};
    return FourierField(omega, {h1, h2});
}

LabField from_experiment(double wavelength_nm, double intensity) {
    if (!(wavelength_nm > 0) || !(intensity > 0))
        throw ConfigError("wavelength and intensity must be positive");
    constexpr double I_au = 3.50944758e16;  // W/cm^2
    constexpr double lambda_au = 45.5633525;  // nm * a.u. (2 pi c / lambda)
    return {std::sqrt(intensity / I_au), lambda_au / wavelength_nm};
}

}  // namespace sfa
