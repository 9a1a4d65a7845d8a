#pragma once

#include <vector>

#include "sfa/cvec.hpp"

namespace sfa {

struct Harmonic {
    int n = 1;
    CVec2 a;
};

// A(t) = sum_n [a_n e^{-i n w t} + conj(a_n) e^{+i n w t}], F = -A'.
// Entire in t; all action integrals are closed-form.
class FourierField {
public:
    FourierField() = default;
    FourierField(double omega, std::vector<Harmonic> components);

    double omega() const { return omega_; }
    double period() const { return 2 * pi / omega_; }
    const std::vector<Harmonic>& components() const { return comps_; }
    bool is_zero() const;

    CVec2 A(cplx t) const;
    CVec2 F(cplx t) const;
    CVec2 dF(cplx t) const;
    CVec2 intA(cplx t) const;
    cplx intA2(cplx t) const;
    double ponderomotive() const;

private:
    struct Term {
        int k;
        cplx b;
    };
    double omega_ = 1.0;
    std::vector<Harmonic> comps_;
    std::vector<Term> a2_;  // A.A = sum_k b_k e^{-i k w t}
    cplx a2_mean_{};
};

// Linear (eps = 0) field F0 cos(wt) along x; ellipticity eps adds eps*sin along y
// with total intensity kept fixed.
FourierField linear_field(double F0, double omega, double ellipticity = 0.0);

// Counter-rotating w + 2w, F1 = F cos(theta), F2 = F sin(theta).
FourierField bicircular_field(double F, double theta_rad, double omega);

struct LabField {
    double F0;
    double omega;
};

LabField from_experiment(double wavelength_nm, double intensity_W_cm2);

inline double ponderomotive(const FourierField& f) { return f.ponderomotive(); }

constexpr double hartree_eV = 27.211386245988;

}  // namespace sfa
