#pragma once

#include "sfa/cvec.hpp"

namespace sfa {

enum class AiryMethod { series, asymptotic, continuation };

struct AiryResult {
    cplx ai;
    cplx ai_prime;
    AiryMethod method;
};

struct AiryOptions {
    double series_radius = 2.5;
    double asymptotic_radius = 12.0;
};

// Maclaurin series near the origin, Poincare asymptotics far out, and Taylor-series
// continuation of the Airy ODE in between, always integrating in the direction in
// which Ai is the dominant solution.
AiryResult airy_ai(cplx z, const AiryOptions& opt = {});

// Raw evaluators, exposed for cross-checks.
AiryResult airy_series(cplx z);
AiryResult airy_asymptotic(cplx z);

// Branch k of e^{2 pi i k/3} A^{1/3} with negative real part (most negative wins).
int select_branch(cplx A);
cplx branch_root(cplx A, int k);

// Numerical integral of exp(-(i/3) A t^3 + i (omega - omega_hc) t) over the contour
// mapped from the canonical Airy valleys.
cplx airy_contour_check(cplx A, cplx omega_hc, double omega);

}  // namespace sfa
