#include "sfa/specfun.hpp"

#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <vector>

#include "sfa/error.hpp"

namespace sfa {

namespace {

constexpr double ai0 = 0.355028053887817239260;
constexpr double aip0 = -0.258819403792806798405;
constexpr double sqrt_pi = 1.772453850905516027298;

// u_k and v_k of the Airy asymptotic expansions
const std::array<double, 41>& u_coef() {
    static const auto u = [] {
        std::array<double, 41> c{};
        c[0] = 1;
        for (int k = 1; k < 41; ++k)
            c[k] = c[k - 1] * (6.0 * k - 5) * (6.0 * k - 3) * (6.0 * k - 1) / ((2.0 * k - 1) * 216 * k);
        return c;
    }();
    return u;
}

double v_coef(int k) { return k == 0 ? 1 : -(6.0 * k + 1) / (6.0 * k - 1) * u_coef()[k]; }

// sum over k = 2j + parity of s^j c_k x^{-k}, s = -1 if alternating, optimally truncated
template <class Coef>
cplx asym_sum(Coef c, cplx inv, int parity, bool alternate) {
    cplx s = 0, p = parity ? inv : 1.0, inv2 = inv * inv;
    double prev = INFINITY;
    for (int j = 0; 2 * j + parity < 41; ++j) {
        int k = 2 * j + parity;
        cplx term = (alternate && j % 2 ? -1.0 : 1.0) * c(k) * p;
        double a = std::abs(term);
        if (a > prev) break;
        s += term;
        if (a < 1e-17 * std::abs(s)) break;
        prev = a;
        p *= inv2;
    }
    return s;
}

AiryResult taylor_walk(cplx z0, cplx y, cplx dy, cplx z1) {
    cplx span = z1 - z0;
    int n = std::max(1, int(std::ceil(std::abs(span) / 0.5)));
    cplx h = span / double(n);
    for (int s = 0; s < n; ++s) {
        cplx a_prev2 = 0, a_prev = y, a_cur = dy;  // a_{n-1}, a_n, a_{n+1}
        cplx yn = y + dy * h, dyn = dy;
        cplx hp = h;  // h^{n}
        double scale = std::abs(y) + std::abs(dy) * std::abs(h);
        for (int k = 0; k < 120; ++k) {
            // a_{k+2} = (z0 a_k + a_{k-1}) / ((k+1)(k+2))
            cplx a_next = (z0 * a_prev + a_prev2) / double((k + 1) * (k + 2));
            a_prev2 = a_prev;
            a_prev = a_cur;
            a_cur = a_next;
            dyn += double(k + 2) * a_next * hp;
            hp *= h;
            cplx term = a_next * hp;
            yn += term;
            if (k > 4 && std::abs(term) < 1e-18 * scale && std::abs(a_prev * hp / h) < 1e-18 * scale)
                break;
        }
        y = yn;
        dy = dyn;
        z0 += h;
    }
    return {y, dy, AiryMethod::continuation};
}

}  // namespace

AiryResult airy_series(cplx z) {
    cplx z3 = z * z * z;
    cplx f = 1, g = z, fp = 0, gp = 1;
    cplx tf = 1, tg = z, tfp = z * z / 2.0, tgp = 1;
    fp = tfp;
    for (int k = 1; k < 200; ++k) {
        tf *= z3 / ((3.0 * k - 1) * (3.0 * k));
        tg *= z3 / ((3.0 * k) * (3.0 * k + 1));
        tgp *= z3 / ((3.0 * k - 2) * (3.0 * k));
        f += tf;
        g += tg;
        gp += tgp;
        if (k >= 2) {
            tfp *= z3 / ((3.0 * k - 3) * (3.0 * k - 1));
            fp += tfp;
        }
        double mag = std::abs(tf) + std::abs(tg) + std::abs(tfp) + std::abs(tgp);
        if (mag < 1e-18 * (std::abs(f) + std::abs(g) + std::abs(fp) + std::abs(gp))) break;
    }
    return {ai0 * f + aip0 * g, ai0 * fp + aip0 * gp, AiryMethod::series};
}

AiryResult airy_asymptotic(cplx z) {
    const auto& u = u_coef();
    auto uc = [&](int k) { return u[k]; };
    if (std::abs(std::arg(z)) <= 2 * pi / 3) {
        cplx zeta = 2.0 / 3.0 * z * std::sqrt(z);
        if (-zeta.real() > 700) throw AiryOverflow("Ai overflows at this argument");
        cplx inv = 1.0 / zeta, q = std::pow(z, 0.25), e = std::exp(-zeta);
        // full alternating sums: sum (-1)^k c_k zeta^{-k}
        cplx su = asym_sum(uc, inv, 0, false) - asym_sum(uc, inv, 1, false);
        cplx sv = asym_sum(v_coef, inv, 0, false) - asym_sum(v_coef, inv, 1, false);
        return {e / (2 * sqrt_pi * q) * su, -q * e / (2 * sqrt_pi) * sv, AiryMethod::asymptotic};
    }
    cplx x = -z;
    cplx xi = 2.0 / 3.0 * x * std::sqrt(x);
    if (std::abs(xi.imag()) > 700) throw AiryOverflow("Ai overflows at this argument");
    cplx inv = 1.0 / xi, q = std::pow(x, 0.25);
    cplx c = std::cos(xi - pi / 4), s = std::sin(xi - pi / 4);
    cplx ai = (c * asym_sum(uc, inv, 0, true) + s * asym_sum(uc, inv, 1, true)) / (sqrt_pi * q);
    cplx aip = q / sqrt_pi * (s * asym_sum(v_coef, inv, 0, true) - c * asym_sum(v_coef, inv, 1, true));
    return {ai, aip, AiryMethod::asymptotic};
}

AiryResult airy_ai(cplx z, const AiryOptions& opt) {
    double r = std::abs(z);
    if (!std::isfinite(r)) throw AiryOverflow("non-finite Airy argument");
    if (r > 1e4) throw AiryOverflow("Airy argument beyond |z| <= 1e4");
    if (r <= opt.series_radius) return airy_series(z);
    if (r >= opt.asymptotic_radius) return airy_asymptotic(z);
    cplx dir = z / r;
    AiryResult res;
    if (std::abs(std::arg(z)) < pi / 3) {
        // Ai recessive outward: integrate inward from the asymptotic region
        cplx z0 = dir * opt.asymptotic_radius;
        auto a = airy_asymptotic(z0);
        res = taylor_walk(z0, a.ai, a.ai_prime, z);
    } else {
        cplx z0 = dir * opt.series_radius;
        auto a = airy_series(z0);
        res = taylor_walk(z0, a.ai, a.ai_prime, z);
    }
    if (z.imag() == 0) res.ai.imag(0), res.ai_prime.imag(0);
    return res;
}

cplx branch_root(cplx A, int k) {
    return std::exp(2.0 * pi * I * double(k) / 3.0) * std::pow(A, 1.0 / 3.0);
}

int select_branch(cplx A) {
    if (std::abs(A) == 0) throw NoValidBranch("cubic coefficient vanishes");
    int best = -1;
    double bre = 0;
    for (int k = 0; k < 3; ++k) {
        double re = branch_root(A, k).real();
        if (re < bre) bre = re, best = k;
    }
    if (best < 0) throw NoValidBranch("no branch with negative real part");
    return best;
}

cplx airy_contour_check(cplx A, cplx omega_hc, double omega) {
    int k = select_branch(A);
    cplx X = branch_root(A, k);
    cplx z = (omega_hc - omega) / X;
    // integrand in the original variable t = s / (i X), s on the canonical contour
    auto phase = [&](cplx s) { return s * s * s / 3.0 - z * s; };
    auto f_t = [&](cplx t) { return std::exp(-I / 3.0 * A * t * t * t + I * (omega - omega_hc) * t); };

    cplx sr = std::sqrt(z);
    cplx s_lo = sr.imag() < -sr.imag() ? sr : -sr, s_hi = -s_lo;
    cplx s_right = sr.real() >= 0 ? sr : -sr, s_left = -s_right;
    double R = std::sqrt(std::abs(z)) + 8;
    cplx start = R * std::exp(-I * pi / 3.0), end = R * std::exp(I * pi / 3.0);

    std::vector<std::vector<cplx>> paths = {
        {start, s_right, end}, {start, s_lo, s_hi, end}, {start, s_left, end}, {start, 0.0, end}};
    auto peak = [&](const std::vector<cplx>& p) {
        double m = -INFINITY;
        for (std::size_t i = 0; i + 1 < p.size(); ++i)
            for (int j = 0; j <= 200; ++j) m = std::max(m, phase(p[i] + (p[i + 1] - p[i]) * (j / 200.0)).real());
        return m;
    };
    const std::vector<cplx>* best = &paths[0];
    double bp = INFINITY;
    for (const auto& p : paths) {
        double v = peak(p);
        if (v < bp) bp = v, best = &p;
    }

    cplx jac = 1.0 / (I * X);
    cplx total = 0;
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    for (std::size_t i = 0; i + 1 < best->size(); ++i) {
        cplx a = (*best)[i], b = (*best)[i + 1];
        auto g = [&](double u) { return f_t((a + (b - a) * u) * jac) * (b - a) * jac; };
        total += GK::integrate(g, 0.0, 1.0, 15, 1e-12);
    }
    return total;
}

}  // namespace sfa
