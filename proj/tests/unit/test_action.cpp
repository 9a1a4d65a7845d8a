#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sfa/action.hpp"
#include "sfa/error.hpp"

using namespace sfa;

namespace {

template <class F>
cplx line_integral(F f, cplx a, cplx b) {
    using boost::math::quadrature::gauss_kronrod;
    auto re = [&](double s) { return (f(a + s * (b - a)) * (b - a)).real(); };
    auto im = [&](double s) { return (f(a + s * (b - a)) * (b - a)).imag(); };
    return {gauss_kronrod<double, 31>::integrate(re, 0, 1, 12, 1e-14),
            gauss_kronrod<double, 31>::integrate(im, 0, 1, 12, 1e-14)};
}

// action from its definition: drift momentum zeroing the excursion, then the
// time integral of the instantaneous kinetic plus binding energy
cplx action_by_quadrature(const FourierField& f, double Ip, cplx t, cplx tp) {
    cplx gx = line_integral([&](cplx s) { return f.A(s).x; }, tp, t);
    cplx gy = line_integral([&](cplx s) { return f.A(s).y; }, tp, t);
    CVec2 p{-gx / (t - tp), -gy / (t - tp)};
    return line_integral([&](cplx s) { CVec2 v = p + f.A(s); return 0.5 * dot(v, v) + Ip; }, tp, t);
}

const double w = 0.057;
const FourierField lin = linear_field(2 * w * std::sqrt(1.0), w);
const FourierField bic = bicircular_field(0.08, 0.6, w);

}  // namespace

TEST_CASE("closed-form action equals the defining integral") {
    for (const auto* f : {&lin, &bic}) {
        VolkovAction S(*f, {0.79});
        for (auto [t, tp] : {std::pair<cplx, cplx>{{70, 4}, {5, 20}}, {{95, -3}, {-8, 14}}}) {
            cplx ref = action_by_quadrature(*f, 0.79, t, tp);
            CHECK(std::abs(S.partials(t, tp).S - ref) < 1e-9 * (1 + std::abs(ref)));
        }
    }
}

TEST_CASE("drift momentum zeroes the excursion") {
    cplx t(80, 2), tp(3, 15);
    CVec2 p = stationary_momentum(bic, t, tp);
    cplx ex = line_integral([&](cplx s) { return p.x + bic.A(s).x; }, tp, t);
    cplx ey = line_integral([&](cplx s) { return p.y + bic.A(s).y; }, tp, t);
    CHECK(std::abs(ex) < 1e-10);
    CHECK(std::abs(ey) < 1e-10);
}

TEST_CASE("analytic partials match finite differences") {
    VolkovAction S(bic, {0.9});
    cplx t(75, 3), tp(6, 18);
    double h = 1e-3;
    auto P = S.partials(t, tp);
    auto dt = [&](auto g) { return (g(t + h, tp) - g(t - h, tp)) / (2 * h); };
    auto dp = [&](auto g) { return (g(t, tp + h) - g(t, tp - h)) / (2 * h); };
    auto s = [&](cplx a, cplx b) { return S.partials(a, b).S; };
    auto st = [&](cplx a, cplx b) { return S.partials(a, b).St; };
    auto sp = [&](cplx a, cplx b) { return S.partials(a, b).Sp; };
    auto stt = [&](cplx a, cplx b) { return S.partials(a, b).Stt; };
    auto stp = [&](cplx a, cplx b) { return S.partials(a, b).Stp; };
    auto spp = [&](cplx a, cplx b) { return S.partials(a, b).Spp; };
    auto close = [](cplx a, cplx b) { return std::abs(a - b) <= 1e-6 * (1e-3 + std::abs(b)); };
    CHECK(close(P.St, dt(s)));
    CHECK(close(P.Sp, dp(s)));
    CHECK(close(P.Stt, dt(st)));
    CHECK(close(P.Stp, dp(st)));
    CHECK(close(P.Spp, dp(sp)));
    CHECK(close(P.Sttt, dt(stt)));
    CHECK(close(P.Sttp, dp(stt)));
    CHECK(close(P.Stpp, dp(stp)));
    CHECK(close(P.Sppp, dp(spp)));
}

TEST_CASE("constrained derivatives follow the ionization-time constraint") {
    VolkovAction S(lin, {0.5});
    auto tp_of = [&](cplx t, cplx tp) {
        // secant solve of dS/dt' = 0 in t' alone
        cplx a = tp, b = tp + 0.5;
        cplx fa = S.partials(t, a).Sp, fb = S.partials(t, b).Sp;
        for (int i = 0; i < 100 && std::abs(fb) > 1e-14; ++i) {
            cplx c = b - fb * (b - a) / (fb - fa);
            a = b, fa = fb, b = c, fb = S.partials(t, b).Sp;
        }
        return b;
    };
    cplx t0(4.3 / w, 0.2 / w);
    cplx tp0 = tp_of(t0, cplx(0.3 / w, 0.6 / w));
    REQUIRE(std::abs(S.partials(t0, tp0).Sp) < 1e-12);
    auto g = [&](cplx t) { cplx tp = tp_of(t, tp0); return S.partials(t, tp).St; };
    // five-point stencils
    double h = 0.2;
    cplx gm2 = g(t0 - 2 * h), gm = g(t0 - h), g0 = g(t0), gp = g(t0 + h), gp2 = g(t0 + 2 * h);
    cplx g1 = (gm2 - 8.0 * gm + 8.0 * gp - gp2) / (12 * h);
    cplx g2 = (-gm2 + 16.0 * gm - 30.0 * g0 + 16.0 * gp - gp2) / (12 * h * h);
    auto b = make_bundle(S.partials(t0, tp0));
    CHECK(std::abs(b.d2S_constrained - g1) < 1e-6 * std::abs(g1));
    CHECK(std::abs(b.d3S_constrained - g2) < 1e-4 * std::abs(g2));
}

TEST_CASE("convenience wrappers agree with the partials") {
    AtomParams a{0.7};
    cplx t(60, 1), tp(2, 10);
    auto P = VolkovAction(bic, a).partials(t, tp);
    CHECK(volkov_action(bic, a, t, tp) == P.S);
    CHECK(dS_dt(bic, a, t, tp) == P.St);
    CHECK(dS_dtp(bic, a, t, tp) == P.Sp);
    CHECK(second_partials(bic, a, t, tp).ttp == P.Stp);
    CHECK(constrained_d2S(bic, a, t, tp) == make_bundle(P).d2S_constrained);
}

TEST_CASE("cubic harness is exact") {
    CubicModel m({0.3, 0.1}, {2.0, 0.5});
    auto b = make_bundle(m.partials({0.4, 0.2}, {0.1, 0}));
    cplx t(0.4, 0.2);
    CHECK(std::abs(b.dS_dt - (cplx(0.3, 0.1) * t * t + cplx(2.0, 0.5))) < 1e-15);
    CHECK(std::abs(b.d2S_constrained - 2.0 * cplx(0.3, 0.1) * t) < 1e-15);
    CHECK(std::abs(b.d3S_constrained - 2.0 * cplx(0.3, 0.1)) < 1e-15);
}

TEST_CASE("degenerate inputs raise typed errors") {
    VolkovAction S(lin, {0.5});
    CHECK_THROWS_AS(S.partials({10, 1}, {10, 1}), CoincidentTimes);
    Partials p{};
    p.Spp = 0;
    CHECK_THROWS_AS(make_bundle(p), DegenerateDenominator);
}
