#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sfa/error.hpp"
#include "sfa/specfun.hpp"
#include "support/airy_oracle.hpp"

using namespace sfa;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("values at the origin") {
    auto r = airy_ai(0.0);
    CHECK(r.ai.real() == doctest::Approx(0.355028053887817239).epsilon(1e-15));
    CHECK(r.ai_prime.real() == doctest::Approx(-0.258819403792806798).epsilon(1e-15));
    CHECK(r.method == AiryMethod::series);
}

TEST_CASE("agreement with the arbitrary-precision series in every method region") {
    for (cplx z : {cplx(1.2, -0.7), cplx(-2, 1), cplx(5, 3), cplx(-7, -4), cplx(0.5, 9), cplx(15, -6),
                   cplx(-20, 2), cplx(3, 25)}) {
        auto [ai, aip] = oracle::airy(z);
        auto r = airy_ai(z);
        CHECK(rel(r.ai, ai) < 1e-11);
        CHECK(rel(r.ai_prime, aip) < 1e-11);
    }
}

TEST_CASE("method regions") {
    CHECK(airy_ai({1, 1}).method == AiryMethod::series);
    CHECK(airy_ai({6, -4}).method == AiryMethod::continuation);
    CHECK(airy_ai({-20, 5}).method == AiryMethod::asymptotic);
}

TEST_CASE("rotation identity Ai(z) + w Ai(w z) + w^2 Ai(w^2 z) = 0") {
    cplx w = std::polar(1.0, 2 * pi / 3);
    for (cplx z : {cplx(0.3, 0.1), cplx(3, -2), cplx(-6, 4), cplx(9, 1)}) {
        cplx s = airy_ai(z).ai + w * airy_ai(w * z).ai + w * w * airy_ai(w * w * z).ai;
        double scale = std::abs(airy_ai(z).ai) + std::abs(airy_ai(w * z).ai) + std::abs(airy_ai(w * w * z).ai);
        CHECK(std::abs(s) < 1e-12 * scale);
    }
}

TEST_CASE("asymptotic expansion is accurate from its switching radius on") {
    for (double a : {-3.1, -2.5, -1.0, 0.0, 1.0, 2.5}) {
        cplx z = std::polar(AiryOptions{}.asymptotic_radius, a);
        auto [ai, aip] = oracle::airy(z);
        auto p = airy_asymptotic(z);
        CHECK(rel(p.ai, ai) < 1e-11);
        CHECK(rel(p.ai_prime, aip) < 1e-11);
    }
}

TEST_CASE("series is accurate inside its switching radius") {
    for (double a : {-3.1, -1.0, 0.0, 2.0}) {
        cplx z = std::polar(AiryOptions{}.series_radius, a);
        auto [ai, aip] = oracle::airy(z);
        CHECK(rel(airy_series(z).ai, ai) < 1e-13);
    }
}

TEST_CASE("oversized arguments are reported") {
    CHECK_THROWS_AS(airy_ai(1e5), AiryOverflow);
    CHECK_THROWS_AS(airy_ai(cplx(NAN, 0)), AiryOverflow);
    // oscillatory on the negative axis, so large |z| there is still finite
    CHECK(std::isfinite(std::abs(airy_ai(-9000.0).ai)));
}

TEST_CASE("branch selection picks the most negative real cube root") {
    for (double arg : {-2.9, -1.0, 0.0, 0.5, 2.0, 3.1}) {
        cplx A = std::polar(2.0, arg);
        int k = select_branch(A);
        cplx X = branch_root(A, k);
        CHECK(std::abs(X * X * X - A) < 1e-13);
        for (int j = 0; j < 3; ++j) CHECK(X.real() <= branch_root(A, j).real());
        CHECK(X.real() < 0);
    }
    CHECK_THROWS_AS(select_branch(0.0), NoValidBranch);
}

TEST_CASE("contour quadrature reproduces 2 pi Ai(z) / X") {
    cplx A = std::polar(1.5, 0.3), Ohc(2.0, 0.4);
    cplx X = branch_root(A, select_branch(A));
    for (double om : {-6.0, 0.0, 2.0, 5.0, 10.0}) {
        cplx ref = 2 * pi * airy_ai((Ohc - om) / X).ai / X;
        CHECK(rel(airy_contour_check(A, Ohc, om), ref) < 1e-8);
    }
}
