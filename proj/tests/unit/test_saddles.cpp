#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "sfa/error.hpp"
#include "sfa/saddles.hpp"

using namespace sfa;

namespace {

struct Neon {
    LabField lab = from_experiment(800, 2e14);
    double w = lab.omega;
    VolkovAction m{linear_field(lab.F0, lab.omega), {21.5645 / hartree_eV}};
    TimeWindow win = default_window(m.field());
};

const Neon& neon() {
    static Neon n;
    return n;
}

}  // namespace

TEST_CASE("newton finds a simple root of a 2x2 system") {
    // z0^2 + z1^2 = 5, z0 z1 = 2  ->  (1, 2) from a nearby guess
    NewtonSystem sys = [](const C2& z, C2& F, M2& J) {
        F = {z[0] * z[0] + z[1] * z[1] - 5.0, z[0] * z[1] - 2.0};
        J = {{{2.0 * z[0], 2.0 * z[1]}, {z[1], z[0]}}};
    };
    auto r = newton2(sys, {cplx(1.2, 0.1), cplx(1.7, -0.1)});
    CHECK(std::abs(r.z[0] - 1.0) < 1e-12);
    CHECK(std::abs(r.z[1] - 2.0) < 1e-12);
    CHECK(r.residual < 1e-12);
    CHECK(r.iterations < 8);
}

TEST_CASE("newton polishes a double root beyond the residual tolerance") {
    // (z0 - 1)^2 = 0 with z1 = 2: residual reaches 1e-10 while z0 is still ~1e-5 off
    NewtonSystem sys = [](const C2& z, C2& F, M2& J) {
        F = {(z[0] - 1.0) * (z[0] - 1.0), z[1] - 2.0};
        J = {{{2.0 * (z[0] - 1.0), 0.0}, {0.0, 1.0}}};
    };
    auto r = newton2(sys, {cplx(1.3, 0.2), cplx(2.1)});
    CHECK(std::abs(r.z[0] - 1.0) < 1e-8);
}

TEST_CASE("newton reports a singular jacobian") {
    NewtonSystem sys = [](const C2& z, C2& F, M2& J) {
        F = {z[0] + z[1] - 1.0, z[0] + z[1] - 1.0 + 1e-3};
        J = {{{1.0, 1.0}, {1.0, 1.0}}};
    };
    CHECK_THROWS_AS(newton2(sys, {cplx(0), cplx(0)}), SingularJacobian);
}

TEST_CASE("cubic harness: saddles and cutoff in closed form") {
    cplx A = std::polar(1.3, 0.4), Ohc(2.0, -0.7);
    CubicModel m(A, Ohc);
    double om = 5.0;
    cplx root = std::sqrt((om - Ohc) / A);
    for (cplx sgn : {1.0, -1.0}) {
        auto s = solve_saddle(m, om, {sgn * root * 1.1, cplx(0.05)});
        CHECK(std::abs(s.t - sgn * root) < 1e-12);
        CHECK(std::abs(s.tp) < 1e-12);
        CHECK(s.error < 1e-10);
    }
    auto c = solve_cutoff(m, {cplx(0.2, 0.1), cplx(-0.1, 0.05)});
    CHECK(std::abs(c.t_hc) < 1e-12);
    CHECK(std::abs(c.tp_hc) < 1e-12);
    CHECK(std::abs(c.omega_hc - Ohc) < 1e-12);
    CHECK(std::abs(c.A_hc - A) < 1e-12);
}

TEST_CASE("linear field saddles satisfy the energy conservation conditions") {
    const auto& n = neon();
    double om = 30 * n.w;
    auto seeds = seed_saddles(n.m, om, n.win);
    REQUIRE(seeds.size() >= 4);
    for (const auto& s : seeds) {
        CVec2 p = n.m.momentum(s.t, s.tp);
        CVec2 v = p + n.m.field().A(s.t), u = p + n.m.field().A(s.tp);
        CHECK(std::abs(0.5 * dot(u, u) + n.m.Ip()) < 1e-9);
        CHECK(std::abs(0.5 * dot(v, v) + n.m.Ip() - om) < 1e-9);
        CHECK(n.win.admits(s.t, s.tp, n.w));
    }
    // distinct roots
    for (std::size_t i = 0; i < seeds.size(); ++i)
        for (std::size_t j = i + 1; j < seeds.size(); ++j)
            CHECK(std::abs(seeds[i].t - seeds[j].t) + std::abs(seeds[i].tp - seeds[j].tp) > 1e-4);
}

TEST_CASE("just above the ionization threshold every return is present") {
    const auto& n = neon();
    auto cloud = solve_cloud(n.m, {n.m.Ip() + 0.5 * n.w}, n.win);
    CHECK(cloud[0].size() >= 6);
}

TEST_CASE("linear field cutoffs alternate between threshold and energy type") {
    const auto& n = neon();
    auto cs = find_all_cutoffs(n.m, n.win);
    REQUIRE(cs.size() == 6);
    CHECK(cutoffs_alternate(cs));
    for (const auto& c : cs) {
        CHECK(c.residual < 1e-10);
        if (c.type == CutoffType::energy) {
            CHECK(c.omega_hc.real() > n.m.Ip());
        } else {
            CHECK(std::abs(c.omega_hc - n.m.Ip()) < 1e-8);
        }
    }
    // the first return carries the highest cutoff, near the classical 3.17 Up law
    double first = cs[1].omega_hc.real();
    CHECK(first > cs[3].omega_hc.real());
    CHECK(first > cs[5].omega_hc.real());
    CHECK((first - 1.32 * n.m.Ip()) / n.m.Up() == doctest::Approx(3.17).epsilon(0.05));
    CHECK(cs[1].omega_hc.imag() > 0);
}

TEST_CASE("continuation follows an orbit across a grid") {
    const auto& n = neon();
    auto seeds = seed_saddles(n.m, 20 * n.w, n.win);
    REQUIRE(!seeds.empty());
    auto g = omega_grid(20 * n.w, 30 * n.w, 0.5 * n.w);
    auto path = continue_orbit(n.m, g, seeds.front());
    REQUIRE(path.size() == g.size());
    for (std::size_t i = 1; i < path.size(); ++i)
        CHECK(n.w * std::abs(path[i].t - path[i - 1].t) < 0.15);
}

TEST_CASE("continuation refuses a step budget it cannot meet") {
    const auto& n = neon();
    auto seeds = seed_saddles(n.m, 20 * n.w, n.win);
    REQUIRE(!seeds.empty());
    SolverOptions o;
    o.jump_threshold = 1e-6;
    o.max_halvings = 1;
    CHECK_THROWS_AS(continue_orbit(n.m, {20 * n.w, 40 * n.w}, seeds.front(), o), OrbitLost);
}

TEST_CASE("omega grid includes both ends") {
    auto g = omega_grid(1.0, 2.0, 0.25);
    REQUIRE(g.size() == 5);
    CHECK(g.back() == doctest::Approx(2.0));
    CHECK(omega_grid(1.0, 2.0, 0.0).empty());
}
