#include <cmath>
#include <random>
#include <vector>

#include "chebyshev.hpp"
#include "direct.hpp"
#include "doctest.h"
#include "hermite.hpp"

using namespace fgt;

namespace {

double rnd01(std::mt19937_64& g) { return (g() >> 11) * 0x1.0p-53; }
double rnd(std::mt19937_64& g) { return 2 * rnd01(g) - 1; }

}  // namespace

TEST_CASE("low-order scaled basis matches closed forms") {
    for (double z : {-1.7, -0.3, 0.0, 0.42, 2.6}) {
        double h[5], e = std::exp(-z * z);
        hermite_values(5, z, h);
        CHECK(h[0] == doctest::Approx(e).epsilon(1e-14));
        CHECK(h[1] == doctest::Approx(2 * z * e).epsilon(1e-14));
        CHECK(h[2] == doctest::Approx((4 * z * z - 2) * e).epsilon(1e-13));
        CHECK(h[3] ==
              doctest::Approx((8 * z * z * z - 12 * z) * e).epsilon(1e-13));
        CHECK(h[4] == doctest::Approx(
                          (16 * z * z * z * z - 48 * z * z + 12) * e)
                          .epsilon(1e-13));
    }
}

TEST_CASE("derivative identity pins the whole ladder") {
    // d/dz h_n = -h_{n+1}, checked by central differences
    double z = 1.37, step = 1e-6;
    double hm[17], hp[17], h[17];
    hermite_values(17, z - step, hm);
    hermite_values(17, z + step, hp);
    hermite_values(17, z, h);
    for (int n = 0; n < 16; ++n) {
        double fd = (hp[n] - hm[n]) / (2 * step);
        double want = -h[n + 1];
        double scale = std::max({std::abs(h[n]), std::abs(h[n + 1]), 1.0});
        CHECK(std::abs(fd - want) <= 1e-7 * scale);
    }
}

TEST_CASE("parity of the scaled basis") {
    double a[40], b[40];
    hermite_values(40, 1.234, a);
    hermite_values(40, -1.234, b);
    for (int n = 0; n < 40; ++n)
        CHECK(a[n] == doctest::Approx((n % 2 ? -1 : 1) * b[n]).epsilon(1e-13));
}

TEST_CASE("inverse factorials") {
    double f = 1;
    for (int n = 0; n <= 20; ++n) {
        if (n) f *= n;
        CHECK(inv_factorial(n) == doctest::Approx(1 / f).epsilon(1e-15));
    }
    CHECK(inv_factorial(170) > 0);
    CHECK(inv_factorial(300) >= 0);  // underflows cleanly, never traps
}

TEST_CASE("truncation orders reproduce precomputed values") {
    // values computed with a high-precision reference implementation of
    // the selection rules
    CHECK(min_order_hermite(3.125, 1e-9) == 51);
    CHECK(min_order_taylor(3.125, 1e-9) == 55);
    CHECK(min_order_hermite(1.5625, 1e-9) == 28);
    CHECK(min_order_taylor(1.5625, 1e-9) == 30);
    CHECK(min_order_hermite(4.5523, 1e-9) == 73);
    CHECK(min_order_taylor(4.5523, 1e-9) == 82);
    CHECK(min_order_hermite(1e-3, 1e-9) == 3);

    // tighter targets or larger boxes never shrink the order
    CHECK(min_order_hermite(2.0, 1e-12) >= min_order_hermite(2.0, 1e-6));
    CHECK(min_order_taylor(3.0, 1e-9) >= min_order_taylor(1.0, 1e-9));
    CHECK(min_order_uniform(2.0, 1e-9) >= min_order_taylor(2.0, 1e-9) - 2);
    // the order is capped
    CHECK(min_order_hermite(40.0, 1e-14) <= 128);
}

TEST_CASE("outgoing truncation bound holds for separated targets") {
    std::mt19937_64 g(101);
    int worst = 0;
    for (int trial = 0; trial < 400; ++trial) {
        double s = std::exp(std::log(1e-3) * rnd01(g));  // box side
        double r = 0.05 * std::pow(4.0 / 0.05, rnd01(g));
        double delta = (s / r) * (s / r);
        double eps = std::pow(10.0, -3 - 9 * rnd01(g));
        Vec2 c{rnd(g), rnd(g)};
        Vec2 y{c.x + 0.5 * s * rnd(g), c.y + 0.5 * s * rnd(g)};
        double d = (1.5 + 2.5 * rnd01(g)) * s, th = 6.2832 * rnd01(g);
        Vec2 x{c.x + d * std::cos(th), c.y + d * std::sin(th)};

        int p = min_order_hermite(r, eps);
        worst = std::max(worst, p);
        Expansion e;
        e.reset(p);
        form_outgoing_from_point(c, std::sqrt(delta), y, 1.0, &e);
        double got = eval_outgoing(e, c, std::sqrt(delta), x);
        double want = std::exp(-norm2(x - y) / delta);
        CHECK(std::abs(got - want) <= eps + 1e-13);
    }
    CHECK(worst <= 128);
}

TEST_CASE("local truncation bound holds for separated sources") {
    std::mt19937_64 g(102);
    for (int trial = 0; trial < 400; ++trial) {
        double s = std::exp(std::log(1e-3) * rnd01(g));
        double r = 0.05 * std::pow(4.0 / 0.05, rnd01(g));
        double delta = (s / r) * (s / r);
        double eps = std::pow(10.0, -3 - 9 * rnd01(g));
        Vec2 c{rnd(g), rnd(g)};
        double d = (1.5 + 2.5 * rnd01(g)) * s, th = 6.2832 * rnd01(g);
        Vec2 y{c.x + d * std::cos(th), c.y + d * std::sin(th)};
        Vec2 x{c.x + 0.5 * s * rnd(g), c.y + 0.5 * s * rnd(g)};

        Expansion e;
        e.reset(min_order_taylor(r, eps));
        form_local_from_point(c, std::sqrt(delta), y, 1.0, &e);
        double got = eval_local(e, c, std::sqrt(delta), x);
        double want = std::exp(-norm2(x - y) / delta);
        CHECK(std::abs(got - want) <= eps + 1e-13);
    }
}

TEST_CASE("uniform bound needs no separation") {
    std::mt19937_64 g(103);
    for (int trial = 0; trial < 200; ++trial) {
        double s = 1.0;
        double r = 0.1 * std::pow(3.0 / 0.1, rnd01(g));
        double delta = (s / r) * (s / r);
        double eps = std::pow(10.0, -3 - 9 * rnd01(g));
        Vec2 c{0, 0};
        double d = 4 * s * rnd01(g), th = 6.2832 * rnd01(g);
        Vec2 y{c.x + d * std::cos(th), c.y + d * std::sin(th)};
        Vec2 x{0.5 * s * rnd(g), 0.5 * s * rnd(g)};

        Expansion e;
        e.reset(min_order_uniform(r, eps));
        form_local_from_point(c, std::sqrt(delta), y, 1.0, &e);
        double got = eval_local(e, c, std::sqrt(delta), x);
        double want = std::exp(-norm2(x - y) / delta);
        CHECK(std::abs(got - want) <= eps + 1e-13);
    }
}

TEST_CASE("dipole expansions match the dipole kernel") {
    std::mt19937_64 g(104);
    for (int trial = 0; trial < 50; ++trial) {
        double s = 0.5, r = 1.2, delta = (s / r) * (s / r);
        double eps = 1e-11;
        Vec2 c{0.3, -0.2};
        Vec2 y{c.x + 0.5 * s * rnd(g), c.y + 0.5 * s * rnd(g)};
        double a = 6.2832 * rnd01(g);
        Vec2 n{std::cos(a), std::sin(a)};
        double d = (1.5 + 2 * rnd01(g)) * s, th = 6.2832 * rnd01(g);
        Vec2 x{c.x + d * std::cos(th), c.y + d * std::sin(th)};

        Expansion e;
        e.reset(min_order_hermite(r, eps) + 1);
        form_outgoing_from_dipole(c, std::sqrt(delta), y, 0.7, n, &e);
        double got = eval_outgoing(e, c, std::sqrt(delta), x);
        double want = 0.7 * gauss_dipole_kernel(x, y, n, delta);
        CHECK(got == doctest::Approx(want).epsilon(1e-7));

        // and the local side, swapping roles of source and box
        Expansion le;
        le.reset(min_order_taylor(r, eps) + 1);
        form_local_from_dipole(c, std::sqrt(delta), x, 0.7, n, &le);
        Vec2 t{c.x + 0.4 * s * rnd(g), c.y + 0.4 * s * rnd(g)};
        double got2 = eval_local(le, c, std::sqrt(delta), t);
        double want2 = 0.7 * gauss_dipole_kernel(t, x, n, delta);
        CHECK(got2 == doctest::Approx(want2).epsilon(1e-7));
    }
}

TEST_CASE("leaf moments agree with patch quadrature") {
    std::mt19937_64 g(105);
    int k = 8;
    double side = 0.5, delta = 0.09;  // r about 1.67
    Vec2 c{0.1, 0.2};
    LeafPatch leaf;
    leaf.box = {c, side};
    leaf.k = k;
    leaf.coef.assign(coeff_count(k), 0.0);
    for (double& v : leaf.coef) v = rnd(g);

    double sd = std::sqrt(delta);
    MomentTable mt(k, min_order_hermite(side / sd, 1e-13), side / (2 * sd),
                   side / 2);
    Expansion e;
    e.reset(mt.order());
    mt.add_outgoing(leaf.coef.data(), &e);
    for (int trial = 0; trial < 5; ++trial) {
        double d = (1.6 + 2 * rnd01(g)) * side, th = 6.2832 * rnd01(g);
        Vec2 x{c.x + d * std::cos(th), c.y + d * std::sin(th)};
        double want = direct_volume_one(leaf, x, delta);
        double got = eval_outgoing(e, c, sd, x);
        CHECK(std::abs(got - want) <= 1e-12 + 1e-10 * std::abs(want));
    }
}

TEST_CASE("translation operators preserve the field they move") {
    // three-level setup with the far field starting at level 1
    double delta = 0.02, eps = 1e-9;
    double sd = std::sqrt(delta);
    Plan pl = make_plan(1.0, 3, {1, 4, 16, 64}, delta, eps, false,
                        ForcePath::kHermite);
    REQUIRE(pl.l_cut == 1);
    Translators tr(pl);
    std::mt19937_64 g(106);

    // charge in a level-2 box; its parent gathers the outgoing expansion
    double s2 = 0.25;            // level-2 side
    Vec2 c2{0.375, 0.125};       // box (1,0) at level 2, domain [0,1]^2
    Vec2 cp{0.25, 0.25};         // its parent, level-1 box (0,0)
    Vec2 y{c2.x + 0.4 * s2 * rnd(g), c2.y + 0.4 * s2 * rnd(g)};

    Expansion child;
    child.reset(pl.level[2].n_h);
    form_outgoing_from_point(c2, sd, y, 1.0, &child);

    Expansion parent;
    parent.reset(pl.level[1].n_h);
    tr.shift_outgoing(2, 1, 0, child, &parent);
    for (int trial = 0; trial < 8; ++trial) {
        double d = (1.6 + 1.5 * rnd01(g)) * 0.5, th = 6.2832 * rnd01(g);
        Vec2 x{cp.x + d * std::cos(th), cp.y + d * std::sin(th)};
        double want = std::exp(-norm2(x - y) / delta);
        CHECK(std::abs(eval_outgoing(parent, cp, sd, x) - want) <=
              3 * eps + 1e-14);
    }

    // far translation along the interaction list at level 2
    for (auto [dx, dy] : {std::pair{3, -2}, {2, 0}, {-3, 3}, {0, 2}}) {
        Expansion loc;
        loc.reset(pl.level[2].n_t);
        tr.outgoing_to_local(2, dx, dy, child, &loc);
        Vec2 ct{c2.x + dx * s2, c2.y + dy * s2};
        for (int trial = 0; trial < 4; ++trial) {
            Vec2 x{ct.x + 0.45 * s2 * rnd(g), ct.y + 0.45 * s2 * rnd(g)};
            double want = std::exp(-norm2(x - y) / delta);
            CHECK(std::abs(eval_local(loc, ct, sd, x) - want) <=
                  10 * eps + 1e-14);
        }
    }

    // a parent-level local field pushed down to a child
    Vec2 far{cp.x + 1.9 * 0.5, cp.y - 1.2 * 0.5};
    Expansion ploc;
    ploc.reset(pl.level[1].n_t);
    form_local_from_point(cp, sd, far, 1.0, &ploc);
    Expansion cloc;
    cloc.reset(pl.level[2].n_t);
    tr.shift_local(2, 1, 0, ploc, &cloc);
    for (int trial = 0; trial < 8; ++trial) {
        Vec2 x{c2.x + 0.45 * s2 * rnd(g), c2.y + 0.45 * s2 * rnd(g)};
        double want = std::exp(-norm2(x - far) / delta);
        CHECK(std::abs(eval_local(cloc, c2, sd, x) - want) <= 3 * eps + 1e-14);
    }
}

TEST_CASE("plane-wave path reproduces the far translation") {
    double delta = 0.00772, eps = 1e-9;
    double sd = std::sqrt(delta);
    Plan pl = make_plan(1.0, 3, {1, 4, 16, 64}, delta, eps, false,
                        ForcePath::kPlaneWave);
    REQUIRE(pl.level[2].p_t % 2 == 1);
    Translators tr(pl);
    std::mt19937_64 g(107);

    double s2 = 0.25;
    Vec2 c2{0.375, 0.125};
    Vec2 y{c2.x + 0.4 * s2 * rnd(g), c2.y + 0.4 * s2 * rnd(g)};
    Expansion child;
    child.reset(pl.level[2].n_h);
    form_outgoing_from_point(c2, sd, y, 1.0, &child);

    const LevelPlan& lp = pl.level[2];
    PlaneWave wv;
    outgoing_to_pw(child, lp, &wv);

    for (auto [dx, dy] : {std::pair{2, -1}, {3, 3}, {-2, 2}}) {
        PlaneWave acc;
        acc.reset(lp.p_t, lp.pw_h);
        pw_accumulate(wv, lp.r, dx, dy, &acc);
        Expansion loc;
        loc.reset(lp.n_t);
        pw_to_local(acc, lp.n_t, &loc);

        Expansion ref;
        ref.reset(lp.n_t);
        tr.outgoing_to_local(2, dx, dy, child, &ref);

        Vec2 ct{c2.x + dx * s2, c2.y + dy * s2};
        for (int trial = 0; trial < 4; ++trial) {
            Vec2 x{ct.x + 0.45 * s2 * rnd(g), ct.y + 0.45 * s2 * rnd(g)};
            double want = std::exp(-norm2(x - y) / delta);
            CHECK(std::abs(eval_local(loc, ct, sd, x) - want) <=
                  10 * eps + 1e-14);
            CHECK(std::abs(eval_local(loc, ct, sd, x) -
                           eval_local(ref, ct, sd, x)) <= 10 * eps + 1e-14);
        }
    }

    // accumulating with zero displacement is the identity on the weights
    PlaneWave same;
    same.reset(lp.p_t, lp.pw_h);
    pw_accumulate(wv, lp.r, 0, 0, &same);
    for (size_t i = 0; i < wv.w.size(); ++i) CHECK(same.w[i] == wv.w[i]);
}
