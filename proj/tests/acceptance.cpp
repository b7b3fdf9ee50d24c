// Acceptance gate: each run checks one numbered criterion (argv[1] in 1..10),
// prints a single "criterion N: PASS/FAIL - detail" line, and exits 0/1.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "boundary.hpp"
#include "direct.hpp"
#include "engine.hpp"
#include "hermite.hpp"
#include "lattice.hpp"
#include "quadtree.hpp"

namespace {

using namespace fgt;

constexpr double kPi = 3.14159265358979323846;
const BoxGeom kUnit{{0.5, 0.5}, 1.0};

double rnd(std::mt19937_64& g) { return (g() >> 11) * 0x1.0p-53; }

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<Vec2> tree_grid(const Tree& t) {
    std::vector<Vec2> g;
    for (int i : t.leaves()) {
        const auto p = t.leaf_grid_points(i);
        g.insert(g.end(), p.begin(), p.end());
    }
    return g;
}

// Interpolatory weights on the k-point Chebyshev-root grid; exact for
// polynomials of degree < k on [-1, 1].
std::vector<double> cheb_root_weights(int k) {
    std::vector<double> w(k);
    for (int m = 0; m < k; ++m) {
        const double th = (2 * m + 1) * kPi / (2 * k);
        double s = 1.0;
        for (int j = 1; j <= k / 2; ++j)
            s -= 2.0 * std::cos(2 * j * th) / (4.0 * j * j - 1);
        w[m] = 2.0 * s / k;
    }
    return w;
}

// ---- 1: discrete sums against the dense reference --------------------------

bool crit1(std::string* d) {
    const auto t0 = Clock::now();
    std::mt19937_64 g(101);
    const int n = 2000, m = 2000;
    std::vector<PointSource> pts(n);
    double qsum = 0;
    for (auto& p : pts) {
        p.pos = {rnd(g), rnd(g)};
        p.strength = 2 * rnd(g) - 1;
        qsum += std::abs(p.strength);
    }
    std::vector<Vec2> tg(m);
    for (auto& t : tg) t = {rnd(g), rnd(g)};

    Tree tree = Tree::from_points(kUnit, 8, pts, 25, 10);
    const std::vector<DipoleSource> nodip;
    double worst = 0;
    for (double delta : {1e-6, 1e-4, 1e-2, 1.0}) {
        std::vector<double> want(m);
        direct_dgt(pts, nodip, tg.data(), m, delta, want.data());
        for (double eps : {1e-3, 1e-6, 1e-9}) {
            TransformRequest req;
            req.delta = delta;
            req.eps = eps;
            req.want_grid = false;
            req.targets = tg;
            const TransformResult res = transform(tree, req);
            double err = 0;
            for (int i = 0; i < m; ++i)
                err = std::max(err, std::abs(res.point_out[i] - want[i]));
            worst = std::max(worst, err / (10 * eps * qsum));
        }
    }
    const double secs = seconds_since(t0);
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "2000x2000 points, 12 (delta, eps) cells: max err over "
                  "10*eps*sum|q| = %.3g, %.1f s",
                  worst, secs);
    *d = buf;
    return worst <= 1.0 && secs < 60.0;
}

// ---- 2: adaptive volume transform against the closed form ------------------

bool crit2(std::string* d) {
    const auto t0 = Clock::now();
    const Sampler f = [](const Vec2* xy, int nn, double* out) {
        for (int i = 0; i < nn; ++i) out[i] = bump_value(xy[i]);
    };
    Tree tree = Tree::adaptive(bump_domain(), 8, f, 1e-10, 12);

    std::mt19937_64 g(202);
    const int m = 200;
    std::vector<Vec2> tg(m);
    for (auto& t : tg) t = {rnd(g), rnd(g)};

    // the closed form must agree with panel quadrature of the stored
    // polynomials before it may serve as the reference
    const auto patches = tree.leaf_patches();
    for (double delta : {1e-1, 1e-4})
        for (int i = 0; i < 2; ++i) {
            const Vec2 x = tg[7 * i + 3];
            const double q = direct_volume(patches, x, delta);
            if (std::abs(q - bump_transform(x, delta)) > 1e-9) {
                *d = "closed form disagrees with quadrature of the tree";
                return false;
            }
        }

    // total source mass, integrated from the tree's own samples
    const auto w = cheb_root_weights(8);
    const auto canon = tree.leaves();
    double qb = 0;
    for (int node : canon) {
        const auto gp = tree.leaf_grid_points(node);
        const double area = tree.side(tree.node(node).level);
        double lm = 0;
        for (int j2 = 0; j2 < 8; ++j2)
            for (int j1 = 0; j1 < 8; ++j1)
                lm += w[j1] * w[j2] * std::abs(bump_value(gp[j2 * 8 + j1]));
        qb += lm / 4 * area * area;
    }

    double worst = 0;
    for (double delta : {1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1}) {
        for (double eps : {1e-3, 1e-6, 1e-9}) {
            TransformRequest req;
            req.delta = delta;
            req.eps = eps;
            req.want_grid = false;
            req.targets = tg;
            req.threads = 4;
            const TransformResult res = transform(tree, req);
            double err = 0;
            for (int i = 0; i < m; ++i)
                err = std::max(err, std::abs(res.point_out[i] -
                                             bump_transform(tg[i], delta)));
            worst = std::max(worst, err / (10 * eps * qb));
        }
    }
    const double secs = seconds_since(t0);
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "bump source on %d adaptive leaves, 21 cells: max err over "
                  "10*eps*Q = %.3g, %.1f s",
                  (int)canon.size(), worst, secs);
    *d = buf;
    return worst <= 1.0 && secs < 600.0;
}

// ---- 3: periodic eigenfunctions at every grid point -------------------------

bool crit3(std::string* d) {
    double worst = 0;
    for (int k : {1, 2, 4}) {
        const int level = k == 1 ? 5 : (k == 2 ? 6 : 7);
        Tree tree = Tree::uniform(kUnit, 8, level);
        const std::vector<Vec2> gp = tree_grid(tree);
        std::vector<double> f(gp.size());
        for (size_t i = 0; i < gp.size(); ++i) f[i] = sinprod_value(gp[i], k);
        tree.set_all_samples(f.data());
        for (double delta : {1e-4, 1e-2, 1e-1}) {
            for (double eps : {1e-6, 1e-9}) {
                TransformRequest req;
                req.delta = delta;
                req.eps = eps;
                req.periodic = true;
                req.threads = 0;
                const TransformResult res = transform(tree, req);
                const double lam = sinprod_eigenvalue(k, delta);
                double err = 0;
                for (size_t i = 0; i < gp.size(); ++i)
                    err = std::max(err, std::abs(res.grid[i] - lam * f[i]));
                worst = std::max(worst, err / (10 * eps));
            }
        }
    }
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "waves k in {1,2,4}, 18 cells, every grid point: max err "
                  "over 10*eps = %.3g",
                  worst);
    *d = buf;
    return worst <= 1.0;
}

// ---- 4: single-layer sweep with correction gating ---------------------------

bool crit4(std::string* d) {
    const auto segs = make_ellipse(64, 16);
    const auto fs = [](Vec2 p) { return std::cos(2 * p.x) + std::sin(p.y); };
    const auto dens = fit_boundary_density(segs, 16, fs);
    BoundaryLayer bl;
    bl.segments = segs;
    bl.density = dens;
    bl.dipole = false;

    double glen = 0;
    for (const auto& s : segs) glen += segment_length(s);
    double sig = 0;
    for (int i = 0; i < 4096; ++i) {
        const double th = 2 * kPi * i / 4096;
        sig = std::max(
            sig, std::abs(fs({0.45 * std::cos(th), 0.25 * std::sin(th)})));
    }

    std::mt19937_64 g(404);
    std::vector<Vec2> tg;
    for (int i = 0; i < 100; ++i)
        tg.push_back({1.2 * (rnd(g) - 0.5), 0.8 * (rnd(g) - 0.5)});
    for (int i = 0; i < 100; ++i) {
        const double th = 2 * kPi * rnd(g);
        tg.push_back({0.45 * std::cos(th), 0.25 * std::sin(th)});
    }

    double worst = 0;
    bool gate_ok = true;
    for (double delta : {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0}) {
        std::vector<double> want(tg.size());
        for (size_t i = 0; i < tg.size(); ++i)
            want[i] = direct_boundary(segs, dens, false, tg[i], delta);
        for (double eps : {1e-3, 1e-6, 1e-9}) {
            BoundaryParams par;
            par.delta = delta;
            par.eps = eps;
            par.quad_order = 16;
            par.corr_order = 20;
            par.threads = 4;
            const BoundaryOutput out = boundary_transform(bl, tg, par);
            double err = 0;
            for (size_t i = 0; i < tg.size(); ++i)
                err = std::max(err, std::abs(out.values[i] - want[i]));
            worst = std::max(worst, err / (10 * eps * sig * glen));
            bool any_unresolved = false;
            for (uint8_t r : out.resolved) any_unresolved |= (r == 0);
            if ((out.corrections_applied > 0) != any_unresolved)
                gate_ok = false;
        }
    }
    char buf[220];
    std::snprintf(buf, sizeof buf,
                  "200 targets, 21 cells: max err over 10*eps*|f|*len = %.3g; "
                  "corrections fire exactly when a segment is unresolved: %s",
                  worst, gate_ok ? "yes" : "no");
    *d = buf;
    return worst <= 1.0 && gate_ok;
}

// ---- 5: corrected near-target quadrature at high order ----------------------

bool crit5(std::string* d) {
    const auto segs = make_ellipse(64, 16);
    const auto fs = [](Vec2 p) { return std::cos(2 * p.x) + std::sin(p.y); };
    const auto dens = fit_boundary_density(segs, 16, fs);
    BoundaryLayer bl;
    bl.segments = segs;
    bl.density = dens;
    bl.dipole = false;

    const double delta = 1e-5, eps = 1e-14;
    const double sd = std::sqrt(delta);

    std::vector<PointSource> pts;
    std::vector<DipoleSource> dips;
    discretize_boundary(bl, 16, &pts, &dips);

    std::vector<Vec2> tg;
    for (int j : {0, 9, 23, 41, 55}) {
        for (double s : {-0.62, 0.11, 0.80}) {
            const Vec2 p = segment_point(segs[j], s);
            const Vec2 dv = segment_deriv(segs[j], s);
            const double dl = std::sqrt(norm2(dv));
            const Vec2 nrm{dv.y / dl, -dv.x / dl};
            tg.push_back(p);
            for (double h : {0.4, 1.5}) {
                tg.push_back(p + (h * sd) * nrm);
                tg.push_back(p - (h * sd) * nrm);
            }
        }
    }

    double err = 0;
    for (const Vec2& x : tg) {
        double v = 0;
        for (const auto& p : pts)
            v += p.strength * gauss_kernel(x, p.pos, delta);
        for (size_t j = 0; j < segs.size(); ++j)
            v += boundary_correction(segs[j], dens[j].data(),
                                     (int)dens[j].size(), false, x, delta,
                                     eps, 20, 16);
        const double want = direct_boundary(segs, dens, false, x, delta, 1e-15);
        err = std::max(err, std::abs(v - want));
    }
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "%d on/near-curve targets, 20-point panels: max abs err = "
                  "%.3g (limit 1e-13)",
                  (int)tg.size(), err);
    *d = buf;
    return err <= 1e-13;
}

// ---- 6: throughput plateau and cost-model fit across sizes ------------------
//
// The problem hardens as it grows: wave number k in {1,2,4,8} with
// delta = 1/k^2 under periodic conditions, meshed at 256..16384 leaves so
// each case resolves its data equally well. Throughput excluding the
// plan/operator/table precompute should then be flat in N.

bool crit6(std::string* d) {
    struct Row {
        double n, t_excl, t_total;
    };
    double worst_ratio = 0, worst_resid = 0;
    bool ok = true;
    for (double eps : {1e-3, 1e-6, 1e-9}) {
        std::vector<Row> rows;
        for (int k : {1, 2, 4, 8}) {
            const int level = k == 1 ? 4 : (k == 2 ? 5 : (k == 4 ? 6 : 7));
            Tree tree = Tree::uniform(kUnit, 8, level);
            const auto gp = tree_grid(tree);
            std::vector<double> f(gp.size());
            for (size_t i = 0; i < gp.size(); ++i)
                f[i] = sinprod_value(gp[i], k);
            tree.set_all_samples(f.data());
            double best_excl = 1e300, best_total = 1e300;
            for (int rep = 0; rep < 5; ++rep) {
                TransformRequest req;
                req.delta = 1.0 / (k * k);
                req.eps = eps;
                req.periodic = true;
                req.threads = 1;
                const TransformResult res = transform(tree, req);
                best_excl = std::min(
                    best_excl,
                    res.stats.seconds_total - res.stats.seconds_build);
                best_total = std::min(best_total, res.stats.seconds_total);
            }
            rows.push_back({(double)gp.size(), best_excl, best_total});
        }
        double thr_min = 1e300, thr_max = 0;
        for (const Row& r : rows) {
            const double thr = r.n / r.t_excl;
            thr_min = std::min(thr_min, thr);
            thr_max = std::max(thr_max, thr);
        }
        worst_ratio = std::max(worst_ratio, thr_max / thr_min);

        // least squares for t_total = A n + B log n, coefficients clamped
        // to be nonnegative
        double sxx = 0, sxy = 0, syy = 0, sxt = 0, syt = 0;
        for (const Row& r : rows) {
            const double X = r.n, Y = std::log(r.n);
            sxx += X * X;
            sxy += X * Y;
            syy += Y * Y;
            sxt += X * r.t_total;
            syt += Y * r.t_total;
        }
        const double det = sxx * syy - sxy * sxy;
        double A = (sxt * syy - syt * sxy) / det;
        double B = (syt * sxx - sxt * sxy) / det;
        if (B < 0) {
            B = 0;
            A = sxt / sxx;
        }
        if (A < 0) {
            A = 0;
            B = syt / syy;
        }
        double resid = 0;
        for (const Row& r : rows)
            resid = std::max(resid, std::abs(A * r.n + B * std::log(r.n) -
                                             r.t_total) /
                                        r.t_total);
        worst_resid = std::max(worst_resid, resid);
        ok = ok && thr_max / thr_min <= 2.0 && A >= 0 && B >= 0 &&
             resid <= 0.35;
    }
    char buf[220];
    std::snprintf(buf, sizeof buf,
                  "k in {1,2,4,8}, 16k..1M grid points: throughput spread "
                  "%.2fx (limit 2), nonnegative linear+log fit, max rel "
                  "residual %.2f",
                  worst_ratio, worst_resid);
    *d = buf;
    return ok;
}

// ---- 7: translation identities ----------------------------------------------

bool crit7(std::string* d) {
    const auto bc = [](int l, long gx, long gy) -> Vec2 {
        const double s = std::ldexp(1.0, -l);
        return {(gx + 0.5) * s, (gy + 0.5) * s};
    };
    std::mt19937_64 g(707);
    const std::vector<int> boxes{1, 4, 16, 64};

    // (a) shifting plane-wave weights by zero boxes is bit-exact
    const double dpw = 0.00772, sdp = std::sqrt(dpw);
    const Plan planW =
        make_plan(1.0, 3, boxes, dpw, 1e-9, false, ForcePath::kPlaneWave);
    if (planW.l_cut > 2 || !planW.level[2].use_pw) {
        *d = "diagonal path not active in the test configuration";
        return false;
    }
    const LevelPlan& lp2 = planW.level[2];
    Expansion e0;
    e0.reset(lp2.n_h);
    const Vec2 c22 = bc(2, 1, 2);
    for (int i = 0; i < 10; ++i) {
        const Vec2 y{c22.x + (rnd(g) - 0.5) * 0.25,
                     c22.y + (rnd(g) - 0.5) * 0.25};
        form_outgoing_from_point(c22, sdp, y, 2 * rnd(g) - 1, &e0);
    }
    PlaneWave w0, wz;
    outgoing_to_pw(e0, lp2, &w0);
    wz.reset(lp2.p_t, lp2.pw_h);
    pw_accumulate(w0, lp2.r, 0, 0, &wz);
    for (size_t i = 0; i < w0.w.size(); ++i)
        if (wz.w[i] != w0.w[i]) {
            *d = "zero shift is not bit-exact";
            return false;
        }

    // (b) two-hop shifts against direct kernel sums
    const double dl = 0.06, sdl = std::sqrt(dl);
    const Plan plan =
        make_plan(1.0, 3, boxes, dl, 1e-13, false, ForcePath::kHermite);
    if (plan.l_cut != 0) {
        *d = "unexpected cutoff level in the composition configuration";
        return false;
    }
    const Translators T(plan);

    const Vec2 c3 = bc(3, 5, 2);
    std::vector<PointSource> src;
    double q1 = 0;
    for (int i = 0; i < 12; ++i) {
        const PointSource p{{c3.x + (rnd(g) - 0.5) * 0.125,
                             c3.y + (rnd(g) - 0.5) * 0.125},
                            2 * rnd(g) - 1};
        src.push_back(p);
        q1 += std::abs(p.strength);
    }
    Expansion e3, e2, e1;
    e3.reset(plan.level[3].n_h);
    for (const auto& p : src)
        form_outgoing_from_point(c3, sdl, p.pos, p.strength, &e3);
    e2.reset(plan.level[2].n_h);
    T.shift_outgoing(3, 1, 0, e3, &e2);  // (5,2) sits at corner (1,0) of (2,1)
    e1.reset(plan.level[1].n_h);
    T.shift_outgoing(2, 0, 1, e2, &e1);  // (2,1) sits at corner (0,1) of (1,0)
    const Vec2 c1 = bc(1, 1, 0);
    double comp_err = 0;
    for (int i = 0; i < 15; ++i) {
        const double ang = 2 * kPi * rnd(g), rad = 0.75 + 0.35 * rnd(g);
        const Vec2 x{c1.x + rad * std::cos(ang), c1.y + rad * std::sin(ang)};
        double want = 0;
        for (const auto& p : src)
            want += p.strength * gauss_kernel(x, p.pos, dl);
        comp_err =
            std::max(comp_err, std::abs(eval_outgoing(e1, c1, sdl, x) - want));
    }

    const Vec2 s2 = bc(2, 0, 1);
    std::vector<PointSource> src2;
    double q2 = 0;
    for (int i = 0; i < 12; ++i) {
        const PointSource p{{s2.x + (rnd(g) - 0.5) * 0.25,
                             s2.y + (rnd(g) - 0.5) * 0.25},
                            2 * rnd(g) - 1};
        src2.push_back(p);
        q2 += std::abs(p.strength);
    }
    Expansion f2, psi2, psi3;
    f2.reset(plan.level[2].n_h);
    for (const auto& p : src2)
        form_outgoing_from_point(s2, sdl, p.pos, p.strength, &f2);
    psi2.reset(plan.level[2].n_t);
    T.outgoing_to_local(2, 3, 1, f2, &psi2);  // into box (3, 2)
    psi3.reset(plan.level[3].n_t);
    T.shift_local(3, 1, 1, psi2, &psi3);  // into its child (7, 5)
    const Vec2 t3 = bc(3, 7, 5);
    for (int i = 0; i < 10; ++i) {
        const Vec2 x{t3.x + (rnd(g) - 0.5) * 0.125,
                     t3.y + (rnd(g) - 0.5) * 0.125};
        double want = 0;
        for (const auto& p : src2)
            want += p.strength * gauss_kernel(x, p.pos, dl);
        comp_err =
            std::max(comp_err, std::abs(eval_local(psi3, t3, sdl, x) - want));
    }
    const double comp_tol = 1e-12 * std::max(q1, q2);

    // (c) diagonal path vs series path on random interaction geometries
    const Plan planH =
        make_plan(1.0, 3, boxes, dpw, 1e-9, false, ForcePath::kHermite);
    const Translators TH(planH);
    double ratio = 0;
    int done = 0;
    while (done < 100) {
        const int l = 2 + (int)(g() % 2u);
        const LevelPlan& lw = planW.level[l];
        const LevelPlan& lh = planH.level[l];
        if (!lw.use_pw) {
            *d = "diagonal path inactive at an interaction level";
            return false;
        }
        const long nside = 1L << l;
        const long gx = (long)(g() % (uint64_t)nside);
        const long gy = (long)(g() % (uint64_t)nside);
        const int dx = (int)(g() % 7u) - 3, dy = (int)(g() % 7u) - 3;
        if (std::max(std::abs(dx), std::abs(dy)) < 2) continue;
        const Vec2 sc = bc(l, gx, gy), tc = bc(l, gx + dx, gy + dy);
        const double half = std::ldexp(1.0, -l) / 2;
        Expansion phi;
        phi.reset(lh.n_h);
        double q = 0;
        for (int i = 0; i < 8; ++i) {
            const Vec2 y{sc.x + (2 * rnd(g) - 1) * half,
                         sc.y + (2 * rnd(g) - 1) * half};
            const double s = 2 * rnd(g) - 1;
            q += std::abs(s);
            form_outgoing_from_point(sc, sdp, y, s, &phi);
        }
        Expansion psiH, psiW;
        psiH.reset(lh.n_t);
        TH.outgoing_to_local(l, dx, dy, phi, &psiH);
        PlaneWave wv, acc;
        outgoing_to_pw(phi, lw, &wv);
        acc.reset(lw.p_t, lw.pw_h);
        pw_accumulate(wv, lw.r, dx, dy, &acc);
        psiW.reset(lw.n_t);
        pw_to_local(acc, lw.n_t, &psiW);
        for (int i = 0; i < 5; ++i) {
            const Vec2 x{tc.x + (2 * rnd(g) - 1) * half,
                         tc.y + (2 * rnd(g) - 1) * half};
            const double vh = eval_local(psiH, tc, sdp, x);
            const double vw = eval_local(psiW, tc, sdp, x);
            ratio = std::max(ratio, std::abs(vh - vw) / (10 * 1e-9 * q));
        }
        ++done;
    }

    char buf[220];
    std::snprintf(buf, sizeof buf,
                  "zero shift bit-exact; two-hop composition err %.2g (limit "
                  "%.2g); diagonal vs series on 100 geometries: max err over "
                  "10*eps*Q = %.3g",
                  comp_err, comp_tol, ratio);
    *d = buf;
    return comp_err <= comp_tol && ratio <= 1.0;
}

// ---- 8: far-image sums against brute truncation ------------------------------

bool crit8(std::string* d) {
    const std::vector<std::pair<int, int>> odd{{1, 0}, {0, 3}, {2, 5},
                                               {7, 7}, {3, 2}};
    for (const auto& [g1, g2] : odd)
        for (double delta : {0.1, 0.5, 1.0})
            if (lattice_sum(g1, g2, delta, 1.0) != 0.0) {
                *d = "odd-order image sum is not exactly zero";
                return false;
            }

    double err = 0;
    const std::vector<std::pair<int, int>> even{{0, 0}, {2, 2}};
    for (double delta : {0.1, 0.5, 1.0}) {
        const double sd = std::sqrt(delta);
        for (const auto& [g1, g2] : even) {
            std::vector<double> h1(g1 + 1), h2(g2 + 1);
            double brute = 0;
            const int lim = 12;
            for (int j1 = -lim; j1 <= lim; ++j1)
                for (int j2 = -lim; j2 <= lim; ++j2) {
                    if (std::max(std::abs(j1), std::abs(j2)) < 2) continue;
                    hermite_values(g1 + 1, j1 / sd, h1.data());
                    hermite_values(g2 + 1, j2 / sd, h2.data());
                    brute += h1[g1] * h2[g2];
                }
            err = std::max(err,
                           std::abs(lattice_sum(g1, g2, delta, 1.0) - brute));
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "odd orders exactly zero; even sums vs brute images: max "
                  "abs err = %.3g (limit 1e-12)",
                  err);
    *d = buf;
    return err <= 1e-12;
}

// ---- 9: heat step mass conservation and prefactor order demand ---------------

bool crit9(std::string* d) {
    const auto w = cheb_root_weights(8);
    // weights must integrate the interpolant exactly
    for (int p = 0; p <= 7; ++p) {
        double got = 0;
        for (int m = 0; m < 8; ++m)
            got += w[m] * std::pow(-std::cos((2 * m + 1) * kPi / 16), p);
        const double want = p % 2 == 0 ? 2.0 / (p + 1) : 0.0;
        if (std::abs(got - want) > 1e-13) {
            *d = "grid quadrature weights failed the self-check";
            return false;
        }
    }

    Tree tree = Tree::uniform(kUnit, 8, 5);
    std::mt19937_64 g(909);
    const auto canon = tree.leaves();
    std::vector<double> f;
    f.reserve(canon.size() * 64);
    double mean0 = 0;
    for (size_t i = 0; i < canon.size(); ++i) {
        const double c = rnd(g);
        mean0 += c;
        for (int j = 0; j < 64; ++j) f.push_back(c);
    }
    mean0 /= (double)canon.size();
    tree.set_all_samples(f.data());

    double drift = 0;
    for (double t : {1e-4, 1e-3, 1e-2}) {
        TransformRequest req;
        req.delta = 4 * t;
        req.eps = 1e-9;
        req.periodic = true;
        req.kernel_prefactor = 1 / (4 * kPi * t);
        req.threads = 0;
        const TransformResult res = transform(tree, req);
        double mean_t = 0;
        for (size_t leaf = 0; leaf < canon.size(); ++leaf) {
            const double* blk = &res.grid[leaf * 64];
            double lm = 0;
            for (int j2 = 0; j2 < 8; ++j2)
                for (int j1 = 0; j1 < 8; ++j1)
                    lm += w[j1] * w[j2] * blk[j2 * 8 + j1];
            mean_t += lm / 4;
        }
        mean_t /= (double)canon.size();
        drift = std::max(drift, std::abs(mean_t - mean0));
    }

    // the 1/(4 pi t) prefactor tightens the working tolerance, so it must
    // select strictly larger truncation orders than the bare kernel
    const double ts = 1e-4;
    TransformRequest plain;
    plain.delta = 4 * ts;
    plain.eps = 1e-9;
    plain.periodic = true;
    plain.threads = 0;
    TransformRequest pref = plain;
    pref.kernel_prefactor = 1 / (4 * kPi * ts);
    const TransformStats sp = transform(tree, plain).stats;
    const TransformStats sq = transform(tree, pref).stats;
    const int lc = std::max(sp.l_cut, sq.l_cut);
    bool orders_ok = lc <= tree.max_level();
    for (int l = lc; l <= tree.max_level() && orders_ok; ++l)
        orders_ok = sq.n_h[l] > sp.n_h[l] && sq.n_t[l] > sp.n_t[l];

    char buf[220];
    std::snprintf(buf, sizeof buf,
                  "mean drift %.2e over t in {1e-4,1e-3,1e-2} (limit 1e-8); "
                  "prefactor orders at t=1e-4: %d/%d vs %d/%d",
                  drift, sq.n_h[lc], sq.n_t[lc], sp.n_h[lc], sp.n_t[lc]);
    *d = buf;
    return drift <= 1e-8 && orders_ok;
}

// ---- 10: every leaf pair carried exactly once or provably out of range -------

bool crit10(std::string* d) {
    std::mt19937_64 g(1010);
    uint64_t pairs = 0, dropped = 0;
    uint64_t mech_seen[4] = {0, 0, 0, 0};
    for (int trial = 0; trial < 50; ++trial) {
        Tree tree = [&]() {
            if (trial % 2 == 0) {
                const int n = 150 + (int)(g() % 300u);
                const Vec2 c1{0.2 + 0.6 * rnd(g), 0.2 + 0.6 * rnd(g)};
                const Vec2 c2{0.2 + 0.6 * rnd(g), 0.2 + 0.6 * rnd(g)};
                std::vector<PointSource> pts;
                for (int i = 0; i < n; ++i) {
                    Vec2 p;
                    const double u = rnd(g);
                    if (u < 0.4)
                        p = {c1.x + 0.03 * (rnd(g) - 0.5),
                             c1.y + 0.03 * (rnd(g) - 0.5)};
                    else if (u < 0.7)
                        p = {c2.x + 0.08 * (rnd(g) - 0.5),
                             c2.y + 0.08 * (rnd(g) - 0.5)};
                    else
                        p = {rnd(g), rnd(g)};
                    p.x = std::clamp(p.x, 0.0, 1.0);
                    p.y = std::clamp(p.y, 0.0, 1.0);
                    pts.push_back({p, 2 * rnd(g) - 1});
                }
                const int mpl = 4 + (int)(g() % 17u);
                return Tree::from_points(kUnit, 6, std::move(pts), mpl, 6);
            }
            const Vec2 b1{0.15 + 0.7 * rnd(g), 0.15 + 0.7 * rnd(g)};
            const Vec2 b2{0.15 + 0.7 * rnd(g), 0.15 + 0.7 * rnd(g)};
            const double v1 = 2e-3 + 8e-3 * rnd(g);
            const double v2 = 2e-3 + 8e-3 * rnd(g);
            const Sampler f = [=](const Vec2* xy, int nn, double* out) {
                for (int i = 0; i < nn; ++i)
                    out[i] = std::exp(-norm2(xy[i] - b1) / v1) +
                             std::exp(-norm2(xy[i] - b2) / v2);
            };
            return Tree::adaptive(kUnit, 8, f, 1e-7, 6);
        }();

        const double delta = std::exp(std::log(1e-5) + rnd(g) * std::log(3e3));
        const double eps = std::pow(10.0, -3.0 * (double)(1 + g() % 3u));
        std::vector<AuditRecord> audit;
        TransformRequest req;
        req.delta = delta;
        req.eps = eps;
        req.threads = 1;
        req.audit = &audit;
        transform(tree, req);

        const auto canon = tree.leaves();
        const int L = (int)canon.size();
        std::vector<int> ord(tree.node_count(), -1);
        for (int i = 0; i < L; ++i) ord[canon[i]] = i;

        // leaves under each node, filled deepest level first
        std::vector<std::vector<int>> sub(tree.node_count());
        for (int l = tree.max_level(); l >= 0; --l)
            for (int i : tree.level_nodes(l)) {
                const Node& nd = tree.node(i);
                if (nd.is_leaf()) {
                    sub[i] = {ord[i]};
                    continue;
                }
                for (int c : nd.child)
                    sub[i].insert(sub[i].end(), sub[c].begin(), sub[c].end());
            }

        std::vector<uint8_t> cnt((size_t)L * L, 0);
        for (const AuditRecord& a : audit) {
            ++mech_seen[(int)a.mech];
            for (int s : sub[a.src])
                for (int t : sub[a.tgt]) {
                    uint8_t& c = cnt[(size_t)s * L + t];
                    if (c < 255) ++c;
                }
        }

        const double r2 = delta * std::log(1 / eps);
        for (int s = 0; s < L; ++s) {
            const Node& ns = tree.node(canon[s]);
            const Vec2 cs = tree.box_center(ns);
            const double hs = tree.side(ns.level) / 2;
            for (int t = 0; t < L; ++t) {
                ++pairs;
                const uint8_t c = cnt[(size_t)s * L + t];
                if (c == 1) continue;
                char buf[200];
                if (c > 1) {
                    std::snprintf(buf, sizeof buf,
                                  "tree %d: a leaf pair was carried %d times",
                                  trial, (int)c);
                    *d = buf;
                    return false;
                }
                const Node& nt = tree.node(canon[t]);
                const Vec2 ct = tree.box_center(nt);
                const double ht = tree.side(nt.level) / 2;
                const double gx =
                    std::max(0.0, std::abs(cs.x - ct.x) - hs - ht);
                const double gy =
                    std::max(0.0, std::abs(cs.y - ct.y) - hs - ht);
                if (gx * gx + gy * gy <= r2 * (1 - 1e-9)) {
                    std::snprintf(buf, sizeof buf,
                                  "tree %d: a dropped pair is within kernel "
                                  "range (gap^2 %.3g vs %.3g)",
                                  trial, gx * gx + gy * gy, r2);
                    *d = buf;
                    return false;
                }
                ++dropped;
            }
        }
    }
    const bool all_mech = mech_seen[0] && mech_seen[1] && mech_seen[2] &&
                          mech_seen[3];
    char buf[220];
    std::snprintf(buf, sizeof buf,
                  "50 trees, %llu ordered leaf pairs: each carried once or "
                  "beyond cutoff (%llu dropped); all four mechanisms used",
                  (unsigned long long)pairs, (unsigned long long)dropped);
    *d = buf;
    return all_mech;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::fprintf(stderr, "usage: %s <criterion 1..10>\n", argv[0]);
        return 2;
    }
    const int c = std::atoi(argv[1]);
    using Fn = bool (*)(std::string*);
    static const Fn table[10] = {crit1, crit2, crit3, crit4, crit5,
                                 crit6, crit7, crit8, crit9, crit10};
    if (c < 1 || c > 10) {
        std::fprintf(stderr, "criterion number out of range\n");
        return 2;
    }
    std::string detail;
    bool ok = false;
    try {
        ok = table[c - 1](&detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    std::printf("criterion %d: %s - %s\n", c, ok ? "PASS" : "FAIL",
                detail.c_str());
    return ok ? 0 : 1;
}
