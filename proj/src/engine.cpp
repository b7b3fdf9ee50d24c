#include "engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <memory>
#include <thread>

#include "chebyshev.hpp"
#include "lattice.hpp"
#include "tables.hpp"

namespace fgt {

namespace {

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

template <class F>
void parallel_for(int n, int threads, F&& f) {
    if (threads <= 0) threads = (int)std::thread::hardware_concurrency();
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i; (i = next.fetch_add(1)) < n;) f(i);
    };
    const int nt = std::min(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(nt - 1);
    for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

struct Engine {
    Tree& tree;
    const TransformRequest& req;
    TransformResult res;

    int k;
    double delta, sd, D, eps_eff;
    Plan plan;
    bool any_far = false;  // some level takes part in the expansion passes

    std::unique_ptr<Translators> tr;
    std::vector<std::unique_ptr<MomentTable>> moments;  // by leaf level
    std::vector<std::unique_ptr<NearTable>> tbl_col;    // by source level
    std::vector<std::unique_ptr<NearTable>> tbl_down;   // targets one finer
    std::vector<std::unique_ptr<NearTable>> tbl_up;     // targets one coarser
    std::vector<std::unique_ptr<CoarseTable>> tbl_coarse;  // by target level

    std::vector<Expansion> phi, psi;
    std::vector<char> has_poly, has_src;
    std::vector<int> leafcnt;                    // leaves per level
    std::vector<std::vector<int>> leaf_targets;  // node -> target ids
    std::vector<Vec2> tpos;                      // validated positions

    std::atomic<uint64_t> n_far{0}, n_near{0}, n_pt{0};

    Engine(Tree& t, const TransformRequest& r) : tree(t), req(r) {}

    void record(Mechanism m, int src, int tgt) {
        if (req.audit) req.audit->push_back({m, src, tgt});
    }

    // effective global cell of a list entry at its own level
    static int64_t gcell(uint32_t ix, int shift, int level) {
        return (int64_t)ix + ((int64_t)shift << level);
    }

    void prepare() {
        require(req.delta > 0, "delta must be positive");
        require(req.eps >= 1e-14 && req.eps <= 1e-1,
                "eps must lie in [1e-14, 1e-1]");
        require(req.kernel_prefactor > 0, "kernel prefactor must be positive");
        delta = req.delta;
        sd = std::sqrt(delta);
        D = tree.domain().side;
        k = tree.order();
        eps_eff = std::min(0.5, req.eps / req.kernel_prefactor);
        require(eps_eff >= 1e-300, "prefactor overflows the tolerance");

        tree.ensure_lists(req.periodic);

        // bin point targets to leaves
        const Vec2 lo = tree.domain().center - 0.5 * Vec2{D, D};
        leaf_targets.assign(tree.node_count(), {});
        tpos.resize(req.targets.size());
        for (size_t t = 0; t < req.targets.size(); ++t) {
            Vec2 x = req.targets[t];
            if (req.periodic) {
                double u = std::fmod(x.x - lo.x, D);
                double v = std::fmod(x.y - lo.y, D);
                x.x = lo.x + (u < 0 ? u + D : u);
                x.y = lo.y + (v < 0 ? v + D : v);
            } else {
                require(tree.domain().contains(x),
                        "point target outside the domain");
            }
            tpos[t] = x;
            int leaf = tree.leaf_containing(x);
            require(leaf >= 0, "point target outside the domain");
            leaf_targets[leaf].push_back((int)t);
        }

        // source presence flags, bottom-up
        const int nn = tree.node_count();
        has_poly.assign(nn, 0);
        has_src.assign(nn, 0);
        leafcnt.assign(tree.max_level() + 1, 0);
        std::vector<char> leaf_poly_at(tree.max_level() + 1, 0);
        for (int l = tree.max_level(); l >= 0; --l) {
            for (int i : tree.level_nodes(l)) {
                const Node& nd = tree.node(i);
                if (nd.is_leaf()) {
                    ++leafcnt[l];
                    for (double c : nd.coef)
                        if (c != 0) {
                            has_poly[i] = 1;
                            break;
                        }
                    if (has_poly[i]) leaf_poly_at[l] = 1;
                    has_src[i] = has_poly[i] || !nd.pts.empty() || !nd.dips.empty();
                } else {
                    for (int c : nd.child)
                        if (has_src[c]) has_src[i] = 1;
                }
            }
        }
        bool any_poly = false;
        for (char f : leaf_poly_at) any_poly |= (f != 0);

        std::vector<int> counts(tree.max_level() + 1);
        for (int l = 0; l <= tree.max_level(); ++l)
            counts[l] = (int)tree.level_nodes(l).size();
        plan = make_plan(D, tree.max_level(), counts, delta, eps_eff,
                         req.periodic, req.force_path);
        any_far = plan.l_cut <= tree.max_level();

        if (any_far) {
            tr = std::make_unique<Translators>(plan);
            phi.resize(nn);
            psi.resize(nn);
            moments.resize(tree.max_level() + 1);
            for (int l = plan.l_cut; l <= tree.max_level(); ++l)
                if (leaf_poly_at[l])
                    moments[l] = std::make_unique<MomentTable>(
                        k, plan.level[l].n_h, tree.side(l) / (2 * sd),
                        tree.side(l) / 2);
            tbl_coarse.resize(tree.max_level() + 1);
            for (int l = std::max(plan.l_cut, 1); l <= tree.max_level(); ++l)
                if (any_poly && leafcnt[l - 1] > 0 && counts[l] > 0)
                    tbl_coarse[l] = std::make_unique<CoarseTable>(
                        build_coarse_table(k, plan.level[l].n_t,
                                           tree.side(l - 1), delta));
        }

        tbl_col.resize(tree.max_level() + 1);
        tbl_down.resize(tree.max_level() + 1);
        tbl_up.resize(tree.max_level() + 1);
        if (any_poly) {
            for (int l = 0; l <= tree.max_level(); ++l) {
                if (leafcnt[l] == 0) continue;
                tbl_col[l] = std::make_unique<NearTable>(
                    build_near_table(k, tree.side(l), delta, 0));
                if (l + 1 <= tree.max_level() && leafcnt[l + 1] > 0)
                    tbl_down[l] = std::make_unique<NearTable>(
                        build_near_table(k, tree.side(l), delta, 1));
                if (l > 0 && leafcnt[l - 1] > 0)
                    tbl_up[l] = std::make_unique<NearTable>(
                        build_near_table(k, tree.side(l), delta, 2));
            }
        }
    }

    void upward() {
        if (!any_far) return;
        for (int l = tree.max_level(); l >= plan.l_cut; --l) {
            for (int i : tree.level_nodes(l)) {
                const Node& nd = tree.node(i);
                Expansion& e = phi[i];
                e.reset(plan.level[l].n_h);
                if (!has_src[i]) continue;
                if (nd.is_leaf()) {
                    const Vec2 c = tree.box_center(nd);
                    if (has_poly[i]) moments[l]->add_outgoing(nd.coef.data(), &e);
                    for (int pi : nd.pts) {
                        const PointSource& p = tree.points()[pi];
                        form_outgoing_from_point(c, sd, p.pos, p.strength, &e);
                    }
                    for (int di : nd.dips) {
                        const DipoleSource& d = tree.dipoles()[di];
                        form_outgoing_from_dipole(c, sd, d.pos, d.strength,
                                                  d.dir, &e);
                    }
                } else {
                    for (int j = 0; j < 4; ++j) {
                        const int c = nd.child[j];
                        if (has_src[c])
                            tr->shift_outgoing(l + 1, j & 1, j >> 1, phi[c], &e);
                    }
                }
            }
        }
    }

    void downward() {
        if (!any_far) return;
        std::vector<int> widx(tree.node_count(), -1);
        for (int l = plan.l_cut; l <= tree.max_level(); ++l) {
            const LevelPlan& lp = plan.level[l];
            const std::vector<int>& lev = tree.level_nodes(l);
            std::vector<PlaneWave> wv;
            if (lp.use_pw) {
                wv.resize(lev.size());
                for (size_t j = 0; j < lev.size(); ++j) {
                    widx[lev[j]] = (int)j;
                    if (has_src[lev[j]]) {
                        outgoing_to_pw(phi[lev[j]], lp, &wv[j]);
                    } else {
                        wv[j].reset(lp.p_t, lp.pw_h);
                    }
                }
            }
            for (int i : lev) {
                const Node& nd = tree.node(i);
                Expansion& e = psi[i];
                e.reset(lp.n_t);
                if (l > plan.l_cut) {
                    tr->shift_local(l, nd.ix & 1, nd.iy & 1, psi[nd.parent], &e);
                } else if (req.periodic && l == 0 && has_src[i]) {
                    lattice_root_local(phi[i], delta, D, &e);
                }

                if (lp.use_pw) {
                    PlaneWave acc;
                    bool got = false;
                    for (const ListEntry& le : nd.ilist) {
                        record(Mechanism::kFar, le.node, i);
                        if (!has_src[le.node]) continue;
                        const Node& s = tree.node(le.node);
                        const int dx = (int)((int64_t)nd.ix - gcell(s.ix, le.sx, l));
                        const int dy = (int)((int64_t)nd.iy - gcell(s.iy, le.sy, l));
                        if (!got) {
                            acc.reset(lp.p_t, lp.pw_h);
                            got = true;
                        }
                        pw_accumulate(wv[widx[le.node]], lp.r, dx, dy, &acc);
                        ++n_far;
                    }
                    if (got) pw_to_local(acc, lp.n_t, &e);
                } else {
                    for (const ListEntry& le : nd.ilist) {
                        record(Mechanism::kFar, le.node, i);
                        if (!has_src[le.node]) continue;
                        const Node& s = tree.node(le.node);
                        const int dx = (int)((int64_t)nd.ix - gcell(s.ix, le.sx, l));
                        const int dy = (int)((int64_t)nd.iy - gcell(s.iy, le.sy, l));
                        tr->outgoing_to_local(l, dx, dy, phi[le.node], &e);
                        ++n_far;
                    }
                }

                for (const ListEntry& le : nd.coarse_ilist) {
                    record(Mechanism::kCoarsePull, le.node, i);
                    if (!has_src[le.node]) continue;
                    const Node& s = tree.node(le.node);
                    const int64_t gx = gcell(s.ix, le.sx, l - 1);
                    const int64_t gy = gcell(s.iy, le.sy, l - 1);
                    if (has_poly[le.node]) {
                        const int o1 = (int)((int64_t)nd.ix - 2 * gx + 2);
                        const int o2 = (int)((int64_t)nd.iy - 2 * gy + 2);
                        apply_coarse(*tbl_coarse[l], o1, o2, s.coef.data(),
                                     e.a.data());
                        ++n_near;
                    }
                    const Vec2 shift{le.sx * D, le.sy * D};
                    const Vec2 tc = tree.box_center(nd);
                    for (int pi : s.pts) {
                        const PointSource& p = tree.points()[pi];
                        form_local_from_point(tc, sd, p.pos + shift, p.strength,
                                              &e);
                    }
                    for (int di : s.dips) {
                        const DipoleSource& d = tree.dipoles()[di];
                        form_local_from_dipole(tc, sd, d.pos + shift, d.strength,
                                               d.dir, &e);
                    }
                }
            }
        }
    }

    void evaluate() {
        const std::vector<int> canon = tree.leaves();
        const int kk = k * k;
        if (req.want_grid) res.grid.assign((size_t)canon.size() * kk, 0.0);
        res.point_out.assign(req.targets.size(), 0.0);
        const double pref = req.kernel_prefactor;
        // direct kernel sums ignore pairs beyond the cutoff plus slack
        const double cut2 = delta * (plan.r_c + 6) * (plan.r_c + 6);

        auto work = [&](int si) {
            const int i = canon[si];
            const Node& nd = tree.node(i);
            const std::vector<int>& tg = leaf_targets[i];
            const bool wgrid = req.want_grid;
            if (!wgrid && tg.empty() && !req.audit) return;
            const int l = nd.level;
            const Vec2 c = tree.box_center(nd);
            const double half = tree.side(l) / 2;
            const bool smooth_grid = wgrid || !tg.empty();

            std::vector<Vec2> gp;
            if (smooth_grid) gp = tree.leaf_grid_points(i);
            std::vector<double> far, smooth, ptn;
            if (wgrid) far.assign(kk, 0.0), ptn.assign(kk, 0.0);
            if (smooth_grid) smooth.assign(kk, 0.0);
            std::vector<double> tfar(tg.size(), 0.0), tnear(tg.size(), 0.0);

            // far field: local expansion, then outgoing expansions of
            // non-adjacent finer boxes under own colleagues
            if (any_far && l >= plan.l_cut && psi[i].order > 0) {
                if (wgrid)
                    for (int g = 0; g < kk; ++g)
                        far[g] = eval_local(psi[i], c, sd, gp[g]);
                for (size_t t = 0; t < tg.size(); ++t)
                    tfar[t] = eval_local(psi[i], c, sd, tpos[tg[t]]);
            }
            if (any_far && l >= plan.l_cut - 1) {
                for (const ListEntry& le : nd.slist) {
                    record(Mechanism::kSourceEval, le.node, i);
                    if (!has_src[le.node]) continue;
                    const Node& s = tree.node(le.node);
                    const Vec2 sc = tree.box_center(s.level,
                                                    gcell(s.ix, le.sx, s.level),
                                                    gcell(s.iy, le.sy, s.level));
                    if (wgrid)
                        for (int g = 0; g < kk; ++g)
                            far[g] += eval_outgoing(phi[le.node], sc, sd, gp[g]);
                    for (size_t t = 0; t < tg.size(); ++t)
                        tfar[t] += eval_outgoing(phi[le.node], sc, sd, tpos[tg[t]]);
                    ++n_far;
                }
            }

            // near field
            auto near_points = [&](const Node& s, const ListEntry& le) {
                if (s.pts.empty() && s.dips.empty()) return;
                const Vec2 shift{le.sx * D, le.sy * D};
                uint64_t evals = 0;
                for (int pi : s.pts) {
                    const PointSource& p = tree.points()[pi];
                    const Vec2 y = p.pos + shift;
                    if (wgrid)
                        for (int g = 0; g < kk; ++g) {
                            const double d2 = norm2(gp[g] - y);
                            if (d2 > cut2) continue;
                            ptn[g] += p.strength * std::exp(-d2 / delta);
                            ++evals;
                        }
                    for (size_t t = 0; t < tg.size(); ++t) {
                        const double d2 = norm2(tpos[tg[t]] - y);
                        if (d2 > cut2) continue;
                        tnear[t] += p.strength * std::exp(-d2 / delta);
                        ++evals;
                    }
                }
                for (int di : s.dips) {
                    const DipoleSource& d = tree.dipoles()[di];
                    const Vec2 y = d.pos + shift;
                    if (wgrid)
                        for (int g = 0; g < kk; ++g) {
                            if (norm2(gp[g] - y) > cut2) continue;
                            ptn[g] += d.strength *
                                      gauss_dipole_kernel(gp[g], y, d.dir, delta);
                            ++evals;
                        }
                    for (size_t t = 0; t < tg.size(); ++t) {
                        if (norm2(tpos[tg[t]] - y) > cut2) continue;
                        tnear[t] += d.strength *
                                    gauss_dipole_kernel(tpos[tg[t]], y, d.dir,
                                                        delta);
                        ++evals;
                    }
                }
                n_pt += evals;
            };

            for (const ListEntry& le : nd.colleagues) {
                const Node& s = tree.node(le.node);
                if (!s.is_leaf()) continue;
                record(Mechanism::kNear, le.node, i);
                if (!has_src[le.node]) continue;
                if (has_poly[le.node] && smooth_grid) {
                    const int o1 = (int)((int64_t)nd.ix - gcell(s.ix, le.sx, l) + 1);
                    const int o2 = (int)((int64_t)nd.iy - gcell(s.iy, le.sy, l) + 1);
                    apply_near(*tbl_col[l], o1, o2, s.coef.data(), smooth.data());
                    ++n_near;
                }
                near_points(s, le);
            }
            for (const ListEntry& le : nd.fine_near) {
                record(Mechanism::kNear, le.node, i);
                if (!has_src[le.node]) continue;
                const Node& s = tree.node(le.node);  // leaf, level l+1
                if (has_poly[le.node] && smooth_grid) {
                    const int o1 =
                        (int)(2 * (int64_t)nd.ix - gcell(s.ix, le.sx, l + 1) + 2);
                    const int o2 =
                        (int)(2 * (int64_t)nd.iy - gcell(s.iy, le.sy, l + 1) + 2);
                    apply_near(*tbl_up[l + 1], o1, o2, s.coef.data(),
                               smooth.data());
                    ++n_near;
                }
                near_points(s, le);
            }
            for (const ListEntry& le : nd.coarse_near) {
                record(Mechanism::kNear, le.node, i);
                if (!has_src[le.node]) continue;
                const Node& s = tree.node(le.node);  // childless, level l-1
                if (has_poly[le.node] && smooth_grid) {
                    const int o1 =
                        (int)((int64_t)nd.ix - 2 * gcell(s.ix, le.sx, l - 1) + 1);
                    const int o2 =
                        (int)((int64_t)nd.iy - 2 * gcell(s.iy, le.sy, l - 1) + 1);
                    apply_near(*tbl_down[l - 1], o1, o2, s.coef.data(),
                               smooth.data());
                    ++n_near;
                }
                near_points(s, le);
            }

            if (wgrid) {
                double* out = &res.grid[(size_t)si * kk];
                for (int g = 0; g < kk; ++g)
                    out[g] = pref * (far[g] + smooth[g] + ptn[g]);
            }
            for (size_t t = 0; t < tg.size(); ++t) {
                const Vec2 x = tpos[tg[t]];
                const double sm = grid_interpolate(k, smooth.data(),
                                                   (x.x - c.x) / half,
                                                   (x.y - c.y) / half);
                res.point_out[tg[t]] = pref * (tfar[t] + sm + tnear[t]);
            }
        };
        parallel_for((int)canon.size(), req.audit ? 1 : req.threads, work);
    }

    TransformResult run() {
        const double t0 = now_seconds();
        prepare();
        const double t1 = now_seconds();
        upward();
        const double t2 = now_seconds();
        downward();
        const double t3 = now_seconds();
        evaluate();
        const double t4 = now_seconds();

        TransformStats& st = res.stats;
        st.l_cut = plan.l_cut;
        st.r_c = plan.r_c;
        const int nl = tree.max_level() + 1;
        st.n_h.resize(nl);
        st.n_t.resize(nl);
        st.p_t.resize(nl);
        st.used_pw.resize(nl);
        for (int l = 0; l < nl; ++l) {
            st.n_h[l] = plan.level[l].n_h;
            st.n_t[l] = plan.level[l].n_t;
            st.p_t[l] = plan.level[l].p_t;
            st.used_pw[l] = plan.level[l].use_pw ? 1 : 0;
        }
        st.far_translations = n_far.load();
        st.near_applies = n_near.load();
        st.point_kernel_evals = n_pt.load();
        st.seconds_build = t1 - t0;
        st.seconds_upward = t2 - t1;
        st.seconds_downward = t3 - t2;
        st.seconds_near = t4 - t3;
        st.seconds_total = t4 - t0;
        return std::move(res);
    }
};

}  // namespace

TransformResult transform(Tree& tree, const TransformRequest& req) {
    Engine e(tree, req);
    return e.run();
}

}  // namespace fgt
