// C ABI wrapper: opaque handles, status codes and thread-local error text
// over the C++ core. No computation happens here beyond small glue.

#include "fgt/fgt.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <stdexcept>
#include <string>
#include <vector>

#include "boundary.hpp"
#include "chebyshev.hpp"
#include "direct.hpp"
#include "engine.hpp"
#include "gauss_quad.hpp"
#include "quadtree.hpp"
#include "serialize.hpp"

struct fgt_tree {
    fgt::Tree t;
};
struct fgt_boundary {
    fgt::BoundaryLayer b;
};
struct fgt_result {
    fgt::TransformResult r;
    long boundary_corrections = 0;
};

namespace {

thread_local std::string t_err;
thread_local fgt_status t_status = FGT_OK;

struct refinement_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

fgt_status record(fgt_status s, const std::string& msg) {
    t_status = s;
    t_err = msg;
    return s;
}

fgt_status ok() { return record(FGT_OK, ""); }

// Runs f, translating exceptions into status codes.
template <class F>
fgt_status guarded(F&& f) {
    try {
        f();
        return ok();
    } catch (const std::invalid_argument& e) {
        return record(FGT_ERR_INVALID, e.what());
    } catch (const refinement_error& e) {
        return record(FGT_ERR_REFINEMENT, e.what());
    } catch (const std::runtime_error& e) {
        return record(FGT_ERR_IO, e.what());
    } catch (const std::exception& e) {
        return record(FGT_ERR_INTERNAL, e.what());
    } catch (...) {
        return record(FGT_ERR_INTERNAL, "unknown failure");
    }
}

char* dup_string(const std::string& s) {
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (p) std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

std::vector<fgt::Vec2> to_vec2(const double* xy, long n, const char* what) {
    fgt::require(n >= 0, std::string(what) + ": negative count");
    fgt::require(n == 0 || xy, std::string(what) + ": null coordinates");
    std::vector<fgt::Vec2> v(n);
    for (long i = 0; i < n; ++i) v[i] = {xy[2 * i], xy[2 * i + 1]};
    return v;
}

fgt::TransformRequest to_request(const fgt_params* p) {
    fgt::require(p != nullptr, "null params");
    fgt::require(p->force_path >= 0 && p->force_path <= 2,
                 "force_path must be 0, 1 or 2");
    fgt::TransformRequest rq;
    rq.delta = p->delta;
    rq.eps = p->eps;
    rq.periodic = p->periodic != 0;
    rq.kernel_prefactor = p->kernel_prefactor;
    rq.threads = p->threads;
    rq.force_path = static_cast<fgt::ForcePath>(p->force_path);
    rq.want_grid = p->want_grid != 0;
    return rq;
}

}  // namespace

extern "C" {

const char* fgt_last_error(void) { return t_err.c_str(); }
fgt_status fgt_last_status(void) { return t_status; }
void fgt_free(void* p) { std::free(p); }

/* ---- trees ---- */

fgt_tree* fgt_tree_uniform(double cx, double cy, double side, int k,
                           int levels) {
    fgt_tree* out = nullptr;
    guarded([&] {
        out = new fgt_tree{
            fgt::Tree::uniform({{cx, cy}, side}, k, levels)};
    });
    return out;
}

fgt_tree* fgt_tree_adaptive(double cx, double cy, double side, int k,
                            fgt_sampler f, void* ctx, double tol,
                            int max_levels) {
    fgt_tree* out = nullptr;
    guarded([&] {
        fgt::require(f != nullptr, "null sampler");
        fgt::Sampler s = [f, ctx](const fgt::Vec2* xy, int n, double* vals) {
            std::vector<double> flat(2 * (size_t)n);
            for (int i = 0; i < n; ++i) {
                flat[2 * i] = xy[i].x;
                flat[2 * i + 1] = xy[i].y;
            }
            f(flat.data(), n, vals, ctx);
        };
        fgt::Tree t = fgt::Tree::adaptive({{cx, cy}, side}, k, s, tol,
                                          max_levels);
        // report leaves that hit the depth cap still showing coefficient
        // bands above the refinement threshold
        double gmax = 0;
        for (int id : t.leaves())
            for (double v : t.node(id).samples)
                gmax = std::max(gmax, std::abs(v));
        for (int id : t.leaves()) {
            const fgt::Node& nd = t.node(id);
            if (nd.level < max_levels) continue;
            double band = 0;
            for (int n2 = 0; n2 < k; ++n2)
                for (int n1 = 0; n1 + n2 < k; ++n1)
                    if (n1 + n2 >= k - 2)
                        band = std::max(
                            band, std::abs(nd.coef[fgt::coeff_index(k, n1, n2)]));
            if (band > tol * gmax)
                throw refinement_error(
                    "adaptive refinement hit the depth cap before reaching "
                    "the tolerance");
        }
        out = new fgt_tree{std::move(t)};
    });
    return out;
}

fgt_tree* fgt_tree_from_points(double cx, double cy, double side, int k,
                               const double* xy, const double* strength,
                               long n, int max_per_leaf, int max_levels) {
    fgt_tree* out = nullptr;
    guarded([&] {
        fgt::require(n == 0 || (xy && strength), "null point arrays");
        std::vector<fgt::PointSource> pts(n);
        for (long i = 0; i < n; ++i)
            pts[i] = {{xy[2 * i], xy[2 * i + 1]}, strength[i]};
        out = new fgt_tree{fgt::Tree::from_points(
            {{cx, cy}, side}, k, std::move(pts), max_per_leaf, max_levels)};
    });
    return out;
}

fgt_tree* fgt_tree_from_json(const char* text) {
    fgt_tree* out = nullptr;
    guarded([&] {
        fgt::require(text != nullptr, "null JSON text");
        out = new fgt_tree{fgt::tree_from_json(text)};
    });
    return out;
}

char* fgt_tree_to_json(const fgt_tree* t) {
    char* out = nullptr;
    guarded([&] {
        fgt::require(t != nullptr, "null tree");
        out = dup_string(fgt::tree_to_json(t->t));
        fgt::require(out != nullptr, "out of memory");
    });
    return out;
}

void fgt_tree_free(fgt_tree* t) { delete t; }

int fgt_tree_order(const fgt_tree* t) { return t ? t->t.order() : 0; }
int fgt_tree_max_level(const fgt_tree* t) { return t ? t->t.max_level() : 0; }

long fgt_tree_leaf_count(const fgt_tree* t) {
    return t ? (long)t->t.leaves().size() : 0;
}

long fgt_tree_grid_size(const fgt_tree* t) {
    if (!t) return 0;
    int k = t->t.order();
    return (long)t->t.leaves().size() * k * k;
}

fgt_status fgt_tree_grid_points(const fgt_tree* t, double* xy) {
    return guarded([&] {
        fgt::require(t && xy, "null argument");
        size_t at = 0;
        for (int id : t->t.leaves())
            for (fgt::Vec2 p : t->t.leaf_grid_points(id)) {
                xy[at++] = p.x;
                xy[at++] = p.y;
            }
    });
}

fgt_status fgt_tree_set_samples(fgt_tree* t, const double* vals, long n) {
    return guarded([&] {
        fgt::require(t && vals, "null argument");
        fgt::require(n == fgt_tree_grid_size(t),
                     "sample count must equal grid size");
        t->t.set_all_samples(vals);
    });
}

fgt_status fgt_tree_add_points(fgt_tree* t, const double* xy,
                               const double* strength, long n) {
    return guarded([&] {
        fgt::require(t, "null tree");
        fgt::require(n == 0 || (xy && strength), "null point arrays");
        std::vector<fgt::PointSource> pts(n);
        for (long i = 0; i < n; ++i)
            pts[i] = {{xy[2 * i], xy[2 * i + 1]}, strength[i]};
        t->t.add_points(pts);
    });
}

fgt_status fgt_tree_add_dipoles(fgt_tree* t, const double* xy,
                                const double* strength, const double* dir,
                                long n) {
    return guarded([&] {
        fgt::require(t, "null tree");
        fgt::require(n == 0 || (xy && strength && dir), "null dipole arrays");
        std::vector<fgt::DipoleSource> dips(n);
        for (long i = 0; i < n; ++i)
            dips[i] = {{xy[2 * i], xy[2 * i + 1]},
                       strength[i],
                       {dir[2 * i], dir[2 * i + 1]}};
        t->t.add_dipoles(dips);
    });
}

fgt_status fgt_grid_mean(const fgt_tree* t, const double* vals, long n,
                         double* out) {
    return guarded([&] {
        fgt::require(t && vals && out, "null argument");
        fgt::require(n == fgt_tree_grid_size(t),
                     "value count must equal grid size");
        int k = t->t.order();
        const fgt::QuadRule& q = fgt::gauss_legendre(k);
        double acc = 0;
        size_t at = 0;
        for (int id : t->t.leaves()) {
            const fgt::Node& nd = t->t.node(id);
            double area = t->t.side(nd.level) * t->t.side(nd.level);
            double cell = 0;
            for (int j = 0; j < k; ++j)
                for (int i = 0; i < k; ++i)
                    cell += q.weights[i] * q.weights[j] *
                            fgt::grid_interpolate(k, vals + at, q.nodes[i],
                                                  q.nodes[j]);
            acc += area * cell / 4;  // reference square has area 4
            at += (size_t)k * k;
        }
        double dom = t->t.domain().side;
        *out = acc / (dom * dom);
    });
}

/* ---- transform ---- */

void fgt_params_init(fgt_params* p) {
    if (!p) return;
    p->delta = 0;
    p->eps = 1e-9;
    p->periodic = 0;
    p->kernel_prefactor = 1.0;
    p->threads = 0;
    p->force_path = 0;
    p->want_grid = 1;
}

fgt_status fgt_transform(fgt_tree* t, const fgt_params* p,
                         const double* targets_xy, long n_targets,
                         fgt_result** out) {
    return guarded([&] {
        fgt::require(t && out, "null argument");
        fgt::TransformRequest rq = to_request(p);
        rq.targets = to_vec2(targets_xy, n_targets, "targets");
        *out = new fgt_result{fgt::transform(t->t, rq), 0};
    });
}

long fgt_result_grid_size(const fgt_result* r) {
    return r ? (long)r->r.grid.size() : 0;
}

const double* fgt_result_grid(const fgt_result* r) {
    return r && !r->r.grid.empty() ? r->r.grid.data() : nullptr;
}

long fgt_result_point_count(const fgt_result* r) {
    return r ? (long)r->r.point_out.size() : 0;
}

const double* fgt_result_points(const fgt_result* r) {
    return r && !r->r.point_out.empty() ? r->r.point_out.data() : nullptr;
}

fgt_stats fgt_result_stats(const fgt_result* r) {
    fgt_stats s{};
    if (!r) return s;
    const fgt::TransformStats& st = r->r.stats;
    s.l_cut = st.l_cut;
    s.r_c = st.r_c;
    for (uint8_t u : st.used_pw) s.used_pw |= u != 0;
    s.far_translations = (long)st.far_translations;
    s.near_applies = (long)st.near_applies;
    s.point_kernel_evals = (long)st.point_kernel_evals;
    s.boundary_corrections = r->boundary_corrections;
    s.seconds_build = st.seconds_build;
    s.seconds_upward = st.seconds_upward;
    s.seconds_downward = st.seconds_downward;
    s.seconds_near = st.seconds_near;
    s.seconds_total = st.seconds_total;
    return s;
}

void fgt_result_free(fgt_result* r) { delete r; }

/* ---- boundary layers ---- */

fgt_boundary* fgt_boundary_from_json(const char* text) {
    fgt_boundary* out = nullptr;
    guarded([&] {
        fgt::require(text != nullptr, "null JSON text");
        out = new fgt_boundary{fgt::boundary_from_json(text)};
    });
    return out;
}

char* fgt_boundary_to_json(const fgt_boundary* b) {
    char* out = nullptr;
    guarded([&] {
        fgt::require(b != nullptr, "null boundary");
        out = dup_string(fgt::boundary_to_json(b->b));
        fgt::require(out != nullptr, "out of memory");
    });
    return out;
}

fgt_boundary* fgt_boundary_ellipse(int nseg, int order, int dipole) {
    fgt_boundary* out = nullptr;
    guarded([&] {
        fgt::BoundaryLayer bl;
        bl.segments = fgt::make_ellipse(nseg, order);
        bl.density = fgt::fit_boundary_density(
            bl.segments, order,
            [](fgt::Vec2 p) { return 1 + p.x + p.y * p.y; });
        bl.dipole = dipole != 0;
        out = new fgt_boundary{std::move(bl)};
    });
    return out;
}

void fgt_boundary_free(fgt_boundary* b) { delete b; }

long fgt_boundary_segment_count(const fgt_boundary* b) {
    return b ? (long)b->b.segments.size() : 0;
}

fgt_status fgt_boundary_transform(const fgt_boundary* b, const fgt_params* p,
                                  const double* targets_xy, long n_targets,
                                  fgt_result** out) {
    return guarded([&] {
        fgt::require(b && p && out, "null argument");
        fgt::BoundaryParams bp;
        bp.delta = p->delta;
        bp.eps = p->eps;
        bp.threads = p->threads;
        std::vector<fgt::Vec2> tg = to_vec2(targets_xy, n_targets, "targets");
        fgt::BoundaryOutput bo = fgt::boundary_transform(b->b, tg, bp);
        fgt::TransformResult tr;
        tr.point_out = std::move(bo.values);
        tr.stats = bo.stats;
        *out = new fgt_result{std::move(tr), (long)bo.corrections_applied};
    });
}

/* ---- reference evaluators ---- */

fgt_status fgt_direct_dgt(const double* xy, const double* strength, long n,
                          const double* dip_xy, const double* dip_strength,
                          const double* dip_dir, long n_dip,
                          const double* targets_xy, long m, double delta,
                          int periodic, double domain_side, double* out) {
    return guarded([&] {
        fgt::require(out, "null output");
        fgt::require(n == 0 || (xy && strength), "null point arrays");
        fgt::require(n_dip == 0 || (dip_xy && dip_strength && dip_dir),
                     "null dipole arrays");
        std::vector<fgt::PointSource> pts(n);
        for (long i = 0; i < n; ++i)
            pts[i] = {{xy[2 * i], xy[2 * i + 1]}, strength[i]};
        std::vector<fgt::DipoleSource> dips(n_dip);
        for (long i = 0; i < n_dip; ++i)
            dips[i] = {{dip_xy[2 * i], dip_xy[2 * i + 1]},
                       dip_strength[i],
                       {dip_dir[2 * i], dip_dir[2 * i + 1]}};
        std::vector<fgt::Vec2> tg = to_vec2(targets_xy, m, "targets");
        if (periodic)
            fgt::direct_dgt_periodic(pts, dips, tg.data(), (int)m, delta,
                                     domain_side, out);
        else
            fgt::direct_dgt(pts, dips, tg.data(), (int)m, delta, out);
    });
}

fgt_status fgt_oracle_volume(const fgt_tree* t, const double* targets_xy,
                             long m, double delta, int periodic, double* out) {
    return guarded([&] {
        fgt::require(t && out, "null argument");
        std::vector<fgt::Vec2> tg = to_vec2(targets_xy, m, "targets");
        std::vector<fgt::LeafPatch> patches = t->t.leaf_patches();
        for (long i = 0; i < m; ++i)
            out[i] = periodic
                         ? fgt::direct_volume_periodic(patches, tg[i], delta,
                                                       t->t.domain().side)
                         : fgt::direct_volume(patches, tg[i], delta);
    });
}

fgt_status fgt_oracle_boundary(const fgt_boundary* b, const double* targets_xy,
                               long m, double delta, double* out) {
    return guarded([&] {
        fgt::require(b && out, "null argument");
        std::vector<fgt::Vec2> tg = to_vec2(targets_xy, m, "targets");
        for (long i = 0; i < m; ++i)
            out[i] = fgt::direct_boundary(b->b.segments, b->b.density,
                                          b->b.dipole, tg[i], delta);
    });
}

/* ---- files ---- */

fgt_status fgt_write_fgto(const char* path, const double* vals, long n) {
    return guarded([&] {
        fgt::require(path && (n == 0 || vals), "null argument");
        fgt::require(n >= 0, "negative count");
        fgt::write_fgto(path, vals, (size_t)n);
    });
}

fgt_status fgt_read_fgto(const char* path, double** vals, long* n) {
    return guarded([&] {
        fgt::require(path && vals && n, "null argument");
        std::vector<double> v = fgt::read_fgto(path);
        double* p = static_cast<double*>(std::malloc(
            std::max<size_t>(1, v.size()) * sizeof(double)));
        fgt::require(p != nullptr, "out of memory");
        std::memcpy(p, v.data(), v.size() * sizeof(double));
        *vals = p;
        *n = (long)v.size();
    });
}

fgt_status fgt_write_csv(const char* path, const double* xy,
                         const double* vals, long n) {
    return guarded([&] {
        fgt::require(path && (n == 0 || (xy && vals)), "null argument");
        std::vector<fgt::Vec2> pts = to_vec2(xy, n, "coordinates");
        fgt::write_csv(path, pts, std::vector<double>(vals, vals + n));
    });
}

fgt_status fgt_read_text(const char* path, char** text) {
    return guarded([&] {
        fgt::require(path && text, "null argument");
        *text = dup_string(fgt::read_text_file(path));
        fgt::require(*text != nullptr, "out of memory");
    });
}

fgt_status fgt_write_text(const char* path, const char* text) {
    return guarded([&] {
        fgt::require(path && text, "null argument");
        fgt::write_text_file(path, text);
    });
}

}  // extern "C"
