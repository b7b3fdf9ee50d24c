#include "boundary.hpp"

#include <algorithm>
#include <cmath>

#include "gauss_quad.hpp"
#include "quadtree.hpp"

namespace fgt {

namespace {

double density_at(const double* c, int nd, double s) {
    return legendre_eval(c, nd, s);
}

// single: rho * |G'| * K; double: rho * (x2',-x1') . grad_y K (the Jacobian
// cancels against the normalization of the normal)
double layer_integrand(const SegmentGeom& seg, const double* c, int nd,
                       bool dipole, Vec2 x, double delta, double s) {
    const Vec2 y = segment_point(seg, s);
    const Vec2 d = segment_deriv(seg, s);
    const double rho = density_at(c, nd, s);
    if (dipole)
        return rho * gauss_dipole_kernel(x, y, {d.y, -d.x}, delta);
    return rho * std::sqrt(norm2(d)) * gauss_kernel(x, y, delta);
}

}  // namespace

void discretize_boundary(const BoundaryLayer& bl, int quad_order,
                         std::vector<PointSource>* pts,
                         std::vector<DipoleSource>* dips) {
    require(quad_order >= 2 && quad_order <= 64, "bad boundary rule order");
    require(bl.segments.size() == bl.density.size(),
            "segment/density count mismatch");
    const QuadRule& gl = gauss_legendre(quad_order);
    for (size_t j = 0; j < bl.segments.size(); ++j) {
        const SegmentGeom& seg = bl.segments[j];
        const std::vector<double>& c = bl.density[j];
        for (int i = 0; i < quad_order; ++i) {
            const double s = gl.nodes[i];
            const Vec2 y = segment_point(seg, s);
            const Vec2 d = segment_deriv(seg, s);
            const double jac = std::sqrt(norm2(d));
            const double w = gl.weights[i] *
                             density_at(c.data(), (int)c.size(), s) * jac;
            if (bl.dipole) {
                require(jac > 0, "degenerate boundary parameterization");
                dips->push_back({y, w, {d.y / jac, -d.x / jac}});
            } else {
                pts->push_back({y, w});
            }
        }
    }
}

bool segment_resolved(const SegmentGeom& seg, double delta, double eps) {
    return segment_length(seg) <=
           2.0 * std::sqrt(std::log(1.0 / eps) * delta);
}

double boundary_correction(const SegmentGeom& seg, const double* density,
                           int nd, bool dipole, Vec2 x, double delta,
                           double eps, int corr_order, int quad_order,
                           bool* fired) {
    if (fired) *fired = false;
    const double rr = std::sqrt(delta * std::log(1.0 / eps));  // kernel reach

    // locate parameter runs within reach of the target
    constexpr int kScan = 64;
    double dist[kScan + 1];
    bool in[kScan + 1];
    bool any = false;
    for (int i = 0; i <= kScan; ++i) {
        const double s = -1.0 + 2.0 * i / kScan;
        dist[i] = std::sqrt(norm2(segment_point(seg, s) - x));
        in[i] = dist[i] <= rr;
        any |= in[i];
    }
    if (!any) return 0.0;
    if (fired) *fired = true;

    auto cross = [&](double so, double si) {
        // bisect between an outside and an inside parameter
        for (int it = 0; it < 50 && std::fabs(so - si) > 1e-12; ++it) {
            const double m = 0.5 * (so + si);
            if (std::sqrt(norm2(segment_point(seg, m) - x)) <= rr)
                si = m;
            else
                so = m;
        }
        return si;
    };

    std::vector<std::pair<double, double>> runs;
    int i = 0;
    while (i <= kScan) {
        if (!in[i]) {
            ++i;
            continue;
        }
        int j = i;
        while (j + 1 <= kScan && in[j + 1]) ++j;
        double a = (i == 0) ? -1.0
                            : cross(-1.0 + 2.0 * (i - 1) / kScan,
                                    -1.0 + 2.0 * i / kScan);
        double b = (j == kScan) ? 1.0
                                : cross(-1.0 + 2.0 * (j + 1) / kScan,
                                        -1.0 + 2.0 * j / kScan);
        runs.push_back({a, b});
        i = j + 1;
    }

    // accurate value over the runs: composite panels short enough that the
    // panel rule resolves the kernel's variation along the curve
    const QuadRule& gl = gauss_legendre(corr_order);
    double acc = 0;
    for (auto [a, b] : runs) {
        double arc = 0;  // crude arc estimate for panel sizing
        for (int m = 0; m < 8; ++m) {
            const double s = a + (b - a) * (m + 0.5) / 8;
            arc += std::sqrt(norm2(segment_deriv(seg, s))) * (b - a) / 8;
        }
        const int np = std::clamp(
            (int)std::ceil(arc / (5.1 * std::sqrt(delta))), 1, 64);
        const double w = (b - a) / np;
        for (int p = 0; p < np; ++p) {
            const double mid = a + (p + 0.5) * w;
            for (int g = 0; g < corr_order; ++g) {
                const double s = mid + 0.5 * w * gl.nodes[g];
                acc += 0.5 * w * gl.weights[g] *
                       layer_integrand(seg, density, nd, dipole, x, delta, s);
            }
        }
    }

    // the discrete rule's contribution for this segment, to be replaced
    const QuadRule& base = gauss_legendre(quad_order);
    double coarse = 0;
    for (int g = 0; g < quad_order; ++g)
        coarse += base.weights[g] *
                  layer_integrand(seg, density, nd, dipole, x, delta,
                                  base.nodes[g]);

    return acc - coarse;
}

BoundaryOutput boundary_transform(const BoundaryLayer& bl,
                                  const std::vector<Vec2>& targets,
                                  const BoundaryParams& par) {
    require(!bl.segments.empty(), "boundary has no segments");
    std::vector<PointSource> pts;
    std::vector<DipoleSource> dips;
    discretize_boundary(bl, par.quad_order, &pts, &dips);

    // square hull of sources and targets
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    auto grow = [&](Vec2 p) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    };
    for (const auto& p : pts) grow(p.pos);
    for (const auto& d : dips) grow(d.pos);
    for (const auto& t : targets) grow(t);
    const Vec2 center{0.5 * (x0 + x1), 0.5 * (y0 + y1)};
    double side = std::max(x1 - x0, y1 - y0);
    side = 1.02 * std::max(side, 1e-9);
    const BoxGeom domain{center, side};

    // seed the tree shape with zero-strength points at dipole positions so
    // dipole-only layers still refine
    std::vector<PointSource> seed = pts;
    for (const auto& d : dips) seed.push_back({d.pos, 0.0});
    Tree tree = Tree::from_points(domain, 8, std::move(seed), 48, 16);
    tree.add_dipoles(dips);

    TransformRequest req;
    req.delta = par.delta;
    req.eps = par.eps;
    req.periodic = false;
    req.threads = par.threads;
    req.want_grid = false;
    req.targets = targets;
    TransformResult tr = transform(tree, req);

    BoundaryOutput out;
    out.values = std::move(tr.point_out);
    out.stats = tr.stats;
    out.resolved.resize(bl.segments.size());
    for (size_t j = 0; j < bl.segments.size(); ++j)
        out.resolved[j] =
            segment_resolved(bl.segments[j], par.delta, par.eps) ? 1 : 0;

    for (size_t j = 0; j < bl.segments.size(); ++j) {
        if (out.resolved[j]) continue;
        const std::vector<double>& c = bl.density[j];
        for (size_t t = 0; t < targets.size(); ++t) {
            bool fired = false;
            const double corr = boundary_correction(
                bl.segments[j], c.data(), (int)c.size(), bl.dipole,
                targets[t], par.delta, par.eps, par.corr_order,
                par.quad_order, &fired);
            if (fired) {
                out.values[t] += corr;
                ++out.corrections_applied;
            }
        }
    }
    return out;
}

std::vector<SegmentGeom> make_ellipse(int nseg, int order) {
    require(nseg >= 1 && order >= 2, "bad ellipse parameters");
    const double pi = 3.14159265358979323846;
    std::vector<SegmentGeom> segs(nseg);
    const QuadRule& gl = gauss_legendre(std::max(32, 2 * order));
    for (int j = 0; j < nseg; ++j) {
        SegmentGeom& sg = segs[j];
        sg.order = order;
        sg.x1.assign(order, 0.0);
        sg.x2.assign(order, 0.0);
        std::vector<double> pv(order);
        for (size_t i = 0; i < gl.nodes.size(); ++i) {
            const double s = gl.nodes[i];
            const double th = 2 * pi * (j + 0.5 * (s + 1)) / nseg;
            legendre_values(order, s, pv.data());
            for (int n = 0; n < order; ++n) {
                const double w = gl.weights[i] * (2 * n + 1) / 2.0 * pv[n];
                sg.x1[n] += w * 0.45 * std::cos(th);
                sg.x2[n] += w * 0.25 * std::sin(th);
            }
        }
    }
    return segs;
}

std::vector<std::vector<double>> fit_boundary_density(
    const std::vector<SegmentGeom>& segs, int order,
    const std::function<double(Vec2)>& f) {
    std::vector<std::vector<double>> out(segs.size());
    const QuadRule& gl = gauss_legendre(std::max(32, 2 * order));
    std::vector<double> pv(order);
    for (size_t j = 0; j < segs.size(); ++j) {
        out[j].assign(order, 0.0);
        for (size_t i = 0; i < gl.nodes.size(); ++i) {
            const double s = gl.nodes[i];
            const double v = f(segment_point(segs[j], s));
            legendre_values(order, s, pv.data());
            for (int n = 0; n < order; ++n)
                out[j][n] += gl.weights[i] * (2 * n + 1) / 2.0 * pv[n] * v;
        }
    }
    return out;
}

}  // namespace fgt
