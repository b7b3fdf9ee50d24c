#include "direct.hpp"

#include <algorithm>
#include <cmath>

#include "chebyshev.hpp"
#include "gauss_quad.hpp"

namespace fgt {

namespace {

constexpr double kPi = 3.14159265358979323846;
// Kernel values beyond this many standard widths are < 1e-18 and ignored.
constexpr double kSupportRadii = 6.5;

}  // namespace

// ---- discrete sums ----

void direct_dgt(const std::vector<PointSource>& points,
                const std::vector<DipoleSource>& dipoles, const Vec2* targets,
                int n_targets, double delta, double* out) {
    for (int t = 0; t < n_targets; ++t) {
        double acc = 0;
        for (const auto& p : points)
            acc += p.strength * gauss_kernel(targets[t], p.pos, delta);
        for (const auto& d : dipoles)
            acc += d.strength * gauss_dipole_kernel(targets[t], d.pos, d.dir, delta);
        out[t] = acc;
    }
}

void direct_dgt_periodic(const std::vector<PointSource>& points,
                         const std::vector<DipoleSource>& dipoles,
                         const Vec2* targets, int n_targets, double delta,
                         double domain_side, double* out) {
    require(domain_side > 0, "periodic sum needs a positive domain side");
    int J = 1 + (int)std::ceil(kSupportRadii * std::sqrt(delta) / domain_side);
    for (int t = 0; t < n_targets; ++t) out[t] = 0;
    std::vector<Vec2> shifted(n_targets);
    std::vector<double> tmp(n_targets);
    for (int j1 = -J; j1 <= J; ++j1) {
        for (int j2 = -J; j2 <= J; ++j2) {
            Vec2 off{j1 * domain_side, j2 * domain_side};
            for (int t = 0; t < n_targets; ++t) shifted[t] = targets[t] - off;
            direct_dgt(points, dipoles, shifted.data(), n_targets, delta,
                       tmp.data());
            for (int t = 0; t < n_targets; ++t) out[t] += tmp[t];
        }
    }
}

// ---- continuous volume sources ----

namespace {

// Basis values computed by a different route than the fast path uses:
// powers for the monomial basis, cos(n acos u) for Chebyshev.
void oracle_basis(int k, double u, double* out) {
    if (basis_is_monomial(k)) {
        double p = 1;
        for (int n = 0; n < k; ++n) {
            out[n] = p;
            p *= u;
        }
    } else {
        double uc = std::min(1.0, std::max(-1.0, u));
        double a = std::acos(uc);
        for (int n = 0; n < k; ++n) out[n] = std::cos(n * a);
    }
}

double patch_eval(const LeafPatch& leaf, double u1, double u2) {
    double b1[32], b2[32];
    oracle_basis(leaf.k, u1, b1);
    oracle_basis(leaf.k, u2, b2);
    double s = 0;
    int idx = 0;
    for (int n2 = 0; n2 < leaf.k; ++n2)
        for (int n1 = 0; n1 + n2 < leaf.k; ++n1) s += leaf.coef[idx++] * b1[n1] * b2[n2];
    return s;
}

}  // namespace

double direct_volume_one(const LeafPatch& leaf, Vec2 x, double delta) {
    const double sd = std::sqrt(delta);
    const double R = kSupportRadii * sd;
    const double s = leaf.box.side;
    const Vec2 c = leaf.box.center;
    double gx = std::max(0.0, std::abs(x.x - c.x) - s / 2);
    double gy = std::max(0.0, std::abs(x.y - c.y) - s / 2);
    if (gx * gx + gy * gy > R * R) return 0.0;

    int np = (int)std::ceil(s / (std::min(sd, s) / 2));
    double pw = s / np;
    const QuadRule& q = gauss_legendre(20);
    const int nq = (int)q.nodes.size();
    const double lo1 = c.x - s / 2, lo2 = c.y - s / 2;

    double acc = 0;
    for (int p2 = 0; p2 < np; ++p2) {
        double a2 = lo2 + p2 * pw;
        double d2 = std::max({0.0, x.y - (a2 + pw), a2 - x.y});
        if (d2 > R) continue;
        for (int p1 = 0; p1 < np; ++p1) {
            double a1 = lo1 + p1 * pw;
            double d1 = std::max({0.0, x.x - (a1 + pw), a1 - x.x});
            if (d1 * d1 + d2 * d2 > R * R) continue;
            for (int j = 0; j < nq; ++j) {
                double y2 = a2 + pw * (q.nodes[j] + 1) / 2;
                double k2 = std::exp(-(x.y - y2) * (x.y - y2) / delta);
                if (k2 < 1e-19) continue;
                for (int i = 0; i < nq; ++i) {
                    double y1 = a1 + pw * (q.nodes[i] + 1) / 2;
                    double k1 = std::exp(-(x.x - y1) * (x.x - y1) / delta);
                    double f = patch_eval(leaf, 2 * (y1 - c.x) / s, 2 * (y2 - c.y) / s);
                    acc += q.weights[i] * q.weights[j] * (pw * pw / 4) * k1 * k2 * f;
                }
            }
        }
    }
    return acc;
}

double direct_volume(const std::vector<LeafPatch>& leaves, Vec2 x,
                     double delta) {
    double acc = 0;
    for (const auto& leaf : leaves) acc += direct_volume_one(leaf, x, delta);
    return acc;
}

double direct_volume_periodic(const std::vector<LeafPatch>& leaves, Vec2 x,
                              double delta, double domain_side) {
    int J = 1 + (int)std::ceil(kSupportRadii * std::sqrt(delta) / domain_side);
    double acc = 0;
    for (int j1 = -J; j1 <= J; ++j1)
        for (int j2 = -J; j2 <= J; ++j2)
            acc += direct_volume(leaves, {x.x - j1 * domain_side, x.y - j2 * domain_side},
                                 delta);
    return acc;
}

// ---- boundary layers ----

Vec2 segment_point(const SegmentGeom& seg, double s) {
    return {legendre_eval(seg.x1.data(), seg.order, s),
            legendre_eval(seg.x2.data(), seg.order, s)};
}

Vec2 segment_deriv(const SegmentGeom& seg, double s) {
    return {legendre_eval_deriv(seg.x1.data(), seg.order, s),
            legendre_eval_deriv(seg.x2.data(), seg.order, s)};
}

double segment_length(const SegmentGeom& seg) {
    const QuadRule& q = gauss_legendre(32);
    double len = 0;
    for (size_t i = 0; i < q.nodes.size(); ++i) {
        Vec2 d = segment_deriv(seg, q.nodes[i]);
        len += q.weights[i] * std::sqrt(norm2(d));
    }
    return len;
}

namespace {

struct BdryCtx {
    const SegmentGeom* seg;
    const double* density;
    bool dipole;
    Vec2 x;
    double delta;
};

double bdry_panel(const BdryCtx& c, double a, double b) {
    const QuadRule& q = gauss_legendre(20);
    double sum = 0;
    for (size_t i = 0; i < q.nodes.size(); ++i) {
        double s = a + (b - a) * (q.nodes[i] + 1) / 2;
        double w = q.weights[i] * (b - a) / 2;
        Vec2 y = segment_point(*c.seg, s);
        Vec2 d = segment_deriv(*c.seg, s);
        double rho = legendre_eval(c.density, c.seg->order, s);
        double ker = gauss_kernel(c.x, y, c.delta);
        if (c.dipole) {
            // density * (n . grad_y K) * |G'|; n = (x2', -x1')/|G'| cancels |G'|
            sum += w * rho * (2.0 / c.delta) *
                   ((c.x.x - y.x) * d.y - (c.x.y - y.y) * d.x) * ker;
        } else {
            sum += w * rho * std::sqrt(norm2(d)) * ker;
        }
    }
    return sum;
}

double bdry_adapt(const BdryCtx& c, double a, double b, double whole,
                  double tol, int depth) {
    double m = (a + b) / 2;
    double left = bdry_panel(c, a, m);
    double right = bdry_panel(c, m, b);
    if (std::abs(left + right - whole) <= tol || depth >= 28)
        return left + right;
    return bdry_adapt(c, a, m, left, tol / 2, depth + 1) +
           bdry_adapt(c, m, b, right, tol / 2, depth + 1);
}

}  // namespace

double direct_boundary_one(const SegmentGeom& seg, const double* density,
                           bool dipole, Vec2 x, double delta, double tol) {
    BdryCtx c{&seg, density, dipole, x, delta};
    return bdry_adapt(c, -1, 1, bdry_panel(c, -1, 1), tol, 0);
}

double direct_boundary(const std::vector<SegmentGeom>& segs,
                       const std::vector<std::vector<double>>& density,
                       bool dipole, Vec2 x, double delta, double tol) {
    double acc = 0;
    for (size_t j = 0; j < segs.size(); ++j)
        acc += direct_boundary_one(segs[j], density[j].data(), dipole, x, delta, tol);
    return acc;
}

// ---- analytic fixtures ----

namespace {
constexpr int kNumBumps = 5;
constexpr double kBumpCx[kNumBumps] = {0.20, 0.31, 0.68, 0.41, 0.12};
constexpr double kBumpCy[kNumBumps] = {0.10, 0.50, 0.40, 0.80, 0.45};
constexpr double kBumpVar[kNumBumps] = {0.010, 0.005, 0.003, 0.002, 0.001};
}  // namespace

double bump_value(Vec2 x) {
    double f = 0;
    for (int i = 0; i < kNumBumps; ++i) {
        double dx = x.x - kBumpCx[i], dy = x.y - kBumpCy[i];
        f += std::exp(-(dx * dx + dy * dy) / kBumpVar[i]);
    }
    return f;
}

double bump_transform(Vec2 x, double delta) {
    double u = 0;
    for (int i = 0; i < kNumBumps; ++i) {
        double dx = x.x - kBumpCx[i], dy = x.y - kBumpCy[i];
        double v = kBumpVar[i];
        u += kPi * delta * v / (delta + v) *
             std::exp(-(dx * dx + dy * dy) / (delta + v));
    }
    return u;
}

BoxGeom bump_domain() { return BoxGeom{{0.5, 0.5}, 2.0}; }

double sinprod_value(Vec2 x, int k) {
    return std::sin(2 * kPi * k * x.x) * std::cos(2 * kPi * k * x.y);
}

double sinprod_eigenvalue(int k, double delta) {
    return kPi * delta * std::exp(-2 * kPi * kPi * k * k * delta);
}

}  // namespace fgt
