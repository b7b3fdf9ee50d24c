#include "hermite.hpp"

#include <algorithm>
#include <cmath>

#include "chebyshev.hpp"
#include "gauss_quad.hpp"

namespace fgt {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr int kMaxOrder = 128;
}  // namespace

void hermite_values(int n, double z, double* out) {
    if (n <= 0) return;
    double e = std::exp(-z * z);
    out[0] = e;
    if (n == 1) return;
    out[1] = 2 * z * e;
    for (int j = 1; j + 1 < n; ++j)
        out[j + 1] = 2 * z * out[j] - 2.0 * j * out[j - 1];
}

double inv_factorial(int n) {
    static const std::vector<double> table = [] {
        std::vector<double> t(301);
        t[0] = 1.0;
        for (int i = 1; i <= 300; ++i) t[i] = t[i - 1] / i;
        return t;
    }();
    return table[n];
}

// ---- truncation-order selection ----

double series_s(double r, int p) {
    double term = 1.0, sum = 1.0;
    for (int n = 1; n <= p; ++n) {
        term *= r / std::sqrt((double)n);
        sum += term;
    }
    return sum;
}

double series_t(double r, int p, double eps) {
    double term = 1.0;
    for (int n = 1; n <= p; ++n) term *= r / std::sqrt((double)n);
    double sum = term;
    for (int n = p + 1; n <= p + 500; ++n) {
        term *= r / std::sqrt((double)n);
        sum += term;
        if (term < eps * 1e-3) break;
    }
    return sum;
}

namespace {

constexpr double kCramer = 1.09;

int min_order(double r, double eps, double sep_factor, bool taylor) {
    for (int p = 1; p <= kMaxOrder; ++p) {
        double s = series_s(r, p), t = series_t(r, p, eps);
        double bound = kCramer * kCramer * sep_factor * (2 * s + t) * t;
        if (taylor) bound *= s * s;
        if (bound <= eps) return p;
    }
    return kMaxOrder;
}

}  // namespace

int min_order_hermite(double r, double eps) {
    return min_order(r, eps, std::exp(-9.0 / 8.0 * r * r), false);
}

int min_order_taylor(double r, double eps) {
    return min_order(r, eps, std::exp(-2.0 * r * r), true);
}

int min_order_uniform(double r, double eps) {
    return min_order(r, eps, 1.0, false);
}

Plan make_plan(double domain_side, int max_level,
               const std::vector<int>& boxes_per_level, double delta,
               double eps, bool periodic, ForcePath fp) {
    require(delta > 0, "delta must be positive");
    require(eps > 0 && eps < 1, "eps must be in (0,1)");
    require((int)boxes_per_level.size() >= max_level + 1,
            "boxes_per_level too short");
    Plan pl;
    pl.delta = delta;
    pl.eps = eps;
    pl.periodic = periodic;
    pl.r_c = std::sqrt(std::log(1 / eps));
    double range = pl.r_c * std::sqrt(delta);
    pl.l_cut = max_level + 1;
    for (int l = 0; l <= max_level; ++l) {
        if (std::ldexp(domain_side, -l) <= range) {
            pl.l_cut = l;
            break;
        }
    }
    pl.level.resize(max_level + 1);
    for (int l = pl.l_cut; l <= max_level; ++l) {
        LevelPlan& lp = pl.level[l];
        lp.r = std::ldexp(domain_side, -l) / std::sqrt(delta);
        lp.n_h = min_order_hermite(lp.r, eps);
        lp.n_t = min_order_taylor(lp.r, eps);
        // plane-wave grid covering |k| <= 2 r_c; the period 2*pi/h leaves the
        // nearest aliased kernel image at distance >= 2 r_c past the farthest
        // evaluation point
        double span = 4.25 * lp.r + 2 * pl.r_c;
        lp.pw_h = 2 * kPi / span;
        lp.p_t = 2 * (int)std::floor(2 * pl.r_c / lp.pw_h) + 1;
        double p = lp.n_h, q = lp.n_t, pt = lp.p_t;
        double hermite_cost = 27.0 * q * p * (p + q);
        double pw_cost = 2.0 * pt * p * (pt + p) + 27.0 * 6.0 * pt * pt +
                         4.0 * q * pt * (pt + q);
        bool mem_ok = (double)boxes_per_level[l] * pt * pt * 16.0 < 2e8;
        switch (fp) {
            case ForcePath::kAuto:
                lp.use_pw = mem_ok && pw_cost < hermite_cost;
                break;
            case ForcePath::kHermite:
                lp.use_pw = false;
                break;
            case ForcePath::kPlaneWave:
                lp.use_pw = true;
                break;
        }
    }
    return pl;
}

// ---- expansion formation and evaluation ----

void form_outgoing_from_point(Vec2 s, double sqrt_delta, Vec2 y, double q,
                              Expansion* out) {
    const int p = out->order;
    double w1 = (y.x - s.x) / sqrt_delta, w2 = (y.y - s.y) / sqrt_delta;
    double b1[kMaxOrder], b2[kMaxOrder];
    b1[0] = q;
    b2[0] = 1;
    for (int a = 1; a < p; ++a) b1[a] = b1[a - 1] * w1 / a;
    for (int a = 1; a < p; ++a) b2[a] = b2[a - 1] * w2 / a;
    for (int a2 = 0; a2 < p; ++a2)
        for (int a1 = 0; a1 < p; ++a1) out->a[(size_t)a2 * p + a1] += b1[a1] * b2[a2];
}

void form_outgoing_from_dipole(Vec2 s, double sqrt_delta, Vec2 y, double q,
                               Vec2 n, Expansion* out) {
    const int p = out->order;
    double w1 = (y.x - s.x) / sqrt_delta, w2 = (y.y - s.y) / sqrt_delta;
    double b1[kMaxOrder], b2[kMaxOrder];
    b1[0] = 1;
    b2[0] = 1;
    for (int a = 1; a < p; ++a) b1[a] = b1[a - 1] * w1 / a;
    for (int a = 1; a < p; ++a) b2[a] = b2[a - 1] * w2 / a;
    double scale = q / sqrt_delta;
    for (int a2 = 0; a2 < p; ++a2) {
        for (int a1 = 0; a1 < p; ++a1) {
            double val = 0;
            if (a1 > 0) val += n.x * b1[a1 - 1] * b2[a2];
            if (a2 > 0) val += n.y * b1[a1] * b2[a2 - 1];
            if (val != 0) out->a[(size_t)a2 * p + a1] += scale * val;
        }
    }
}

void form_local_from_point(Vec2 t, double sqrt_delta, Vec2 y, double q,
                           Expansion* out) {
    const int p = out->order;
    double v1 = (y.x - t.x) / sqrt_delta, v2 = (y.y - t.y) / sqrt_delta;
    double h1[kMaxOrder], h2[kMaxOrder];
    hermite_values(p, v1, h1);
    hermite_values(p, v2, h2);
    for (int b = 0; b < p; ++b) h1[b] *= q * inv_factorial(b);
    for (int b = 0; b < p; ++b) h2[b] *= inv_factorial(b);
    for (int b2 = 0; b2 < p; ++b2)
        for (int b1 = 0; b1 < p; ++b1) out->a[(size_t)b2 * p + b1] += h1[b1] * h2[b2];
}

void form_local_from_dipole(Vec2 t, double sqrt_delta, Vec2 y, double q,
                            Vec2 n, Expansion* out) {
    const int p = out->order;
    double v1 = (y.x - t.x) / sqrt_delta, v2 = (y.y - t.y) / sqrt_delta;
    double h1[kMaxOrder + 1], h2[kMaxOrder + 1];
    hermite_values(p + 1, v1, h1);
    hermite_values(p + 1, v2, h2);
    double scale = -q / sqrt_delta;
    for (int b2 = 0; b2 < p; ++b2) {
        for (int b1 = 0; b1 < p; ++b1) {
            double val = n.x * h1[b1 + 1] * h2[b2] + n.y * h1[b1] * h2[b2 + 1];
            out->a[(size_t)b2 * p + b1] +=
                scale * val * inv_factorial(b1) * inv_factorial(b2);
        }
    }
}

double eval_outgoing(const Expansion& e, Vec2 s, double sqrt_delta, Vec2 x) {
    const int p = e.order;
    double h1[kMaxOrder], h2[kMaxOrder];
    hermite_values(p, (x.x - s.x) / sqrt_delta, h1);
    hermite_values(p, (x.y - s.y) / sqrt_delta, h2);
    double sum = 0;
    for (int a2 = 0; a2 < p; ++a2) {
        double row = 0;
        const double* arow = &e.a[(size_t)a2 * p];
        for (int a1 = 0; a1 < p; ++a1) row += arow[a1] * h1[a1];
        sum += row * h2[a2];
    }
    return sum;
}

double eval_local(const Expansion& e, Vec2 t, double sqrt_delta, Vec2 x) {
    const int p = e.order;
    double v1 = (x.x - t.x) / sqrt_delta, v2 = (x.y - t.y) / sqrt_delta;
    // Horner in v2 over rows, Horner in v1 inside each row
    double sum = 0;
    for (int b2 = p - 1; b2 >= 0; --b2) {
        const double* arow = &e.a[(size_t)b2 * p];
        double row = 0;
        for (int b1 = p - 1; b1 >= 0; --b1) row = row * v1 + arow[b1];
        sum = sum * v2 + row;
    }
    return sum;
}

// ---- moment table ----

MomentTable::MomentTable(int k, int p, double rho, double half_side)
    : k_(k), p_(p) {
    m_.assign((size_t)p * k, 0.0);
    const QuadRule& g = gauss_legendre(96);
    const int ng = (int)g.nodes.size();
    std::vector<double> bv((size_t)ng * k);
    for (int i = 0; i < ng; ++i) basis_values(k, g.nodes[i], &bv[(size_t)i * k]);
    std::vector<double> ua(ng, 1.0);
    double rho_a = 1.0;
    for (int a = 0; a < p; ++a) {
        if (a > 0) {
            for (int i = 0; i < ng; ++i) ua[i] *= g.nodes[i];
            rho_a *= rho;
        }
        double scale = half_side * rho_a * inv_factorial(a);
        for (int n = 0; n < k; ++n) {
            if ((a + n) % 2) continue;  // odd-parity integrals vanish
            double s = 0;
            for (int i = 0; i < ng; ++i) s += g.weights[i] * ua[i] * bv[(size_t)i * k + n];
            m_[(size_t)a * k + n] = scale * s;
        }
    }
}

void MomentTable::add_outgoing(const double* coef, Expansion* out) const {
    require(out->order == p_, "moment table order mismatch");
    const int p = p_, k = k_;
    std::vector<double> g((size_t)p * k, 0.0);
    int idx = 0;
    for (int n2 = 0; n2 < k; ++n2) {
        for (int n1 = 0; n1 + n2 < k; ++n1, ++idx) {
            double c = coef[idx];
            if (c == 0) continue;
            const double* mcol = &m_[0];
            for (int a1 = 0; a1 < p; ++a1) g[(size_t)a1 * k + n2] += c * mcol[(size_t)a1 * k + n1];
        }
    }
    for (int a2 = 0; a2 < p; ++a2) {
        for (int a1 = 0; a1 < p; ++a1) {
            double s = 0;
            const double* grow = &g[(size_t)a1 * k];
            const double* mrow = &m_[(size_t)a2 * k];
            for (int n2 = 0; n2 < k; ++n2) s += grow[n2] * mrow[n2];
            out->a[(size_t)a2 * p + a1] += s;
        }
    }
}

// ---- translations ----

Translators::Translators(const Plan& plan) {
    const int nlev = (int)plan.level.size();
    ops_.resize(nlev);
    for (int l = plan.l_cut; l < nlev; ++l) {
        LevelOps& op = ops_[l];
        const LevelPlan& lp = plan.level[l];
        op.p = lp.n_h;
        op.q = lp.n_t;
        double r = lp.r;

        // outgoing->local for box displacements -3..3 at this level
        for (int d = -3; d <= 3; ++d) {
            double z = d * r;
            std::vector<double> h(op.p + op.q);
            hermite_values(op.p + op.q, z, h.data());
            std::vector<double>& w = op.w[d + 3];
            w.assign((size_t)op.q * op.p, 0.0);
            for (int b = 0; b < op.q; ++b) {
                double sign = (b % 2) ? -1.0 : 1.0;
                double f = sign * inv_factorial(b);
                for (int a = 0; a < op.p; ++a) w[(size_t)b * op.p + a] = f * h[a + b];
            }
        }

        // child->parent shifts need the parent level active too
        if (l > plan.l_cut) {
            op.p_child = lp.n_h;
            op.p_par = plan.level[l - 1].n_h;
            op.q_child = lp.n_t;
            op.q_par = plan.level[l - 1].n_t;
            for (int sgn = 0; sgn < 2; ++sgn) {
                double z = (sgn ? 1.0 : -1.0) * r / 2;
                std::vector<double>& u = op.u[sgn];
                u.assign((size_t)op.p_par * op.p_child, 0.0);
                std::vector<double> zp(op.p_par);
                zp[0] = 1.0;
                for (int m = 1; m < op.p_par; ++m) zp[m] = zp[m - 1] * z / m;
                for (int b = 0; b < op.p_par; ++b)
                    for (int a = 0; a <= b && a < op.p_child; ++a)
                        u[(size_t)b * op.p_child + a] = zp[b - a];

                std::vector<double>& v = op.v[sgn];
                v.assign((size_t)op.q_child * op.q_par, 0.0);
                for (int b = 0; b < op.q_child; ++b) {
                    double t = 1.0;  // binom(a,b) z^{a-b} built up from a=b
                    for (int a = b; a < op.q_par; ++a) {
                        v[(size_t)b * op.q_par + a] = t;
                        t *= z * (a + 1) / (double)(a + 1 - b);
                    }
                }
            }
        }
    }
}

void Translators::shift_outgoing(int child_level, int cx, int cy,
                                 const Expansion& src, Expansion* dst) const {
    const LevelOps& op = ops_[child_level];
    const int pc = op.p_child, pp = op.p_par;
    // child center minus parent center is +/- side/2 per dim
    const std::vector<double>& u1 = op.u[cx];
    const std::vector<double>& u2 = op.u[cy];
    std::vector<double> g((size_t)pc * pp, 0.0);  // g[a1*pp + b2]
    for (int a1 = 0; a1 < pc; ++a1) {
        for (int b2 = 0; b2 < pp; ++b2) {
            double s = 0;
            int amax = std::min(b2, pc - 1);
            for (int a2 = 0; a2 <= amax; ++a2)
                s += src.a[(size_t)a2 * pc + a1] * u2[(size_t)b2 * pc + a2];
            g[(size_t)a1 * pp + b2] = s;
        }
    }
    for (int b2 = 0; b2 < pp; ++b2) {
        for (int b1 = 0; b1 < pp; ++b1) {
            double s = 0;
            int amax = std::min(b1, pc - 1);
            for (int a1 = 0; a1 <= amax; ++a1)
                s += g[(size_t)a1 * pp + b2] * u1[(size_t)b1 * pc + a1];
            dst->a[(size_t)b2 * pp + b1] += s;
        }
    }
}

void Translators::shift_local(int child_level, int cx, int cy,
                              const Expansion& src, Expansion* dst) const {
    const LevelOps& op = ops_[child_level];
    const int qc = op.q_child, qp = op.q_par;
    const std::vector<double>& v1 = op.v[cx];
    const std::vector<double>& v2 = op.v[cy];
    std::vector<double> g((size_t)qp * qc, 0.0);  // g[a1*qc + b2]
    for (int a1 = 0; a1 < qp; ++a1) {
        for (int b2 = 0; b2 < qc; ++b2) {
            double s = 0;
            for (int a2 = b2; a2 < qp; ++a2)
                s += src.a[(size_t)a2 * qp + a1] * v2[(size_t)b2 * qp + a2];
            g[(size_t)a1 * qc + b2] = s;
        }
    }
    for (int b2 = 0; b2 < qc; ++b2) {
        for (int b1 = 0; b1 < qc; ++b1) {
            double s = 0;
            for (int a1 = b1; a1 < qp; ++a1)
                s += g[(size_t)a1 * qc + b2] * v1[(size_t)b1 * qp + a1];
            dst->a[(size_t)b2 * qc + b1] += s;
        }
    }
}

void Translators::outgoing_to_local(int level, int dx, int dy,
                                    const Expansion& src,
                                    Expansion* dst) const {
    const LevelOps& op = ops_[level];
    const int p = op.p, q = op.q;
    const std::vector<double>& w1 = op.w[dx + 3];
    const std::vector<double>& w2 = op.w[dy + 3];
    std::vector<double> g((size_t)p * q, 0.0);  // g[a1*q + b2]
    for (int a1 = 0; a1 < p; ++a1) {
        for (int b2 = 0; b2 < q; ++b2) {
            double s = 0;
            const double* wrow = &w2[(size_t)b2 * p];
            for (int a2 = 0; a2 < p; ++a2) s += src.a[(size_t)a2 * p + a1] * wrow[a2];
            g[(size_t)a1 * q + b2] = s;
        }
    }
    for (int b2 = 0; b2 < q; ++b2) {
        for (int b1 = 0; b1 < q; ++b1) {
            double s = 0;
            const double* wrow = &w1[(size_t)b1 * p];
            for (int a1 = 0; a1 < p; ++a1) s += g[(size_t)a1 * q + b2] * wrow[a1];
            dst->a[(size_t)b2 * q + b1] += s;
        }
    }
}

// ---- plane waves ----

void outgoing_to_pw(const Expansion& src, const LevelPlan& lp, PlaneWave* out) {
    const int p = src.order, pt = lp.p_t, m = (pt - 1) / 2;
    out->reset(pt, lp.pw_h);
    // powers (-i k_j)^a per dimension
    std::vector<std::complex<double>> pw((size_t)pt * p);
    for (int j = 0; j < pt; ++j) {
        std::complex<double> base(0.0, -(j - m) * lp.pw_h);
        std::complex<double> cur(1.0, 0.0);
        for (int a = 0; a < p; ++a) {
            pw[(size_t)j * p + a] = cur;
            cur *= base;
        }
    }
    std::vector<std::complex<double>> g((size_t)pt * p);  // g[j1*p + a2]
    for (int j1 = 0; j1 < pt; ++j1) {
        for (int a2 = 0; a2 < p; ++a2) {
            std::complex<double> s(0, 0);
            for (int a1 = 0; a1 < p; ++a1)
                s += src.a[(size_t)a2 * p + a1] * pw[(size_t)j1 * p + a1];
            g[(size_t)j1 * p + a2] = s;
        }
    }
    double pref = lp.pw_h * lp.pw_h / (4 * kPi);
    for (int j2 = 0; j2 < pt; ++j2) {
        double k2 = (j2 - m) * lp.pw_h;
        for (int j1 = 0; j1 < pt; ++j1) {
            double k1 = (j1 - m) * lp.pw_h;
            std::complex<double> s(0, 0);
            for (int a2 = 0; a2 < p; ++a2)
                s += g[(size_t)j1 * p + a2] * pw[(size_t)j2 * p + a2];
            out->w[(size_t)j2 * pt + j1] =
                pref * std::exp(-(k1 * k1 + k2 * k2) / 4) * s;
        }
    }
}

void pw_accumulate(const PlaneWave& src, double r, int dx, int dy,
                   PlaneWave* dst) {
    const int pt = src.p_t, m = (pt - 1) / 2;
    std::vector<std::complex<double>> ph1(pt), ph2(pt);
    for (int j = 0; j < pt; ++j) {
        double k = (j - m) * src.h;
        ph1[j] = std::polar(1.0, k * dx * r);
        ph2[j] = std::polar(1.0, k * dy * r);
    }
    for (int j2 = 0; j2 < pt; ++j2) {
        for (int j1 = 0; j1 < pt; ++j1) {
            dst->w[(size_t)j2 * pt + j1] +=
                src.w[(size_t)j2 * pt + j1] * ph1[j1] * ph2[j2];
        }
    }
}

void pw_to_local(const PlaneWave& src, int q, Expansion* out) {
    const int pt = src.p_t, m = (pt - 1) / 2;
    std::vector<std::complex<double>> pw((size_t)pt * q);  // (i k_j)^b
    for (int j = 0; j < pt; ++j) {
        std::complex<double> base(0.0, (j - m) * src.h);
        std::complex<double> cur(1.0, 0.0);
        for (int b = 0; b < q; ++b) {
            pw[(size_t)j * q + b] = cur;
            cur *= base;
        }
    }
    std::vector<std::complex<double>> g((size_t)q * pt);  // g[b1*pt + j2]
    for (int b1 = 0; b1 < q; ++b1) {
        for (int j2 = 0; j2 < pt; ++j2) {
            std::complex<double> s(0, 0);
            for (int j1 = 0; j1 < pt; ++j1)
                s += src.w[(size_t)j2 * pt + j1] * pw[(size_t)j1 * q + b1];
            g[(size_t)b1 * pt + j2] = s;
        }
    }
    for (int b2 = 0; b2 < q; ++b2) {
        for (int b1 = 0; b1 < q; ++b1) {
            std::complex<double> s(0, 0);
            for (int j2 = 0; j2 < pt; ++j2)
                s += g[(size_t)b1 * pt + j2] * pw[(size_t)j2 * q + b2];
            out->a[(size_t)b2 * q + b1] +=
                s.real() * inv_factorial(b1) * inv_factorial(b2);
        }
    }
}

}  // namespace fgt
