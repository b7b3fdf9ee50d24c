#include "tables.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "chebyshev.hpp"
#include "gauss_quad.hpp"
#include "hermite.hpp"

namespace fgt {

namespace {

constexpr int kPanelNodes = 16;
constexpr double kKernelRadii = 6.25;  // kernel below 1e-17 outside this

}  // namespace

void near_integrals(int k, double side, double delta, double t, double* out) {
    std::fill(out, out + k, 0.0);
    const double sd = std::sqrt(delta);
    const double lo = std::max(-side / 2, t - kKernelRadii * sd);
    const double hi = std::min(side / 2, t + kKernelRadii * sd);
    if (lo >= hi) return;
    const double w0 = std::min(sd, side) / 2;
    const int panels = std::max(1, (int)std::ceil((hi - lo) / w0));
    const double pw = (hi - lo) / panels;
    const QuadRule& gl = gauss_legendre(kPanelNodes);
    double b[32];
    for (int p = 0; p < panels; ++p) {
        const double c = lo + (p + 0.5) * pw;
        for (int i = 0; i < kPanelNodes; ++i) {
            const double y = c + 0.5 * pw * gl.nodes[i];
            const double d = (t - y) / sd;
            const double ker = std::exp(-d * d);
            if (ker < 1e-19) continue;
            const double wq = 0.5 * pw * gl.weights[i] * ker;
            basis_values(k, 2 * y / side, b);
            for (int n = 0; n < k; ++n) out[n] += wq * b[n];
        }
    }
}

NearTable build_near_table(int k, double side, double delta, int cls) {
    require(k >= 2 && k <= 32, "basis order out of range");
    require(cls >= 0 && cls <= 2, "bad near table class");
    NearTable t;
    t.k = k;
    t.cls = cls;
    t.n_off = (cls == 0) ? 3 : 4;
    t.side = side;
    t.delta = delta;
    t.vals.assign((size_t)t.n_off * k * k, 0.0);
    const std::vector<double>& xi = leaf_basis(k).nodes();  // ascending in (-1,1)
    for (int o = 0; o < t.n_off; ++o) {
        double base, scale;
        if (cls == 0) {
            base = (o - 1.0) * side;
            scale = side / 2;
        } else if (cls == 1) {
            base = (o - 1.5) * side / 2;
            scale = side / 4;
        } else {
            base = (o - 1.5) * side;
            scale = side;
        }
        for (int m = 0; m < k; ++m) {
            const double tc = base + scale * xi[m];
            near_integrals(k, side, delta, tc,
                           &t.vals[((size_t)o * k + m) * k]);
        }
    }
    return t;
}

void apply_near(const NearTable& t, int o1, int o2, const double* coef,
                double* out) {
    const int k = t.k;
    require(o1 >= 0 && o1 < t.n_off && o2 >= 0 && o2 < t.n_off,
            "near table offset out of range");
    double g[32 * 32];
    std::fill(g, g + (size_t)k * k, 0.0);
    const double* t1 = &t.vals[(size_t)o1 * k * k];
    const double* t2 = &t.vals[(size_t)o2 * k * k];
    // first pass: contract n1 -> m1 for each n2
    for (int n2 = 0; n2 < k; ++n2) {
        for (int n1 = 0; n1 + n2 < k; ++n1) {
            const double c = coef[coeff_index(k, n1, n2)];
            if (c == 0) continue;
            for (int m1 = 0; m1 < k; ++m1)
                g[n2 * k + m1] += c * t1[m1 * k + n1];
        }
    }
    // second pass: contract n2 -> m2
    for (int m2 = 0; m2 < k; ++m2)
        for (int n2 = 0; n2 < k; ++n2) {
            const double w = t2[m2 * k + n2];
            if (w == 0) continue;
            for (int m1 = 0; m1 < k; ++m1) out[m2 * k + m1] += w * g[n2 * k + m1];
        }
}

CoarseTable build_coarse_table(int k, int q, double side, double delta) {
    require(k >= 2 && k <= 32, "basis order out of range");
    require(q >= 1 && q <= 128, "expansion order out of range");
    CoarseTable t;
    t.k = k;
    t.q = q;
    t.side = side;
    t.delta = delta;
    const double sd = std::sqrt(delta);
    const double amax = q - 1.0;
    // clip where every retained hermite function is negligible
    const double zclip = std::sqrt(2 * amax) + 9.0;
    // panel width resolving the fastest oscillation of h_{q-1}
    const double w0 =
        std::min(side, sd * std::min(1.0, 4.4 / std::sqrt(std::max(1.0, amax))));
    const QuadRule& gl = gauss_legendre(kPanelNodes);
    std::vector<double> h(q + 1), b(k);
    for (int o = 0; o < 6; ++o) {
        t.vals[o].assign((size_t)q * k, 0.0);
        const double off = (o - 2.5) * side / 2;
        const double lo = std::max(-side / 2, off - zclip * sd);
        const double hi = std::min(side / 2, off + zclip * sd);
        if (lo >= hi) continue;
        const int panels = std::max(1, (int)std::ceil((hi - lo) / w0));
        const double pw = (hi - lo) / panels;
        for (int p = 0; p < panels; ++p) {
            const double c = lo + (p + 0.5) * pw;
            for (int i = 0; i < kPanelNodes; ++i) {
                const double y = c + 0.5 * pw * gl.nodes[i];
                const double wq = 0.5 * pw * gl.weights[i];
                hermite_values(q, (y - off) / sd, h.data());
                basis_values(k, 2 * y / side, b.data());
                for (int a = 0; a < q; ++a) {
                    const double ha = wq * h[a];
                    if (ha == 0) continue;
                    double* row = &t.vals[o][(size_t)a * k];
                    for (int n = 0; n < k; ++n) row[n] += ha * b[n];
                }
            }
        }
        for (int a = 0; a < q; ++a) {
            const double s = inv_factorial(a);
            double* row = &t.vals[o][(size_t)a * k];
            for (int n = 0; n < k; ++n) row[n] *= s;
        }
    }
    return t;
}

void apply_coarse(const CoarseTable& t, int o1, int o2, const double* coef,
                  double* local) {
    const int k = t.k, q = t.q;
    require(o1 >= 0 && o1 < 6 && o2 >= 0 && o2 < 6,
            "coarse table offset out of range");
    std::vector<double> g((size_t)k * q, 0.0);
    const double* t1 = t.vals[o1].data();
    const double* t2 = t.vals[o2].data();
    for (int n2 = 0; n2 < k; ++n2) {
        for (int n1 = 0; n1 + n2 < k; ++n1) {
            const double c = coef[coeff_index(k, n1, n2)];
            if (c == 0) continue;
            for (int b1 = 0; b1 < q; ++b1)
                g[(size_t)n2 * q + b1] += c * t1[(size_t)b1 * k + n1];
        }
    }
    for (int b2 = 0; b2 < q; ++b2)
        for (int n2 = 0; n2 < k; ++n2) {
            const double w = t2[(size_t)b2 * k + n2];
            if (w == 0) continue;
            const double* gr = &g[(size_t)n2 * q];
            double* lr = &local[(size_t)b2 * q];
            for (int b1 = 0; b1 < q; ++b1) lr[b1] += w * gr[b1];
        }
}

void dump_near_table(const std::string& path, const NearTable& t, int level) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    require(f != nullptr, "cannot open table file for writing");
    const char magic[4] = {'F', 'G', 'T', 'T'};
    const uint32_t version = 1;
    const int32_t hdr[4] = {(int32_t)level, (int32_t)t.k, (int32_t)t.cls,
                            (int32_t)t.n_off};
    bool ok = std::fwrite(magic, 1, 4, f) == 4 &&
              std::fwrite(&version, 4, 1, f) == 1 &&
              std::fwrite(hdr, 4, 4, f) == 4 &&
              std::fwrite(&t.side, 8, 1, f) == 1 &&
              std::fwrite(&t.delta, 8, 1, f) == 1 &&
              std::fwrite(t.vals.data(), 8, t.vals.size(), f) == t.vals.size();
    ok = (std::fclose(f) == 0) && ok;
    require(ok, "short write on table file");
}

NearTable load_near_table(const std::string& path, int* level) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    require(f != nullptr, "cannot open table file");
    char magic[4];
    uint32_t version = 0;
    int32_t hdr[4];
    NearTable t;
    bool ok = std::fread(magic, 1, 4, f) == 4 &&
              std::memcmp(magic, "FGTT", 4) == 0 &&
              std::fread(&version, 4, 1, f) == 1 && version == 1 &&
              std::fread(hdr, 4, 4, f) == 4 &&
              std::fread(&t.side, 8, 1, f) == 1 &&
              std::fread(&t.delta, 8, 1, f) == 1;
    if (ok) {
        if (level) *level = hdr[0];
        t.k = hdr[1];
        t.cls = hdr[2];
        t.n_off = hdr[3];
        ok = t.k >= 2 && t.k <= 32 && t.cls >= 0 && t.cls <= 2 &&
             (t.n_off == 3 || t.n_off == 4);
        if (ok) {
            t.vals.resize((size_t)t.n_off * t.k * t.k);
            ok = std::fread(t.vals.data(), 8, t.vals.size(), f) == t.vals.size();
        }
    }
    std::fclose(f);
    require(ok, "malformed table file");
    return t;
}

}  // namespace fgt
