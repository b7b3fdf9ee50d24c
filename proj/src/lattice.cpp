#include "lattice.hpp"

#include <cmath>
#include <vector>

namespace fgt {

namespace {

// ln(n!) built by summation so all scale factors share one table
double lfact(int n) {
    static const std::vector<double> table = [] {
        std::vector<double> t(601);
        t[0] = 0.0;
        for (int i = 1; i <= 600; ++i) t[i] = t[i - 1] + std::log((double)i);
        return t;
    }();
    return table[n];
}

// Scaled Hermite functions hs_g = h_g * 2^{-g/2} / sqrt(g!). These stay O(1)
// for all g (|hs_g(z)| <= 1.09 exp(-z^2/2)), so image sums of any order can
// be accumulated without overflow; the inverse scale is folded back into the
// coefficient contractions where factorials keep it finite.
void scaled_hermite(int n, double z, double* out) {
    if (n <= 0) return;
    const double e = std::exp(-z * z);
    out[0] = e;
    if (n == 1) return;
    out[1] = std::sqrt(2.0) * z * e;
    for (int g = 1; g + 1 < n; ++g)
        out[g + 1] = z * std::sqrt(2.0 / (g + 1)) * out[g] -
                     std::sqrt(g / (double)(g + 1)) * out[g - 1];
}

// Per-dimension image sums of the scaled functions up to order gmax:
//   in_[g]  = hs_g(0) + 2 hs_g(tau)      (offsets -1, 0, 1)
//   out_[g] = 2 * sum_{j >= 2} hs_g(j tau)
// Odd orders vanish because the +/-j images cancel.
struct ImageSums {
    std::vector<double> in_, out_;

    ImageSums(int gmax, double tau) {
        const int n = gmax + 1;
        in_.assign(n, 0.0);
        out_.assign(n, 0.0);
        std::vector<double> h(n);
        scaled_hermite(n, 0.0, h.data());
        for (int g = 0; g <= gmax; g += 2) in_[g] = h[g];
        scaled_hermite(n, tau, h.data());
        for (int g = 0; g <= gmax; g += 2) in_[g] += 2 * h[g];
        // |hs_g(z)| <= 1.09 exp(-z^2/2) uniformly: stop once the envelope is
        // negligible for every order
        for (int j = 2; j * j * tau * tau <= 102.0; ++j) {
            scaled_hermite(n, j * tau, h.data());
            for (int g = 0; g <= gmax; g += 2) out_[g] += 2 * h[g];
        }
    }
};

}  // namespace

double lattice_sum(int g1, int g2, double delta, double domain_side) {
    if (g1 % 2 || g2 % 2) return 0.0;
    const double tau = domain_side / std::sqrt(delta);
    ImageSums s(std::max(g1, g2), tau);
    // Z^2 minus tile = {|j1|>=2} x Z  union  {|j1|<=1} x {|j2|>=2}
    const double scaled = s.out_[g1] * (s.in_[g2] + s.out_[g2]) +
                          s.in_[g1] * s.out_[g2];
    const double inv_c = std::exp(0.5 * (g1 * M_LN2 + lfact(g1)) +
                                  0.5 * (g2 * M_LN2 + lfact(g2)));
    return scaled * inv_c;
}

void lattice_root_local(const Expansion& phi, double delta, double domain_side,
                        Expansion* psi) {
    const int p = phi.order, q = psi->order;
    const int gmax = p + q - 2;
    const double tau = domain_side / std::sqrt(delta);
    ImageSums s(gmax, tau);
    std::vector<double> all(gmax + 1);
    for (int g = 0; g <= gmax; ++g) all[g] = s.in_[g] + s.out_[g];

    // per-index folds: source a picks up 2^{a/2} sqrt(a!), output b picks up
    // 2^{b/2}/sqrt(b!) (the 1/b! of the translation included), and each
    // (a,b) pair the mixing factor sqrt(binom(a+b,a)); together these undo
    // the hs_g scaling exactly
    std::vector<double> sa(p), sb(q), mix((size_t)p * q);
    for (int a = 0; a < p; ++a) sa[a] = std::exp(0.5 * (a * M_LN2 + lfact(a)));
    for (int b = 0; b < q; ++b) sb[b] = std::exp(0.5 * (b * M_LN2 - lfact(b)));
    for (int a = 0; a < p; ++a)
        for (int b = 0; b < q; ++b)
            mix[(size_t)a * q + b] =
                std::exp(0.5 * (lfact(a + b) - lfact(a) - lfact(b)));

    std::vector<double> at((size_t)p * p);
    for (int a2 = 0; a2 < p; ++a2)
        for (int a1 = 0; a1 < p; ++a1)
            at[(size_t)a2 * p + a1] = phi.a[(size_t)a2 * p + a1] * sa[a1] * sa[a2];

    // two separable product terms: out (x) all, then in (x) out
    std::vector<double> g((size_t)p * q);
    for (int term = 0; term < 2; ++term) {
        const double* f1 = term == 0 ? s.out_.data() : s.in_.data();
        const double* f2 = term == 0 ? all.data() : s.out_.data();
        std::fill(g.begin(), g.end(), 0.0);
        for (int a1 = 0; a1 < p; ++a1)
            for (int b2 = 0; b2 < q; ++b2) {
                double acc = 0;
                for (int a2 = 0; a2 < p; ++a2)
                    acc += at[(size_t)a2 * p + a1] * f2[a2 + b2] *
                           mix[(size_t)a2 * q + b2];
                g[(size_t)a1 * q + b2] = acc;
            }
        for (int b2 = 0; b2 < q; ++b2)
            for (int b1 = 0; b1 < q; ++b1) {
                double acc = 0;
                for (int a1 = 0; a1 < p; ++a1)
                    acc += g[(size_t)a1 * q + b2] * f1[a1 + b1] *
                           mix[(size_t)a1 * q + b1];
                double sign = ((b1 + b2) % 2) ? -1.0 : 1.0;
                psi->a[(size_t)b2 * q + b1] += sign * sb[b1] * sb[b2] * acc;
            }
    }
}

}  // namespace fgt
