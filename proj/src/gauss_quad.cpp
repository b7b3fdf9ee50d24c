#include "gauss_quad.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace fgt {

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
void legendre_pair(int n, double x, double* p, double* dp) {
    double p0 = 1.0, p1 = x;
    if (n == 0) {
        *p = p0;
        *dp = 0.0;
        return;
    }
    for (int j = 1; j < n; ++j) {
        double p2 = ((2.0 * j + 1.0) * x * p1 - j * p0) / (j + 1.0);
        p0 = p1;
        p1 = p2;
    }
    *p = p1;
    *dp = n * (x * p1 - p0) / (x * x - 1.0);
}

QuadRule build_rule(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    QuadRule r;
    r.nodes.assign(n, 0.0);
    r.weights.assign(n, 0.0);
    const double pi = 3.14159265358979323846;
    int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Tricomi-style initial guess, then Newton.
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double p = 0, dp = 1;
        for (int it = 0; it < 100; ++it) {
            legendre_pair(n, x, &p, &dp);
            double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        legendre_pair(n, x, &p, &dp);
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // i counts from the right end (x near +1); store ascending.
        r.nodes[n - 1 - i] = x;
        r.weights[n - 1 - i] = w;
        r.nodes[i] = -x;
        r.weights[i] = w;
    }
    if (n % 2 == 1) r.nodes[n / 2] = 0.0;  // exact center for odd rules
    return r;
}

}  // namespace

const QuadRule& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, QuadRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
    return it->second;
}

void legendre_values(int k, double x, double* out) {
    if (k <= 0) return;
    out[0] = 1.0;
    if (k == 1) return;
    out[1] = x;
    for (int j = 1; j + 1 < k; ++j)
        out[j + 1] = ((2.0 * j + 1.0) * x * out[j] - j * out[j - 1]) / (j + 1.0);
}

double legendre_eval(const double* c, int k, double x) {
    double vals[64];
    if (k > 64) throw std::invalid_argument("legendre_eval: order too large");
    legendre_values(k, x, vals);
    double s = 0;
    for (int n = 0; n < k; ++n) s += c[n] * vals[n];
    return s;
}

double legendre_eval_deriv(const double* c, int k, double x) {
    if (k > 64) throw std::invalid_argument("legendre_eval_deriv: order too large");
    // P_n' via recurrence P'_{n+1} = (2n+1) P_n + P'_{n-1}.
    double p[64], dp[64];
    legendre_values(k, x, p);
    dp[0] = 0.0;
    if (k > 1) dp[1] = 1.0;
    for (int n = 1; n + 1 < k; ++n) dp[n + 1] = (2.0 * n + 1.0) * p[n] + dp[n - 1];
    double s = 0;
    for (int n = 0; n < k; ++n) s += c[n] * dp[n];
    return s;
}

}  // namespace fgt
