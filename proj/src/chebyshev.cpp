#include "chebyshev.hpp"

#include <Eigen/Dense>

#include <map>
#include <mutex>

namespace fgt {

std::vector<double> cheb_nodes(int k) {
    std::vector<double> x(k);
    for (int m = 0; m < k; ++m) x[m] = -std::cos(M_PI * (2 * m + 1) / (2.0 * k));
    return x;
}

bool basis_is_monomial(int k) { return k < 8; }

void basis_values(int k, double u, double* out) {
    if (basis_is_monomial(k)) {
        out[0] = 1.0;
        for (int n = 1; n < k; ++n) out[n] = out[n - 1] * u;
    } else {
        out[0] = 1.0;
        if (k > 1) out[1] = u;
        for (int n = 2; n < k; ++n) out[n] = 2.0 * u * out[n - 1] - out[n - 2];
    }
}

LeafBasis::LeafBasis(int k) : k_(k), nc_(coeff_count(k)), nodes_(cheb_nodes(k)) {
    require(k == 4 || k == 6 || (k >= 8 && k % 2 == 0 && k <= 32),
            "unsupported leaf order (use 4, 6, or an even order in [8, 32])");
    basis_at_nodes_.resize(static_cast<size_t>(k) * k);
    for (int m = 0; m < k; ++m) basis_values(k, nodes_[m], &basis_at_nodes_[m * k]);

    if (basis_is_monomial(k)) {
        // Least squares fit of a total-degree basis on the k x k grid.
        Eigen::MatrixXd v(k * k, nc_);
        for (int m2 = 0; m2 < k; ++m2)
            for (int m1 = 0; m1 < k; ++m1)
                for (int n2 = 0; n2 < k; ++n2)
                    for (int n1 = 0; n1 + n2 < k; ++n1)
                        v(m2 * k + m1, coeff_index(k, n1, n2)) =
                            basis_at_nodes_[m1 * k + n1] * basis_at_nodes_[m2 * k + n2];
        Eigen::MatrixXd p =
            v.colPivHouseholderQr().solve(Eigen::MatrixXd::Identity(k * k, k * k));
        lsq_.resize(static_cast<size_t>(nc_) * k * k);
        for (int i = 0; i < nc_; ++i)
            for (int j = 0; j < k * k; ++j) lsq_[i * k * k + j] = p(i, j);
    }
}

void LeafBasis::project(const double* samples, double* coef) const {
    const int k = k_;
    if (basis_is_monomial(k)) {
        for (int i = 0; i < nc_; ++i) {
            double acc = 0.0;
            const double* row = &lsq_[static_cast<size_t>(i) * k * k];
            for (int j = 0; j < k * k; ++j) acc += row[j] * samples[j];
            coef[i] = acc;
        }
        return;
    }
    // Two-pass discrete cosine projection, then truncation to total degree < k.
    // c(n1,n2) = w(n1) w(n2) / k^2 * sum_m f(m1,m2) T_{n1}(x_{m1}) T_{n2}(x_{m2}),
    // with w(0) = 1 and w(n) = 2 otherwise.
    std::vector<double> half(static_cast<size_t>(k) * k);  // half[n1*k + m2]
    for (int n1 = 0; n1 < k; ++n1)
        for (int m2 = 0; m2 < k; ++m2) {
            double acc = 0.0;
            for (int m1 = 0; m1 < k; ++m1)
                acc += samples[m2 * k + m1] * basis_at_nodes_[m1 * k + n1];
            half[n1 * k + m2] = acc;
        }
    for (int n2 = 0; n2 < k; ++n2)
        for (int n1 = 0; n1 + n2 < k; ++n1) {
            double acc = 0.0;
            for (int m2 = 0; m2 < k; ++m2)
                acc += half[n1 * k + m2] * basis_at_nodes_[m2 * k + n2];
            double w = (n1 == 0 ? 1.0 : 2.0) * (n2 == 0 ? 1.0 : 2.0);
            coef[coeff_index(k, n1, n2)] = w / (k * k) * acc;
        }
}

double LeafBasis::eval(const double* coef, double u1, double u2) const {
    const int k = k_;
    double b1[32], b2[32];
    basis_values(k, u1, b1);
    basis_values(k, u2, b2);
    double acc = 0.0;
    int idx = 0;
    for (int n2 = 0; n2 < k; ++n2) {
        double inner = 0.0;
        for (int n1 = 0; n1 + n2 < k; ++n1) inner += coef[idx++] * b1[n1];
        acc += inner * b2[n2];
    }
    return acc;
}

const LeafBasis& leaf_basis(int k) {
    static std::mutex mu;
    static std::map<int, LeafBasis> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(k);
    if (it == cache.end()) it = cache.emplace(k, LeafBasis(k)).first;
    return it->second;
}

double grid_interpolate(int k, const double* values, double u1, double u2) {
    // Barycentric weights for Chebyshev root nodes: w_m ~ (-1)^m sin(theta_m).
    auto nodes = cheb_nodes(k);
    double w[32];
    for (int m = 0; m < k; ++m) {
        double theta = M_PI * (2 * m + 1) / (2.0 * k);
        w[m] = (m % 2 == 0 ? 1.0 : -1.0) * std::sin(theta);
    }
    auto interp1 = [&](const double* v, int stride, double u) {
        double num = 0.0, den = 0.0;
        for (int m = 0; m < k; ++m) {
            double d = u - nodes[m];
            if (std::abs(d) < 1e-14) return v[m * stride];
            double c = w[m] / d;
            num += c * v[m * stride];
            den += c;
        }
        return num / den;
    };
    // Interpolate along x for each row, then along y.
    double col[32];
    for (int m2 = 0; m2 < k; ++m2) col[m2] = interp1(values + m2 * k, 1, u1);
    return interp1(col, 1, u2);
}

}  // namespace fgt
