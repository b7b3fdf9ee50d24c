#pragma once

// Leaf polynomial machinery: tensor Chebyshev grids on [-1,1]^2, projection of
// grid samples onto a total-degree-(k-1) polynomial, evaluation, and
// barycentric interpolation of grid data.
//
// Per-coordinate basis on the reference interval [-1,1]:
//   order k >= 8 : Chebyshev polynomials T_0..T_{k-1}
//   order k 4, 6 : monomials 1, u, ..., u^{k-1}
// Coefficients are packed over pairs (n1, n2) with n1 + n2 < k; n2 is the slow
// index, n1 the fast one, so entries with a common n2 are contiguous.

#include <vector>

#include "common.hpp"

namespace fgt {

// Number of coefficients of a total-degree-(k-1) expansion.
inline int coeff_count(int k) { return k * (k + 1) / 2; }

// Flat position of the pair (n1, n2), n1 + n2 < k.
inline int coeff_index(int k, int n1, int n2) {
    return n2 * k - n2 * (n2 - 1) / 2 + n1;
}

// Chebyshev root nodes in ascending order: -cos(pi (2m+1) / (2k)), m = 0..k-1.
std::vector<double> cheb_nodes(int k);

bool basis_is_monomial(int k);

// Values of the k per-coordinate basis functions at u in [-1,1].
void basis_values(int k, double u, double* out);

// Projection of k x k samples (value[m2*k + m1] = f(node[m1], node[m2])) onto
// packed coefficients. k >= 8 uses the discrete cosine projection truncated to
// total degree < k; k in {4, 6} solves the least squares fit with a precomputed
// solution operator.
class LeafBasis {
  public:
    explicit LeafBasis(int k);
    int order() const { return k_; }
    int ncoef() const { return nc_; }
    const std::vector<double>& nodes() const { return nodes_; }

    void project(const double* samples, double* coef) const;
    // Evaluate the packed expansion at (u1, u2) in [-1,1]^2.
    double eval(const double* coef, double u1, double u2) const;

  private:
    int k_;
    int nc_;
    std::vector<double> nodes_;
    std::vector<double> basis_at_nodes_;  // k x k: basis_at_nodes_[m*k + n] = p_n(node_m)
    std::vector<double> lsq_;             // nc x k^2 least-squares solution operator (k < 8)
};

// Shared immutable basis objects, one per supported order.
const LeafBasis& leaf_basis(int k);

// Barycentric tensor interpolation of k x k grid values at (u1, u2) in
// [-1,1]^2. Exact for polynomials of per-coordinate degree < k.
double grid_interpolate(int k, const double* values, double u1, double u2);

}  // namespace fgt
