#pragma once

// Gauss-Legendre quadrature rules and Legendre polynomial evaluation.

#include <vector>

namespace fgt {

struct QuadRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;  // sum to 2
};

// n-point Gauss-Legendre rule (Newton iteration on P_n; cached per n).
const QuadRule& gauss_legendre(int n);

// Values of P_0..P_{k-1} at x.
void legendre_values(int k, double x, double* out);

// Value of sum_n c[n] P_n(x).
double legendre_eval(const double* c, int k, double x);

// Derivative of the series sum_n c[n] P_n'(x).
double legendre_eval_deriv(const double* c, int k, double x);

}  // namespace fgt
