#pragma once

// Precomputed 1D quadrature tables that turn near-field work between leaf
// polynomials into small tensor contractions, plus the tables that push a
// coarse childless neighbor's polynomial directly into a local expansion.

#include <string>
#include <vector>

#include "common.hpp"

namespace fgt {

// vals[(o*k + m)*k + n] = integral over y in [-side/2, side/2] of
//   exp(-(t_{o,m} - y)^2 / delta) * p_n(2y/side)
// where t_{o,m} enumerates the target grid coordinates relative to the
// source center for one offset class o.
struct NearTable {
    int k = 0;
    int cls = 0;    // 0: same-level, 1: finer targets, 2: coarser targets
    int n_off = 0;  // 3 for cls 0, else 4
    double side = 0;
    double delta = 0;
    std::vector<double> vals;
};

// cls 0: t = (o-1)*s     + (s/2)*xi_m, o in 0..2  (colleague leaves)
// cls 1: t = (o-1.5)*s/2 + (s/4)*xi_m, o in 0..3  (targets one level finer)
// cls 2: t = (o-1.5)*s   +  s   *xi_m, o in 0..3  (targets one level coarser)
NearTable build_near_table(int k, double side, double delta, int cls);

// out[m2*k + m1] += sum_n coef(n) T(o1,m1,n1) T(o2,m2,n2)
void apply_near(const NearTable& t, int o1, int o2, const double* coef,
                double* out);

// The k basis integrals for one arbitrary target coordinate t (relative to
// the source center); evaluates the smooth near field at off-grid points.
void near_integrals(int k, double side, double delta, double t, double* out);

// vals[o][b*k + n] = (1/b!) * integral over y in [-side/2, side/2] of
//   h_b((y - off_o)/sqrt(delta)) * p_n(2y/side),  off_o = (o - 2.5)*side/2.
struct CoarseTable {
    int k = 0, q = 0;
    double side = 0;  // source (coarse) box side
    double delta = 0;
    std::vector<double> vals[6];
};

CoarseTable build_coarse_table(int k, int q, double side, double delta);

// local[b2*q + b1] += sum_n coef(n) T(o1,b1,n1) T(o2,b2,n2)
void apply_coarse(const CoarseTable& t, int o1, int o2, const double* coef,
                  double* local);

// Binary round-trip for near tables (magic "FGTT").
void dump_near_table(const std::string& path, const NearTable& t, int level);
NearTable load_near_table(const std::string& path, int* level);

}  // namespace fgt
