#pragma once

// Hermite-function machinery: outgoing (far-field) and incoming (local
// Taylor) expansions, their formation from sources, the translation
// operators between them, the plane-wave alternative for well-separated
// translations, and truncation-order selection from the error bounds.

#include <complex>
#include <vector>

#include "common.hpp"

namespace fgt {

// Scaled Hermite functions h_0..h_{n-1} at z:
//   h_0 = exp(-z^2), h_1 = 2 z exp(-z^2), h_{j+1} = 2 z h_j - 2 j h_{j-1}.
void hermite_values(int n, double z, double* out);

double inv_factorial(int n);  // 1/n!, n <= 300

// ---- truncation-order selection ----

// S_r(p) = sum_{n=0..p} r^n/sqrt(n!); T_r(p) = tail from n=p, summed until
// terms drop below eps*1e-3 (at most 500 terms).
double series_s(double r, int p);
double series_t(double r, int p, double eps);

// Smallest order satisfying each error bound (capped at 128).
int min_order_hermite(double r, double eps);  // pairs >= 1.5 sides apart
int min_order_taylor(double r, double eps);   // translated then re-expanded
int min_order_uniform(double r, double eps);  // no separation assumption

struct LevelPlan {
    double r = 0;      // box side / sqrt(delta)
    int n_h = 0;       // outgoing truncation order
    int n_t = 0;       // local truncation order
    int p_t = 0;       // plane-wave nodes per dimension (odd)
    double pw_h = 0;   // plane-wave node spacing
    bool use_pw = false;
};

enum class ForcePath { kAuto = 0, kHermite = 1, kPlaneWave = 2 };

struct Plan {
    double delta = 0, eps = 0;
    bool periodic = false;
    double r_c = 0;  // cutoff radius sqrt(log(1/eps))
    int l_cut = 0;   // first level taking part in the far field
    std::vector<LevelPlan> level;
};

Plan make_plan(double domain_side, int max_level,
               const std::vector<int>& boxes_per_level, double delta,
               double eps, bool periodic, ForcePath fp);

// ---- expansions ----

// Square coefficient tensor, entry (b1,b2) at index b2*order+b1.
struct Expansion {
    int order = 0;
    std::vector<double> a;
    void reset(int p) {
        order = p;
        a.assign((size_t)p * p, 0.0);
    }
};

void form_outgoing_from_point(Vec2 s, double sqrt_delta, Vec2 y, double q,
                              Expansion* out);
void form_outgoing_from_dipole(Vec2 s, double sqrt_delta, Vec2 y, double q,
                               Vec2 n, Expansion* out);
void form_local_from_point(Vec2 t, double sqrt_delta, Vec2 y, double q,
                           Expansion* out);
void form_local_from_dipole(Vec2 t, double sqrt_delta, Vec2 y, double q,
                            Vec2 n, Expansion* out);

double eval_outgoing(const Expansion& e, Vec2 s, double sqrt_delta, Vec2 x);
double eval_local(const Expansion& e, Vec2 t, double sqrt_delta, Vec2 x);

// Converts a leaf polynomial (packed total-degree coefficients over the
// leaf's [-1,1]^2 coordinates) into outgoing coefficients about its center.
class MomentTable {
  public:
    // rho = side/(2 sqrt(delta)), half_side = side/2.
    MomentTable(int k, int p, double rho, double half_side);
    void add_outgoing(const double* coef, Expansion* out) const;
    int order() const { return p_; }

  private:
    int k_, p_;
    std::vector<double> m_;  // p x k, includes half_side * rho^a / a!
};

// ---- translations (cached per level and displacement) ----

class Translators {
  public:
    Translators(const Plan& plan);

    // child outgoing -> parent outgoing; child corner (cx,cy) in {0,1}^2
    void shift_outgoing(int child_level, int cx, int cy, const Expansion& src,
                        Expansion* dst) const;
    // parent local -> child local
    void shift_local(int child_level, int cx, int cy, const Expansion& src,
                     Expansion* dst) const;
    // source outgoing -> target local, displacement (dx,dy) boxes at `level`
    void outgoing_to_local(int level, int dx, int dy, const Expansion& src,
                           Expansion* dst) const;

  private:
    struct LevelOps {
        int p_child = 0, p_par = 0, q_child = 0, q_par = 0, p = 0, q = 0;
        std::vector<double> u[2];  // outgoing shift, sign of z = -,+
        std::vector<double> v[2];  // local shift
        std::vector<double> w[7];  // outgoing->local, displacement -3..3
    };
    std::vector<LevelOps> ops_;
};

// ---- plane-wave path ----

struct PlaneWave {
    int p_t = 0;
    double h = 0;
    std::vector<std::complex<double>> w;  // p_t x p_t, index (j2*p_t + j1)
    void reset(int pt, double spacing) {
        p_t = pt;
        h = spacing;
        w.assign((size_t)pt * pt, {0, 0});
    }
};

// Outgoing coefficients -> plane-wave weights (both about the same center).
void outgoing_to_pw(const Expansion& src, const LevelPlan& lp, PlaneWave* out);
// dst += src shifted by (dx,dy) boxes of scaled size r (phase multiply).
void pw_accumulate(const PlaneWave& src, double r, int dx, int dy,
                   PlaneWave* dst);
// Plane-wave weights -> local Taylor coefficients about the same center.
void pw_to_local(const PlaneWave& src, int q, Expansion* out);

}  // namespace fgt
