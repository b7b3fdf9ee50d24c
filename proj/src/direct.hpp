#pragma once

// Reference evaluators: straightforward O(N*M) or quadrature-based
// computations of the Gauss transform, used to verify the fast engine.
// These share only data-layout definitions with the fast path, never code.

#include <vector>

#include "common.hpp"

namespace fgt {

// ---- discrete sums ----

void direct_dgt(const std::vector<PointSource>& points,
                const std::vector<DipoleSource>& dipoles, const Vec2* targets,
                int n_targets, double delta, double* out);

// Periodic variant: sums over enough lattice images of a square cell of the
// given side (centered anywhere; positions are used as stored).
void direct_dgt_periodic(const std::vector<PointSource>& points,
                         const std::vector<DipoleSource>& dipoles,
                         const Vec2* targets, int n_targets, double delta,
                         double domain_side, double* out);

// ---- continuous volume sources ----

// One leaf's polynomial patch: coefficients in the packed total-degree layout
// over the leaf's own [-1,1]^2 coordinates.
struct LeafPatch {
    BoxGeom box;
    int k = 0;
    std::vector<double> coef;
};

double direct_volume_one(const LeafPatch& leaf, Vec2 x, double delta);
double direct_volume(const std::vector<LeafPatch>& leaves, Vec2 x,
                     double delta);
double direct_volume_periodic(const std::vector<LeafPatch>& leaves, Vec2 x,
                              double delta, double domain_side);

// ---- boundary layers ----

// A curve piece given by Legendre series of its coordinates on s in [-1,1].
struct SegmentGeom {
    int order = 0;
    std::vector<double> x1, x2;  // each of size `order`
};

Vec2 segment_point(const SegmentGeom& seg, double s);
Vec2 segment_deriv(const SegmentGeom& seg, double s);
double segment_length(const SegmentGeom& seg);

// Single (dipole=false) or double (dipole=true) layer potential of one
// segment with density given as a Legendre series, by adaptive quadrature.
// The double-layer direction is the right-hand normal of the
// parameterization, (x2', -x1')/|G'| (outward for a counterclockwise curve).
double direct_boundary_one(const SegmentGeom& seg, const double* density,
                           bool dipole, Vec2 x, double delta,
                           double tol = 1e-13);
double direct_boundary(const std::vector<SegmentGeom>& segs,
                       const std::vector<std::vector<double>>& density,
                       bool dipole, Vec2 x, double delta, double tol = 1e-13);

// ---- analytic fixtures ----

// Sum of five isotropic Gaussian bumps of distinct widths; smooth but sharply
// concentrated, good for exercising adaptive refinement.
double bump_value(Vec2 x);
// Its exact free-space Gauss transform.
double bump_transform(Vec2 x, double delta);
// A box that contains the bumps with enough margin that the free-space
// transform over the box matches the closed form to machine precision.
BoxGeom bump_domain();

// sin(2k pi x1) cos(2k pi x2): an eigenfunction of the periodic transform on
// the unit box with eigenvalue pi*delta*exp(-2 pi^2 k^2 delta).
double sinprod_value(Vec2 x, int k);
double sinprod_eigenvalue(int k, double delta);

}  // namespace fgt
