#pragma once

// Boundary layers: fixed-order discretization of single/double layer
// potentials into point/dipole sources, the arc-length resolution test, and
// local quadrature corrections for segments the kernel does not resolve.

#include <functional>
#include <vector>

#include "direct.hpp"
#include "engine.hpp"

namespace fgt {

struct BoundaryLayer {
    std::vector<SegmentGeom> segments;
    std::vector<std::vector<double>> density;  // Legendre series per segment
    bool dipole = false;                       // single vs double layer
};

struct BoundaryParams {
    double delta = 0;
    double eps = 1e-9;
    int quad_order = 16;  // per-segment discretization rule
    int corr_order = 20;  // panel rule used by corrections
    int threads = 1;
};

struct BoundaryOutput {
    std::vector<double> values;     // one per target
    std::vector<uint8_t> resolved;  // per segment
    uint64_t corrections_applied = 0;  // (target, segment) pairs corrected
    TransformStats stats;
};

// Discrete sources equivalent to the layer under the fixed-order rule. The
// double layer becomes unit-direction dipoles along the right-hand normal
// (x2', -x1')/|G'|, with the curve Jacobian folded into the strengths.
void discretize_boundary(const BoundaryLayer& bl, int quad_order,
                         std::vector<PointSource>* pts,
                         std::vector<DipoleSource>* dips);

// A segment is resolved when its arc length is within 2 sqrt(log(1/eps)) of
// the kernel width sqrt(delta).
bool segment_resolved(const SegmentGeom& seg, double delta, double eps);

// Accurate-minus-discrete contribution of one segment at one target. Zero
// when the target is beyond kernel reach of the whole segment. `fired`
// reports whether any part of the segment was within reach.
double boundary_correction(const SegmentGeom& seg, const double* density,
                           int nd, bool dipole, Vec2 x, double delta,
                           double eps, int corr_order, int quad_order,
                           bool* fired = nullptr);

BoundaryOutput boundary_transform(const BoundaryLayer& bl,
                                  const std::vector<Vec2>& targets,
                                  const BoundaryParams& par);

// Elliptical test curve (0.45 cos t, 0.25 sin t), counterclockwise, split
// into nseg pieces with Legendre geometry of the given order.
std::vector<SegmentGeom> make_ellipse(int nseg, int order);

// Legendre fit (one series per segment) of a scalar function of position.
std::vector<std::vector<double>> fit_boundary_density(
    const std::vector<SegmentGeom>& segs, int order,
    const std::function<double(Vec2)>& f);

}  // namespace fgt
