#pragma once

// The transform engine: runs the upward/downward expansion passes and the
// near-field pass over a source tree, producing outputs on the tree's own
// grids and at arbitrary point targets.

#include <cstdint>
#include <vector>

#include "hermite.hpp"
#include "quadtree.hpp"

namespace fgt {

// How one (source box, target box) pair was carried. Every pair of leaves is
// mediated by exactly one mechanism (applied to an ancestor pair), or
// dropped because the boxes are farther apart than the kernel range.
enum class Mechanism {
    kNear = 0,     // adjacent leaves: tables / direct kernel sums
    kFar,          // same-level interaction list translation
    kCoarsePull,   // childless coarse neighbor formed into a local expansion
    kSourceEval,   // childless box evaluating a finer box's outgoing expansion
};

struct AuditRecord {
    Mechanism mech;
    int src = -1;  // sources carried: this node's whole subtree
    int tgt = -1;  // targets served: this node's whole subtree
};

struct TransformRequest {
    double delta = 0;
    double eps = 1e-9;
    bool periodic = false;
    double kernel_prefactor = 1.0;  // output is prefactor * transform
    int threads = 1;                // <= 0: hardware concurrency
    ForcePath force_path = ForcePath::kAuto;
    bool want_grid = true;
    std::vector<Vec2> targets;              // optional point targets
    std::vector<AuditRecord>* audit = nullptr;  // forces serial evaluation
};

struct TransformStats {
    int l_cut = 0;
    double r_c = 0;
    std::vector<int> n_h, n_t, p_t;  // per level (zero above l_cut)
    std::vector<uint8_t> used_pw;
    uint64_t far_translations = 0;
    uint64_t near_applies = 0;
    uint64_t point_kernel_evals = 0;
    double seconds_build = 0;  // plan, operator and table precompute
    double seconds_upward = 0;
    double seconds_downward = 0;
    double seconds_near = 0;  // evaluation + near pass
    double seconds_total = 0;
};

struct TransformResult {
    // want_grid: one k*k block per leaf in canonical leaves() order
    std::vector<double> grid;
    std::vector<double> point_out;  // one value per request target
    TransformStats stats;
};

TransformResult transform(Tree& tree, const TransformRequest& req);

}  // namespace fgt
