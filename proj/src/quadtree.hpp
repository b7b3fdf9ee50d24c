#pragma once

// Level-restricted (2:1 balanced) quadtree over a square domain, with the
// neighbor/interaction lists used by the transform engine.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "common.hpp"
#include "direct.hpp"

namespace fgt {

// Reference to another box, with the periodic image shift (in whole domain
// widths) that places it next to the owning box. Always zero in free space.
struct ListEntry {
    int node = -1;
    int sx = 0, sy = 0;
};

struct Node {
    int level = 0;
    uint32_t ix = 0, iy = 0;  // column (from low x) / row (from low y)
    int parent = -1;
    std::array<int, 4> child{-1, -1, -1, -1};  // (ix,iy) = 00,10,01,11

    // Leaf payload: k*k grid samples (row-major, x fastest) and packed
    // total-degree polynomial coefficients. Zero-filled for point-only trees.
    std::vector<double> samples;
    std::vector<double> coef;
    std::vector<int> pts, dips;  // indices into the tree's source arrays

    // Lists (valid after ensure_lists):
    std::vector<ListEntry> colleagues;    // adjacent same-level boxes + self
    std::vector<ListEntry> ilist;         // same level, non-adjacent children
                                          // of parent's colleagues
    std::vector<ListEntry> coarse_ilist;  // childless non-adjacent
                                          // parent-colleagues
    std::vector<ListEntry> slist;         // non-adjacent children of own
                                          // colleagues (childless boxes only)
    std::vector<ListEntry> fine_near;     // adjacent leaves one level deeper
    std::vector<ListEntry> coarse_near;   // adjacent leaves one level coarser

    bool is_leaf() const { return child[0] < 0; }
};

using Sampler = std::function<void(const Vec2* xy, int n, double* out)>;

class Tree {
  public:
    static Tree uniform(const BoxGeom& domain, int k, int levels);
    static Tree adaptive(const BoxGeom& domain, int k, const Sampler& f,
                         double tol, int max_levels);
    static Tree from_points(const BoxGeom& domain, int k,
                            std::vector<PointSource> pts, int max_per_leaf,
                            int max_levels);

    const BoxGeom& domain() const { return domain_; }
    int order() const { return k_; }
    int node_count() const { return (int)nodes_.size(); }
    const Node& node(int i) const { return nodes_[i]; }
    Node& node_mut(int i) { return nodes_[i]; }
    int max_level() const { return (int)levels_.size() - 1; }
    const std::vector<int>& level_nodes(int l) const { return levels_[l]; }
    std::vector<int> leaves() const;  // sorted by (level, iy, ix)

    double side(int l) const { return std::ldexp(domain_.side, -l); }
    Vec2 box_center(int l, int64_t gx, int64_t gy) const;
    Vec2 box_center(const Node& n) const {
        return box_center(n.level, n.ix, n.iy);
    }
    // Node index of the box at global cell (gx, gy) of a level, or -1.
    int find_box(int l, int64_t gx, int64_t gy) const;
    // Leaf containing x (half-open cells; the domain's top edges included).
    int leaf_containing(Vec2 x) const;

    void set_leaf_samples(int node, const double* vals);
    void set_all_samples(const double* vals);  // canonical leaves() order
    void add_points(const std::vector<PointSource>& pts);
    void add_dipoles(const std::vector<DipoleSource>& dips);
    const std::vector<PointSource>& points() const { return points_; }
    const std::vector<DipoleSource>& dipoles() const { return dipoles_; }

    // Splits a leaf; children inherit the parent polynomial and its binned
    // sources. Invalidates lists.
    void subdivide(int node);
    // Restores the 2:1 level restriction (adjacency wraps around the domain
    // so the tree stays valid for either boundary condition).
    void balance();
    void ensure_lists(bool periodic);
    bool lists_periodic() const { return lists_periodic_; }

    std::vector<Vec2> leaf_grid_points(int node) const;
    std::vector<LeafPatch> leaf_patches() const;

    // First level whose box side is within the interaction range
    // sqrt(log(1/eps) * delta); max_level()+1 when even leaves are larger.
    int cutoff_level(double delta, double eps) const;

  private:
    Tree(const BoxGeom& domain, int k);
    int new_node(int level, uint32_t ix, uint32_t iy, int parent);
    void fill_children_from_parent(int node);
    void rebin_sources(int node);
    void rebuild_maps() const;
    void build_lists_for(int node, bool periodic);
    int bin_one(Vec2 p) const;

    BoxGeom domain_;
    int k_ = 8;
    std::vector<Node> nodes_;
    std::vector<std::vector<int>> levels_;
    std::vector<PointSource> points_;
    std::vector<DipoleSource> dipoles_;

    mutable std::vector<std::unordered_map<uint64_t, int>> maps_;
    mutable bool maps_valid_ = false;
    bool lists_valid_ = false;
    bool lists_periodic_ = false;
};

}  // namespace fgt
