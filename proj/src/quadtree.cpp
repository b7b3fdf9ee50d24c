#include "quadtree.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>

#include "chebyshev.hpp"

namespace fgt {

namespace {

uint64_t cell_key(uint32_t ix, uint32_t iy) {
    return ((uint64_t)iy << 32) | ix;
}

int64_t floor_div(int64_t a, int64_t m) {
    int64_t q = a / m;
    if (a % m != 0 && a < 0) --q;
    return q;
}

}  // namespace

Tree::Tree(const BoxGeom& domain, int k) : domain_(domain), k_(k) {
    require(domain.side > 0, "domain side must be positive");
    leaf_basis(k);  // validates the order
    new_node(0, 0, 0, -1);
}

int Tree::new_node(int level, uint32_t ix, uint32_t iy, int parent) {
    int idx = (int)nodes_.size();
    nodes_.emplace_back();
    Node& n = nodes_.back();
    n.level = level;
    n.ix = ix;
    n.iy = iy;
    n.parent = parent;
    n.samples.assign(k_ * k_, 0.0);
    n.coef.assign(coeff_count(k_), 0.0);
    if ((int)levels_.size() <= level) levels_.resize(level + 1);
    levels_[level].push_back(idx);
    maps_valid_ = false;
    lists_valid_ = false;
    return idx;
}

Vec2 Tree::box_center(int l, int64_t gx, int64_t gy) const {
    double s = side(l);
    return {domain_.center.x - domain_.side / 2 + s * (gx + 0.5),
            domain_.center.y - domain_.side / 2 + s * (gy + 0.5)};
}

int Tree::find_box(int l, int64_t gx, int64_t gy) const {
    if (l < 0 || l > max_level()) return -1;
    int64_t m = (int64_t)1 << l;
    if (gx < 0 || gx >= m || gy < 0 || gy >= m) return -1;
    if (!maps_valid_) rebuild_maps();
    const auto& map = maps_[l];
    auto it = map.find(cell_key((uint32_t)gx, (uint32_t)gy));
    return it == map.end() ? -1 : it->second;
}

void Tree::rebuild_maps() const {
    maps_.assign(levels_.size(), {});
    for (size_t l = 0; l < levels_.size(); ++l)
        for (int idx : levels_[l])
            maps_[l][cell_key(nodes_[idx].ix, nodes_[idx].iy)] = idx;
    maps_valid_ = true;
}

int Tree::leaf_containing(Vec2 x) const {
    require(domain_.contains(x), "position outside the domain box");
    int n = 0;
    while (!nodes_[n].is_leaf()) {
        Vec2 c = box_center(nodes_[n]);
        int cx = x.x >= c.x ? 1 : 0;
        int cy = x.y >= c.y ? 1 : 0;
        n = nodes_[n].child[cy * 2 + cx];
    }
    return n;
}

std::vector<int> Tree::leaves() const {
    std::vector<int> out;
    for (int i = 0; i < (int)nodes_.size(); ++i)
        if (nodes_[i].is_leaf()) out.push_back(i);
    std::sort(out.begin(), out.end(), [&](int a, int b) {
        const Node& na = nodes_[a];
        const Node& nb = nodes_[b];
        if (na.level != nb.level) return na.level < nb.level;
        if (na.iy != nb.iy) return na.iy < nb.iy;
        return na.ix < nb.ix;
    });
    return out;
}

void Tree::fill_children_from_parent(int nidx) {
    const LeafBasis& basis = leaf_basis(k_);
    const auto& xi = basis.nodes();
    std::vector<double> parent_coef = nodes_[nidx].coef;
    std::vector<double> smp(k_ * k_);
    for (int c = 0; c < 4; ++c) {
        int cx = c & 1, cy = c >> 1;
        for (int m2 = 0; m2 < k_; ++m2) {
            double u2 = (xi[m2] + (cy ? 1.0 : -1.0)) / 2;
            for (int m1 = 0; m1 < k_; ++m1) {
                double u1 = (xi[m1] + (cx ? 1.0 : -1.0)) / 2;
                smp[m2 * k_ + m1] = basis.eval(parent_coef.data(), u1, u2);
            }
        }
        Node& ch = nodes_[nodes_[nidx].child[c]];
        ch.samples = smp;
        basis.project(smp.data(), ch.coef.data());
    }
}

void Tree::rebin_sources(int nidx) {
    Vec2 c = box_center(nodes_[nidx]);
    auto pick = [&](Vec2 pos) {
        int cx = pos.x >= c.x ? 1 : 0;
        int cy = pos.y >= c.y ? 1 : 0;
        return nodes_[nidx].child[cy * 2 + cx];
    };
    for (int i : nodes_[nidx].pts) nodes_[pick(points_[i].pos)].pts.push_back(i);
    for (int i : nodes_[nidx].dips)
        nodes_[pick(dipoles_[i].pos)].dips.push_back(i);
    nodes_[nidx].pts.clear();
    nodes_[nidx].pts.shrink_to_fit();
    nodes_[nidx].dips.clear();
    nodes_[nidx].dips.shrink_to_fit();
}

void Tree::subdivide(int nidx) {
    require(nodes_[nidx].is_leaf(), "subdivide: box already has children");
    int level = nodes_[nidx].level;
    require(level < 28, "tree too deep");
    uint32_t bx = nodes_[nidx].ix * 2, by = nodes_[nidx].iy * 2;
    for (int c = 0; c < 4; ++c) {
        int ci = new_node(level + 1, bx + (c & 1), by + (c >> 1), nidx);
        nodes_[nidx].child[c] = ci;
    }
    fill_children_from_parent(nidx);
    rebin_sources(nidx);
    nodes_[nidx].samples.clear();
    nodes_[nidx].samples.shrink_to_fit();
    nodes_[nidx].coef.clear();
    nodes_[nidx].coef.shrink_to_fit();
}

void Tree::set_leaf_samples(int nidx, const double* vals) {
    Node& n = nodes_[nidx];
    require(n.is_leaf(), "samples can only be set on leaves");
    n.samples.assign(vals, vals + k_ * k_);
    leaf_basis(k_).project(vals, n.coef.data());
}

void Tree::set_all_samples(const double* vals) {
    std::vector<int> lv = leaves();
    for (size_t i = 0; i < lv.size(); ++i)
        set_leaf_samples(lv[i], vals + i * k_ * k_);
}

void Tree::add_points(const std::vector<PointSource>& pts) {
    for (const auto& p : pts) {
        int idx = (int)points_.size();
        points_.push_back(p);
        nodes_[leaf_containing(p.pos)].pts.push_back(idx);
    }
}

void Tree::add_dipoles(const std::vector<DipoleSource>& dips) {
    for (const auto& d : dips) {
        require(norm2(d.dir) > 0, "dipole direction must be nonzero");
        int idx = (int)dipoles_.size();
        DipoleSource dn = d;
        double len = std::sqrt(norm2(d.dir));
        dn.dir = (1.0 / len) * d.dir;  // store unit directions
        dn.strength = d.strength * len;
        dipoles_.push_back(dn);
        nodes_[leaf_containing(d.pos)].dips.push_back(idx);
    }
}

std::vector<Vec2> Tree::leaf_grid_points(int nidx) const {
    const Node& n = nodes_[nidx];
    const auto& xi = leaf_basis(k_).nodes();
    Vec2 c = box_center(n);
    double h = side(n.level) / 2;
    std::vector<Vec2> out(k_ * k_);
    for (int m2 = 0; m2 < k_; ++m2)
        for (int m1 = 0; m1 < k_; ++m1)
            out[m2 * k_ + m1] = {c.x + h * xi[m1], c.y + h * xi[m2]};
    return out;
}

std::vector<LeafPatch> Tree::leaf_patches() const {
    std::vector<LeafPatch> out;
    for (int idx : leaves()) {
        const Node& n = nodes_[idx];
        out.push_back(LeafPatch{BoxGeom{box_center(n), side(n.level)}, k_, n.coef});
    }
    return out;
}

int Tree::cutoff_level(double delta, double eps) const {
    require(delta > 0, "delta must be positive");
    require(eps > 0 && eps < 1, "eps must be in (0,1)");
    double range = std::sqrt(std::log(1 / eps) * delta);
    for (int l = 0; l <= max_level(); ++l)
        if (side(l) <= range) return l;
    return max_level() + 1;
}

Tree Tree::uniform(const BoxGeom& domain, int k, int levels) {
    require(levels >= 0 && levels <= 12, "uniform depth out of range");
    Tree t(domain, k);
    for (int l = 0; l < levels; ++l) {
        std::vector<int> cur = t.levels_[l];
        for (int n : cur) t.subdivide(n);
    }
    return t;
}

Tree Tree::adaptive(const BoxGeom& domain, int k, const Sampler& f, double tol,
                    int max_levels) {
    require(max_levels >= 0 && max_levels <= 16, "refinement depth out of range");
    require(tol >= 0, "refinement tolerance must be nonnegative");
    Tree t(domain, k);
    double gmax = 0;
    std::deque<int> work{0};
    std::vector<double> smp(k * k);
    while (!work.empty()) {
        int nidx = work.front();
        work.pop_front();
        std::vector<Vec2> xy = t.leaf_grid_points(nidx);
        f(xy.data(), k * k, smp.data());
        for (double v : smp) gmax = std::max(gmax, std::abs(v));
        t.set_leaf_samples(nidx, smp.data());
        if (t.nodes_[nidx].level >= max_levels) continue;
        // refine while the tail coefficient bands are visible above tol
        double band = 0;
        const auto& coef = t.nodes_[nidx].coef;
        for (int n2 = 0; n2 < k; ++n2)
            for (int n1 = 0; n1 + n2 < k; ++n1)
                if (n1 + n2 >= k - 2)
                    band = std::max(band, std::abs(coef[coeff_index(k, n1, n2)]));
        if (band > tol * gmax) {
            t.subdivide(nidx);
            for (int c : t.nodes_[nidx].child) work.push_back(c);
        }
    }
    t.balance();
    return t;
}

Tree Tree::from_points(const BoxGeom& domain, int k,
                       std::vector<PointSource> pts, int max_per_leaf,
                       int max_levels) {
    require(max_per_leaf >= 1, "max points per leaf must be >= 1");
    require(max_levels >= 0 && max_levels <= 16, "refinement depth out of range");
    Tree t(domain, k);
    t.add_points(pts);
    std::deque<int> work{0};
    while (!work.empty()) {
        int nidx = work.front();
        work.pop_front();
        if ((int)t.nodes_[nidx].pts.size() > max_per_leaf &&
            t.nodes_[nidx].level < max_levels) {
            t.subdivide(nidx);
            for (int c : t.nodes_[nidx].child) work.push_back(c);
        }
    }
    t.balance();
    return t;
}

void Tree::balance() {
    bool changed = true;
    while (changed) {
        changed = false;
        for (int n = 0; n < (int)nodes_.size(); ++n) {
            if (!nodes_[n].is_leaf()) continue;
            int l = nodes_[n].level;
            if (l + 2 > max_level()) continue;
            // any box two levels deeper touching this leaf forces a split
            int64_t m = (int64_t)1 << (l + 2);
            int64_t bx = (int64_t)nodes_[n].ix * 4, by = (int64_t)nodes_[n].iy * 4;
            bool split = false;
            for (int64_t gy = by - 1; gy <= by + 4 && !split; ++gy) {
                for (int64_t gx = bx - 1; gx <= bx + 4 && !split; ++gx) {
                    if (gx >= bx && gx <= bx + 3 && gy >= by && gy <= by + 3)
                        continue;  // interior of the leaf itself
                    int64_t wx = gx - floor_div(gx, m) * m;
                    int64_t wy = gy - floor_div(gy, m) * m;
                    if (find_box(l + 2, wx, wy) >= 0) split = true;
                }
            }
            if (split) {
                subdivide(n);
                changed = true;
            }
        }
    }
}

void Tree::ensure_lists(bool periodic) {
    if (lists_valid_ && lists_periodic_ == periodic) return;
    if (!maps_valid_) rebuild_maps();
    for (int n = 0; n < (int)nodes_.size(); ++n) build_lists_for(n, periodic);
    lists_valid_ = true;
    lists_periodic_ = periodic;
}

void Tree::build_lists_for(int nidx, bool periodic) {
    Node& n = nodes_[nidx];
    n.colleagues.clear();
    n.ilist.clear();
    n.coarse_ilist.clear();
    n.slist.clear();
    n.fine_near.clear();
    n.coarse_near.clear();

    const int l = n.level;
    const int64_t ix = n.ix, iy = n.iy;

    // Maps a global cell position at a level to a tree box, wrapping into the
    // domain when periodic; fails outside the domain in free space.
    auto lookup = [&](int lev, int64_t gx, int64_t gy, ListEntry* out) {
        int64_t m = (int64_t)1 << lev;
        int sx = 0, sy = 0;
        if (periodic) {
            sx = (int)floor_div(gx, m);
            sy = (int)floor_div(gy, m);
        } else if (gx < 0 || gx >= m || gy < 0 || gy >= m) {
            return false;
        }
        int idx = find_box(lev, gx - (int64_t)sx * m, gy - (int64_t)sy * m);
        if (idx < 0) return false;
        *out = ListEntry{idx, sx, sy};
        return true;
    };

    ListEntry e;
    for (int64_t dy = -1; dy <= 1; ++dy)
        for (int64_t dx = -1; dx <= 1; ++dx)
            if (lookup(l, ix + dx, iy + dy, &e)) n.colleagues.push_back(e);

    if (l > 0) {
        const Node& par = nodes_[n.parent];
        const int64_t px = par.ix, py = par.iy;
        // children of the parent's colleagues, split by adjacency
        for (int64_t gy = 2 * py - 2; gy <= 2 * py + 3; ++gy) {
            for (int64_t gx = 2 * px - 2; gx <= 2 * px + 3; ++gx) {
                if (std::llabs(gx - ix) <= 1 && std::llabs(gy - iy) <= 1) continue;
                if (lookup(l, gx, gy, &e)) n.ilist.push_back(e);
            }
        }
        // the parent's colleagues themselves, when childless
        for (int64_t gy = py - 1; gy <= py + 1; ++gy) {
            for (int64_t gx = px - 1; gx <= px + 1; ++gx) {
                if (!lookup(l - 1, gx, gy, &e)) continue;
                if (!nodes_[e.node].is_leaf()) continue;
                bool adjacent = ix >= 2 * gx - 1 && ix <= 2 * gx + 2 &&
                                iy >= 2 * gy - 1 && iy <= 2 * gy + 2;
                if (adjacent) {
                    if (n.is_leaf()) n.coarse_near.push_back(e);
                } else {
                    n.coarse_ilist.push_back(e);
                }
            }
        }
    }

    if (n.is_leaf()) {
        // children of own colleagues, split by adjacency
        for (int64_t gy = 2 * iy - 2; gy <= 2 * iy + 3; ++gy) {
            for (int64_t gx = 2 * ix - 2; gx <= 2 * ix + 3; ++gx) {
                bool adjacent = gx >= 2 * ix - 1 && gx <= 2 * ix + 2 &&
                                gy >= 2 * iy - 1 && gy <= 2 * iy + 2;
                if (!lookup(l + 1, gx, gy, &e)) continue;
                if (adjacent) {
                    if (nodes_[e.node].is_leaf()) n.fine_near.push_back(e);
                } else {
                    n.slist.push_back(e);
                }
            }
        }
    }
}

}  // namespace fgt
