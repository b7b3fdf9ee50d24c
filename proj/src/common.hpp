#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fgt {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm2(Vec2 a) { return a.x * a.x + a.y * a.y; }

// Axis-aligned square region.
struct BoxGeom {
    Vec2 center;
    double side = 1.0;
    bool contains(Vec2 p) const {
        double h = 0.5 * side;
        return p.x >= center.x - h && p.x <= center.x + h && p.y >= center.y - h &&
               p.y <= center.y + h;
    }
};

// Gaussian kernel with variance parameter delta.
inline double gauss_kernel(Vec2 x, Vec2 y, double delta) {
    return std::exp(-norm2(x - y) / delta);
}

// Outward-derivative (double-layer) kernel: n . grad_y exp(-|x-y|^2/delta).
inline double gauss_dipole_kernel(Vec2 x, Vec2 y, Vec2 n, double delta) {
    return (2.0 / delta) * dot(x - y, n) * gauss_kernel(x, y, delta);
}

struct PointSource {
    Vec2 pos;
    double strength = 0.0;
};

struct DipoleSource {
    Vec2 pos;
    double strength = 0.0;
    Vec2 dir;  // unit direction of differentiation at the source
};

inline void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

}  // namespace fgt
