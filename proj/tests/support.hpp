#pragma once

#include <array>
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "dgmd/core/vec3.hpp"

namespace dgmd::testing {

inline Vec3 random_vec(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    return {u(rng), u(rng), u(rng)};
}

/// Displaced copy of points with each component moved by at most `h`.
template <std::size_t N>
std::array<Vec3, N> perturb(const std::array<Vec3, N>& q, std::mt19937_64& rng, double h) {
    auto out = q;
    for (auto& x : out) x += random_vec(rng, -h, h);
    return out;
}

/// Three points forming a triangle whose angle at the middle one lies well inside (0, pi).
inline std::array<Vec3, 3> random_angle(std::mt19937_64& rng) {
    for (;;) {
        std::array<Vec3, 3> q{random_vec(rng, -1, 1), random_vec(rng, -1, 1), random_vec(rng, -1, 1)};
        const Vec3 a = q[0] - q[1], b = q[2] - q[1];
        const double c = dot(a, b) / (norm(a) * norm(b));
        if (norm(a) > 0.4 && norm(b) > 0.4 && std::abs(c) < 0.95) return q;
    }
}

/// Smallest sine over the three corners of triangle (a, b, c).
inline double min_corner_sine(const Vec3& a, const Vec3& b, const Vec3& c) {
    const double twice_area = norm(cross(b - a, c - a));
    const double ab = norm(b - a), bc = norm(c - b), ca = norm(a - c);
    return twice_area / std::max({ab * ca, ab * bc, bc * ca});
}

/// Four points whose triangles i-j-k and j-k-l are far from collinear at every corner.
inline std::array<Vec3, 4> random_dihedral(std::mt19937_64& rng) {
    for (;;) {
        std::array<Vec3, 4> q{random_vec(rng, -1, 1), random_vec(rng, -1, 1), random_vec(rng, -1, 1),
                              random_vec(rng, -1, 1)};
        if (norm(q[1] - q[0]) > 0.4 && norm(q[2] - q[1]) > 0.4 && norm(q[3] - q[2]) > 0.4 &&
            min_corner_sine(q[0], q[1], q[2]) > 0.4 && min_corner_sine(q[1], q[2], q[3]) > 0.4)
            return q;
    }
}

inline double cos_dihedral_cross(const std::array<Vec3, 4>& q) {
    const Vec3 b1 = q[1] - q[0], b2 = q[2] - q[1], b3 = q[3] - q[2];
    const Vec3 m = cross(b1, b2), n = cross(b2, b3);
    return dot(m, n) / (norm(m) * norm(n));
}

template <std::size_t N>
double pairing(const std::array<Vec3, N>& g, const std::array<Vec3, N>& q,
               const std::array<Vec3, N>& q_prime) {
    double s = 0.0;
    for (std::size_t k = 0; k < N; ++k) s += dot(g[k], q_prime[k] - q[k]);
    return s;
}

inline double max_abs_diff(const Vec3& a, const Vec3& b) {
    return std::max({std::abs(a.x - b.x), std::abs(a.y - b.y), std::abs(a.z - b.z)});
}

} // namespace dgmd::testing
