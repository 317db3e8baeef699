#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "dgmd/core/system.hpp"
#include "dgmd/dgrad/distance_dg.hpp"
#include "dgmd/potentials/bonded.hpp"
#include "dgmd/potentials/pair.hpp"

namespace dgmd {

/// Single-distance adaptor so pair potentials plug into distance_dg.
template <class F>
struct RadialDistancePotential {
    static constexpr std::size_t arity = 1;
    F fn;

    double value(const std::array<double, 1>& r) const { return fn(r[0]).v; }
    std::array<double, 1> partials(const std::array<double, 1>& r) const { return {fn(r[0]).d1}; }
};

struct PairDG {
    Vec3 g_i{};
    Vec3 g_j{};
    double v_start = 0.0;
    double v_end = 0.0;
};

/// Difference quotient (V(r') - V(r)) / (r' - r), or V'((r + r') / 2) for a vanishing increment.
template <class F>
double radial_difference(const F& fn, double r, double r_prime, double& v_start, double& v_end) {
    v_start = fn(r).v;
    v_end = fn(r_prime).v;
    if (near_degenerate(r, r_prime)) return fn(0.5 * (r + r_prime)).d1;
    return (v_end - v_start) / (r_prime - r);
}

/// Pairwise discrete gradient from the (imaged) separations d = q_j - q_i and d' = q_j' - q_i'.
/// g_j = Delta * (d' + d) / (r' + r), g_i = -g_j.
template <class F>
PairDG pair_dg_from_separation(const F& fn, const Vec3& d, const Vec3& d_prime) {
    const double r = norm(d);
    const double r_prime = norm(d_prime);
    if (!(r > 0.0) || !(r_prime > 0.0))
        throw DegenerateGeometry("coincident particles in a pair interaction");
    PairDG out;
    const double delta = radial_difference(fn, r, r_prime, out.v_start, out.v_end);
    out.g_j = (delta / (r_prime + r)) * (d_prime + d);
    out.g_i = -out.g_j;
    return out;
}

template <class F>
PairDG pairwise_dg(const F& fn, const Vec3& q_i, const Vec3& q_j, const Vec3& q_i_prime,
                   const Vec3& q_j_prime, const Box& box) {
    return pair_dg_from_separation(fn, minimum_image(q_j - q_i, box),
                                   minimum_image(q_j_prime - q_i_prime, box));
}

/// d/d(q_j') of the pairwise discrete gradient g_j applied to x; the block for q_i' is its
/// negative. Increments below 1e-3 relative use Simpson's rule on int_0^1 t V''(r + t h) dt,
/// which avoids cancellation in (V'(r') - Delta) / (r' - r).
template <class F>
Vec3 pair_dg_jacobian_apply(const F& fn, const Vec3& d, const Vec3& d_prime, const Vec3& x) {
    const double r = norm(d);
    const double r_prime = norm(d_prime);
    if (!(r > 0.0) || !(r_prime > 0.0))
        throw DegenerateGeometry("coincident particles in a pair interaction");
    double v0 = 0.0, v1 = 0.0;
    const double delta = radial_difference(fn, r, r_prime, v0, v1);
    const double h = r_prime - r;
    double d_delta;
    if (std::abs(h) < 1e-3 * (1.0 + std::max(r, r_prime))) {
        d_delta = (2.0 * fn(0.5 * (r + r_prime)).d2 + fn(r_prime).d2) / 6.0;
    } else {
        d_delta = (fn(r_prime).d1 - delta) / h;
    }
    const double s = r + r_prime;
    const Vec3 a = d_prime + d;
    const double ex = dot(d_prime, x) / r_prime;
    return (delta / s) * x + ((d_delta / s - delta / (s * s)) * ex) * a;
}

/// Hessian block of V(|d|) with respect to q_j applied to x (the q_i block is its negative).
template <class F>
Vec3 pair_hessian_apply(const F& fn, const Vec3& d, const Vec3& x) {
    const double r = norm(d);
    if (!(r > 0.0)) throw DegenerateGeometry("coincident particles in a pair interaction");
    const Radial f = fn(r);
    const Vec3 e = d / r;
    const double ex = dot(e, x);
    return (f.d2 * ex) * e + (f.d1 / r) * (x - ex * e);
}

/// Positions of a bonded term re-expressed around its first atom with minimum-image offsets.
template <std::size_t N>
std::array<Vec3, N> unwrap_term(const std::array<Vec3, N>& pos, const Box& box) {
    std::array<Vec3, N> out{};
    out[0] = pos[0];
    for (std::size_t k = 1; k < N; ++k) out[k] = pos[0] + minimum_image(pos[k] - pos[0], box);
    return out;
}

TermDG<3> angle_dg(DGVariant variant, const AngleParams& params, const std::array<Vec3, 3>& q,
                   const std::array<Vec3, 3>& q_prime, const Box& box);

enum class DihedralKind { proper, improper };

TermDG<4> dihedral_dg(DGVariant variant, const TorsionParams& params, const std::array<Vec3, 4>& q,
                      const std::array<Vec3, 4>& q_prime, DihedralKind kind, const Box& box);

} // namespace dgmd
