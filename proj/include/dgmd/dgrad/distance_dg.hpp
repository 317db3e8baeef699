#pragma once

#include <array>
#include <cstddef>

#include "dgmd/core/errors.hpp"
#include "dgmd/core/vec3.hpp"
#include "dgmd/dgrad/generic.hpp"

namespace dgmd {

/// Concept for a potential written as a function of K interatomic distances.
template <class P>
concept DistancePotential = requires(const P& p, const std::array<double, P::arity>& r) {
    { p.value(r) } -> std::convertible_to<double>;
    { p.partials(r) } -> std::convertible_to<std::array<double, P::arity>>;
};

/// Difference quotients of V along the distance coordinates plus the two endpoint energies.
template <std::size_t K>
struct DistanceDifferences {
    std::array<double, K> delta{};
    double v_start = 0.0; ///< V at the first time level
    double v_end = 0.0;   ///< V at the second time level
};

namespace detail {

/// Coordinate-increment sweep from r to r_prime in the fixed coordinate order.
template <DistancePotential P, std::size_t K = P::arity>
DistanceDifferences<K> increment_sweep(const P& pot, const std::array<double, K>& r,
                                       const std::array<double, K>& r_prime) {
    DistanceDifferences<K> out;
    std::array<double, K> point = r;
    double v_lo = pot.value(point);
    out.v_start = v_lo;
    for (std::size_t k = 0; k < K; ++k) {
        if (near_degenerate(r[k], r_prime[k])) {
            point[k] = 0.5 * (r[k] + r_prime[k]);
            out.delta[k] = pot.partials(point)[k];
            point[k] = r_prime[k];
            v_lo = pot.value(point);
            continue;
        }
        point[k] = r_prime[k];
        const double v_hi = pot.value(point);
        out.delta[k] = (v_hi - v_lo) / (r_prime[k] - r[k]);
        v_lo = v_hi;
    }
    out.v_end = v_lo;
    return out;
}

} // namespace detail

/// Finite differences of a distance potential for the Left, Right or Symmetric pattern.
template <DistancePotential P, std::size_t K = P::arity>
DistanceDifferences<K> distance_differences(const P& pot, const std::array<double, K>& r,
                                            const std::array<double, K>& r_prime,
                                            DGVariant variant) {
    switch (variant) {
    case DGVariant::left: return detail::increment_sweep(pot, r, r_prime);
    case DGVariant::right: {
        auto rev = detail::increment_sweep(pot, r_prime, r);
        std::swap(rev.v_start, rev.v_end);
        return rev;
    }
    case DGVariant::symmetric: break;
    }
    auto fwd = detail::increment_sweep(pot, r, r_prime);
    const auto rev = detail::increment_sweep(pot, r_prime, r);
    for (std::size_t k = 0; k < K; ++k) fwd.delta[k] = 0.5 * (fwd.delta[k] + rev.delta[k]);
    return fwd;
}

/// Discrete gradient of a term with N atoms whose potential depends on K distances.
/// `pairs[k] = {from, to}` names the atoms of distance k, with vector q_to - q_from.
/// Positions must already be unwrapped consistently within the term.
template <std::size_t N>
struct TermDG {
    std::array<Vec3, N> gradient{};
    double v_start = 0.0;
    double v_end = 0.0;
};

template <std::size_t N, DistancePotential P, std::size_t K = P::arity>
TermDG<N> distance_dg(const P& pot, const std::array<std::array<int, 2>, K>& pairs,
                         const std::array<Vec3, N>& q, const std::array<Vec3, N>& q_prime,
                         DGVariant variant) {
    std::array<Vec3, K> vec{}, vec_prime{};
    std::array<double, K> r{}, r_prime{};
    for (std::size_t k = 0; k < K; ++k) {
        vec[k] = q[pairs[k][1]] - q[pairs[k][0]];
        vec_prime[k] = q_prime[pairs[k][1]] - q_prime[pairs[k][0]];
        r[k] = norm(vec[k]);
        r_prime[k] = norm(vec_prime[k]);
        if (!(r[k] > 0.0) || !(r_prime[k] > 0.0))
            throw DegenerateGeometry("coincident atoms in a distance-based term");
    }
    const auto diff = distance_differences(pot, r, r_prime, variant);
    TermDG<N> out;
    out.v_start = diff.v_start;
    out.v_end = diff.v_end;
    for (std::size_t k = 0; k < K; ++k) {
        const Vec3 t = (diff.delta[k] / (r_prime[k] + r[k])) * (vec_prime[k] + vec[k]);
        out.gradient[pairs[k][0]] -= t;
        out.gradient[pairs[k][1]] += t;
    }
    return out;
}

} // namespace dgmd
