#include "dgmd/potentials/bonded.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dgmd/core/errors.hpp"

namespace dgmd {

AngleParams AngleParams::from_degrees(double k_theta, double theta0_deg) {
    return {k_theta, std::cos(theta0_deg * std::numbers::pi / 180.0)};
}

TorsionParams TorsionParams::butane(double k_phi) {
    return {k_phi, {1.116, -1.462, -1.578, 0.368, 3.156, 3.788}};
}

namespace {

double angle_cos_raw(double a, double b, double d) {
    if (!(a > 0.0) || !(b > 0.0))
        throw DegenerateGeometry("bond angle with a zero-length arm");
    return (a * a + b * b - d * d) / (2.0 * a * b);
}

// Pieces of the six-distance quotient, in squared distances.
struct DihedralQuotient {
    double numerator, area_ijk, area_jkl, cos_phi;
};

DihedralQuotient dihedral_quotient(const std::array<double, 6>& r) {
    const double a = r[0] * r[0]; // r_ij^2
    const double b = r[1] * r[1]; // r_jk^2
    const double c = r[2] * r[2]; // r_kl^2
    const double d = r[3] * r[3]; // r_ik^2
    const double e = r[4] * r[4]; // r_jl^2
    const double f = r[5] * r[5]; // r_il^2
    const double p = c + b - e;
    const double q = a + b - d;
    DihedralQuotient dq;
    dq.numerator = p * q - 2.0 * b * (b + f - e - d);
    dq.area_ijk = 4.0 * b * a - q * q;
    dq.area_jkl = 4.0 * b * c - p * p;
    if (!(dq.area_ijk > 0.0) || !(dq.area_jkl > 0.0))
        throw DegenerateGeometry("dihedral with collinear i-j-k or j-k-l");
    dq.cos_phi = dq.numerator / (std::sqrt(dq.area_ijk) * std::sqrt(dq.area_jkl));
    return dq;
}

template <std::size_t K>
std::array<double, K> distances_of(const Vec3* pos, const std::array<std::array<int, 2>, K>& pairs,
                                   std::array<Vec3, K>& unit) {
    std::array<double, K> r{};
    for (std::size_t k = 0; k < K; ++k) {
        const Vec3 d = pos[pairs[k][1]] - pos[pairs[k][0]];
        r[k] = norm(d);
        if (!(r[k] > 0.0)) throw DegenerateGeometry("coincident atoms in a bonded term");
        unit[k] = d / r[k];
    }
    return r;
}

template <std::size_t N, std::size_t K>
std::array<Vec3, N> chain_rule(const std::array<double, K>& dv,
                               const std::array<std::array<int, 2>, K>& pairs,
                               const std::array<Vec3, K>& unit) {
    std::array<Vec3, N> g{};
    for (std::size_t k = 0; k < K; ++k) {
        const Vec3 t = dv[k] * unit[k];
        g[pairs[k][0]] -= t;
        g[pairs[k][1]] += t;
    }
    return g;
}

} // namespace

double cos_angle_from_distances(double r_ji, double r_jk, double r_ik) {
    return std::clamp(angle_cos_raw(r_ji, r_jk, r_ik), -1.0, 1.0);
}

double angle_eval_distances(double r_ji, double r_jk, double r_ik, const AngleParams& params) {
    const double dc = cos_angle_from_distances(r_ji, r_jk, r_ik) - params.cos_theta0;
    return params.k_theta * dc * dc;
}

double AngleDistancePotential::value(const std::array<double, 3>& r) const {
    const double dc = angle_cos_raw(r[0], r[1], r[2]) - params.cos_theta0;
    return params.k_theta * dc * dc;
}

std::array<double, 3> AngleDistancePotential::partials(const std::array<double, 3>& r) const {
    const double a = r[0], b = r[1], d = r[2];
    const double c = angle_cos_raw(a, b, d);
    const double outer = 2.0 * params.k_theta * (c - params.cos_theta0);
    return {outer * (a * a - b * b + d * d) / (2.0 * a * a * b),
            outer * (b * b - a * a + d * d) / (2.0 * a * b * b), outer * (-d / (a * b))};
}

double cos_dihedral_from_distances(double r_ij, double r_jk, double r_kl, double r_ik, double r_jl,
                                   double r_il) {
    const auto dq = dihedral_quotient({r_ij, r_jk, r_kl, r_ik, r_jl, r_il});
    return std::clamp(dq.cos_phi, -1.0, 1.0);
}

TorsionValue torsion_eval(double cos_phi, const TorsionParams& params) {
    // Horner for value and derivative together.
    double v = 0.0, dv = 0.0;
    for (auto it = params.coefficients.rbegin(); it != params.coefficients.rend(); ++it) {
        dv = dv * cos_phi + v;
        v = v * cos_phi + *it;
    }
    return {params.k_phi * v, params.k_phi * dv};
}

double DihedralDistancePotential::value(const std::array<double, 6>& r) const {
    return torsion_eval(dihedral_quotient(r).cos_phi, params).v;
}

std::array<double, 6> DihedralDistancePotential::partials(const std::array<double, 6>& r) const {
    const auto dq = dihedral_quotient(r);
    const double outer = torsion_eval(dq.cos_phi, params).dv_dcos;

    const double a = r[0] * r[0], b = r[1] * r[1], c = r[2] * r[2];
    const double d = r[3] * r[3], e = r[4] * r[4], f = r[5] * r[5];
    const double p = c + b - e;
    const double q = a + b - d;

    // Derivatives with respect to the squared distances (a, b, c, d, e, f).
    const std::array<double, 6> dn{p, p + q - 4.0 * b - 2.0 * f + 2.0 * e + 2.0 * d, q,
                                   -p + 2.0 * b, -q + 2.0 * b, -2.0 * b};
    const std::array<double, 6> d_ijk{4.0 * b - 2.0 * q, 4.0 * a - 2.0 * q, 0.0, 2.0 * q, 0.0, 0.0};
    const std::array<double, 6> d_jkl{0.0, 4.0 * c - 2.0 * p, 4.0 * b - 2.0 * p, 0.0, 2.0 * p, 0.0};

    const double inv_root = 1.0 / (std::sqrt(dq.area_ijk) * std::sqrt(dq.area_jkl));
    std::array<double, 6> out{};
    for (std::size_t k = 0; k < 6; ++k) {
        const double dcos_dsq = dn[k] * inv_root -
                                0.5 * dq.cos_phi * (d_ijk[k] / dq.area_ijk + d_jkl[k] / dq.area_jkl);
        out[k] = outer * dcos_dsq * 2.0 * r[k];
    }
    return out;
}

std::array<Vec3, 4> dihedral_grad_distance_form(const std::array<Vec3, 4>& positions,
                                                 const TorsionParams& params) {
    std::array<Vec3, 6> unit;
    const auto r = distances_of(positions.data(), dihedral_distance_pairs, unit);
    const auto dv = DihedralDistancePotential{params}.partials(r);
    return chain_rule<4>(dv, dihedral_distance_pairs, unit);
}

std::array<Vec3, 3> angle_grad_distance_form(const std::array<Vec3, 3>& positions,
                                             const AngleParams& params) {
    std::array<Vec3, 3> unit;
    const auto r = distances_of(positions.data(), angle_distance_pairs, unit);
    const auto dv = AngleDistancePotential{params}.partials(r);
    return chain_rule<3>(dv, angle_distance_pairs, unit);
}

double dihedral_energy(const std::array<Vec3, 4>& positions, const TorsionParams& params) {
    std::array<Vec3, 6> unit;
    return DihedralDistancePotential{params}.value(
        distances_of(positions.data(), dihedral_distance_pairs, unit));
}

double angle_energy(const std::array<Vec3, 3>& positions, const AngleParams& params) {
    std::array<Vec3, 3> unit;
    return AngleDistancePotential{params}.value(
        distances_of(positions.data(), angle_distance_pairs, unit));
}

} // namespace dgmd
