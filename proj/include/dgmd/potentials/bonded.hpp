#pragma once

#include <array>
#include <vector>

#include "dgmd/core/vec3.hpp"

namespace dgmd {

/// Cosine-squared angle potential V = k_theta (cos(theta) - cos(theta0))^2.
struct AngleParams {
    double k_theta = 0.0;
    double cos_theta0 = 1.0;

    static AngleParams from_degrees(double k_theta, double theta0_deg);
};

/// Torsion polynomial in cos(phi): V = k_phi * sum_n a_n cos(phi)^n.
struct TorsionParams {
    double k_phi = 0.0;
    std::vector<double> coefficients{0.0};

    /// United-atom butane torsion coefficients (a_0 .. a_5).
    static TorsionParams butane(double k_phi);
};

// Bond angle i-j-k (vertex j) through the three distances r_ji, r_jk, r_ik.

/// cos(theta) from distances, clamped to [-1, 1]. Throws DegenerateGeometry if r_ji or r_jk is 0.
double cos_angle_from_distances(double r_ji, double r_jk, double r_ik);

double angle_eval_distances(double r_ji, double r_jk, double r_ik, const AngleParams& params);

/// Angle potential as a function of the distance triple {r_ji, r_jk, r_ik}.
/// The quotient is not clamped here: the potential is a polynomial in cos and stays
/// smooth when the discrete gradient evaluates it at mixed-time distance triples.
struct AngleDistancePotential {
    static constexpr std::size_t arity = 3;
    AngleParams params;

    double value(const std::array<double, 3>& r) const;
    std::array<double, 3> partials(const std::array<double, 3>& r) const;
};

// Dihedral i-j-k-l through the six distances r_ij, r_jk, r_kl, r_ik, r_jl, r_il.

/// cos(phi) from the six distances, clamped to [-1, 1].
/// Throws DegenerateGeometry when i-j-k or j-k-l is collinear.
double cos_dihedral_from_distances(double r_ij, double r_jk, double r_kl, double r_ik, double r_jl,
                                   double r_il);

/// Value and derivative of the torsion polynomial with respect to cos(phi).
struct TorsionValue {
    double v = 0.0;
    double dv_dcos = 0.0;
};
TorsionValue torsion_eval(double cos_phi, const TorsionParams& params);

struct DihedralDistancePotential {
    static constexpr std::size_t arity = 6;
    TorsionParams params;

    double value(const std::array<double, 6>& r) const;
    std::array<double, 6> partials(const std::array<double, 6>& r) const;
};

/// Atom pairs (from, to) of the distance tuples; the distance vector is q_to - q_from.
inline constexpr std::array<std::array<int, 2>, 3> angle_distance_pairs{{{1, 0}, {1, 2}, {0, 2}}};
inline constexpr std::array<std::array<int, 2>, 6> dihedral_distance_pairs{
    {{0, 1}, {1, 2}, {2, 3}, {0, 2}, {1, 3}, {0, 3}}};

/// Analytic gradient of a cos-polynomial torsion assembled from the partial derivatives with
/// respect to the six distances. Separation vectors are taken as given (already imaged).
std::array<Vec3, 4> dihedral_grad_distance_form(const std::array<Vec3, 4>& positions,
                                                 const TorsionParams& params);

std::array<Vec3, 3> angle_grad_distance_form(const std::array<Vec3, 3>& positions,
                                             const AngleParams& params);

/// Torsion energy from positions via the six-distance representation.
double dihedral_energy(const std::array<Vec3, 4>& positions, const TorsionParams& params);
double angle_energy(const std::array<Vec3, 3>& positions, const AngleParams& params);

} // namespace dgmd
