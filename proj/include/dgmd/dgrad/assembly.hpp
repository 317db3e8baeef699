#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dgmd/core/system.hpp"
#include "dgmd/dgrad/generic.hpp"
#include "dgmd/potentials/forcefield.hpp"

namespace dgmd {

/// Discrete gradient variants per bonded term class. Pair and bond terms always use the
/// (argument-symmetric) pairwise discrete gradient.
struct DGScheme {
    DGVariant angle = DGVariant::symmetric;
    DGVariant dihedral = DGVariant::symmetric;

    bool all_symmetric() const {
        return angle == DGVariant::symmetric && dihedral == DGVariant::symmetric;
    }
};

/// Full-system discrete gradient with the potential at both time levels.
struct DGEvaluation {
    std::vector<Vec3> gradient;
    double potential_at_q = 0.0;
    double potential_at_qprime = 0.0;
};

struct GradientEvaluation {
    std::vector<Vec3> gradient;
    double potential = 0.0;
};

enum class JacobianMode { full, simplified };

struct PairIndex {
    std::uint32_t i = 0;
    std::uint32_t j = 0;
};

/// Every unordered pair i < j (brute force).
std::vector<PairIndex> all_pairs(std::size_t n);

/// Static description of a model: particle attributes, terms and parameters.
struct Model {
    const ParticleSystem& attributes; ///< species and molecule columns are read
    const Topology& topology;
    const ForceField& forcefield;
    Box box;
};

// Serial reference assembly. `pairs` must contain every unexcluded pair whose separation at
// either time level is below the cutoff; extra pairs are harmless.

DGEvaluation assemble_system_dg(const Model& model, std::span<const Vec3> q,
                                std::span<const Vec3> q_prime, std::span<const PairIndex> pairs,
                                const DGScheme& scheme = {});

GradientEvaluation assemble_gradient(const Model& model, std::span<const Vec3> q,
                                     std::span<const PairIndex> pairs);

/// d(grad-bar V(q_n, u))/du applied to v. Pairwise models only (LJ and bonds).
std::vector<Vec3> dg_derivative_apply(const Model& model, std::span<const Vec3> q_n,
                                      std::span<const Vec3> u, std::span<const Vec3> v,
                                      std::span<const PairIndex> pairs);

/// Hessian of the LJ and bond potentials at x applied to v; angle and dihedral terms omitted.
std::vector<Vec3> hessian_apply(const Model& model, std::span<const Vec3> x,
                                std::span<const Vec3> v, std::span<const PairIndex> pairs);

/// Jacobian of the Velocity-DG residual applied to v:
///   full:       v + tau^2/2 M^-1 d(grad-bar V(q_n, u))/du v
///   simplified: v + tau^2/4 M^-1 Hess V((u + q_n)/2) v
std::vector<Vec3> dg_jacobian_vector(JacobianMode mode, const Model& model,
                                     std::span<const Vec3> q_n, std::span<const Vec3> u,
                                     std::span<const Vec3> v, double tau,
                                     std::span<const PairIndex> pairs);

} // namespace dgmd
