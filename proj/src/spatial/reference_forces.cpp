#include "dgmd/spatial/reference_forces.hpp"

#include <cmath>

#include "dgmd/spatial/cells.hpp"

namespace dgmd {

void ReferenceForces::prepare(const ParticleSystem& sys) {
    const double cutoff = model_.forcefield.cutoff();
    if (!std::isfinite(cutoff)) {
        if (!all_pairs_cached_ || pairs_.size() != sys.size() * (sys.size() - 1) / 2) {
            pairs_ = all_pairs(sys.size());
            all_pairs_cached_ = true;
        }
        return;
    }
    pairs_ = neighbor_pairs(sys.q, model_.box, cutoff);
}

DGEvaluation ReferenceForces::discrete_gradient(std::span<const Vec3> q_n, std::span<const Vec3> u,
                                                const DGScheme& scheme) {
    return assemble_system_dg(model_, q_n, u, pairs_, scheme);
}

GradientEvaluation ReferenceForces::gradient(std::span<const Vec3> x) {
    return assemble_gradient(model_, x, pairs_);
}

VecField ReferenceForces::jacobian_apply(JacobianMode mode, std::span<const Vec3> q_n,
                                         std::span<const Vec3> u, std::span<const Vec3> v,
                                         double tau) {
    return dg_jacobian_vector(mode, model_, q_n, u, v, tau, pairs_);
}

void ReferenceForces::accept(ParticleSystem& sys, std::span<const Vec3> q_old) {
    check_displacement_and_wrap(sys, q_old, model_.box, model_.forcefield.cutoff());
}

} // namespace dgmd
