#pragma once

#include <span>

#include "dgmd/core/system.hpp"
#include "dgmd/dgrad/assembly.hpp"
#include "dgmd/solver/newton.hpp"

namespace dgmd {

/// Source of forces and discrete gradients for the time steppers. prepare() is called with the
/// accepted state at the start of every step; all later calls in the step may use positions that
/// differ from it by less than half the cutoff per particle.
class ForceProvider {
public:
    virtual ~ForceProvider() = default;

    virtual void prepare(const ParticleSystem& sys) = 0;
    virtual DGEvaluation discrete_gradient(std::span<const Vec3> q_n, std::span<const Vec3> u,
                                           const DGScheme& scheme) = 0;
    virtual GradientEvaluation gradient(std::span<const Vec3> x) = 0;
    /// Unweighted residual Jacobian applied to v (see dg_jacobian_vector).
    virtual VecField jacobian_apply(JacobianMode mode, std::span<const Vec3> q_n,
                                    std::span<const Vec3> u, std::span<const Vec3> v,
                                    double tau) = 0;
    /// Called after each step with the positions it started from. Checks the step against the
    /// neighbour-search assumptions and wraps positions into a periodic box.
    virtual void accept(ParticleSystem& sys, std::span<const Vec3> q_old) = 0;
};

/// Throws StepFailure when some particle moved cutoff/2 or more, then wraps positions.
void check_displacement_and_wrap(ParticleSystem& sys, std::span<const Vec3> q_old, const Box& box,
                                 double cutoff);

} // namespace dgmd
