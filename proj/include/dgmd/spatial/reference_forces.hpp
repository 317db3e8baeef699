#pragma once

#include <vector>

#include "dgmd/dgrad/assembly.hpp"
#include "dgmd/integrators/force_provider.hpp"

namespace dgmd {

/// Single-threaded provider built directly on the reference assembly routines. The pair list is
/// rebuilt from linked cells at the start of every step.
class ReferenceForces final : public ForceProvider {
public:
    explicit ReferenceForces(Model model) : model_(model) {}

    void prepare(const ParticleSystem& sys) override;
    DGEvaluation discrete_gradient(std::span<const Vec3> q_n, std::span<const Vec3> u,
                                   const DGScheme& scheme) override;
    GradientEvaluation gradient(std::span<const Vec3> x) override;
    VecField jacobian_apply(JacobianMode mode, std::span<const Vec3> q_n, std::span<const Vec3> u,
                            std::span<const Vec3> v, double tau) override;
    void accept(ParticleSystem& sys, std::span<const Vec3> q_old) override;

    const std::vector<PairIndex>& pairs() const { return pairs_; }

private:
    Model model_;
    std::vector<PairIndex> pairs_;
    bool all_pairs_cached_ = false;
};

} // namespace dgmd
