#pragma once

#include <cstdint>
#include <vector>

#include "dgmd/dgrad/assembly.hpp"
#include "dgmd/integrators/force_provider.hpp"
#include "dgmd/spatial/domain.hpp"
#include "dgmd/spatial/fabric.hpp"
#include "dgmd/spatial/halo.hpp"

namespace dgmd {

/// Domain-decomposed force engine over a simulated message fabric. Each rank evaluates the pairs
/// and bonded terms whose lowest-id particle it owns, with OpenMP over its slots; contributions
/// for ghost particles travel back to their owners, and every particle sums its contributions in
/// a fixed (kind, partner or term) order. Results therefore do not depend on the rank count and
/// match the reference assembly bit for bit.
class Engine final : public ForceProvider {
public:
    Engine(Model model, int ranks);

    void prepare(const ParticleSystem& sys) override;
    DGEvaluation discrete_gradient(std::span<const Vec3> q_n, std::span<const Vec3> u,
                                   const DGScheme& scheme) override;
    GradientEvaluation gradient(std::span<const Vec3> x) override;
    VecField jacobian_apply(JacobianMode mode, std::span<const Vec3> q_n, std::span<const Vec3> u,
                            std::span<const Vec3> v, double tau) override;
    void accept(ParticleSystem& sys, std::span<const Vec3> q_old) override;

    const DomainMap& domain() const { return map_; }
    const std::vector<LocalStore>& stores() const { return stores_; }
    const SimulatedFabric& fabric() const { return fabric_; }
    std::size_t migrations() const { return migrations_; }

    /// Pairs evaluated in the current step across all ranks, as sorted global-id pairs.
    std::vector<PairIndex> evaluated_pairs() const;

    /// How often each term was evaluated across all ranks by the last force or DG assembly.
    struct TermAudit {
        std::vector<int> bonds, angles, dihedrals;
    };
    const TermAudit& audit() const { return audit_; }

private:
    enum class Kind { dg, gradient, jacobian_full, hessian };

    struct PairSlot {
        std::uint32_t i, j;        ///< local indices
        std::uint64_t gid_i, gid_j; ///< gid_i < gid_j
        std::uint32_t species_pair;
    };

    struct Rank {
        std::vector<PairSlot> pairs;
        TermBindings terms;
        std::size_t entries = 0;
        std::vector<Vec3> values;       ///< one per contribution entry
        std::vector<double> v_start, v_end; ///< one per slot
        std::vector<std::vector<std::uint32_t>> remote; ///< entries per destination rank
        std::vector<std::uint32_t> offsets;  ///< CSR over owned particles
        std::vector<std::uint32_t> sources;  ///< into values, then incoming
        std::vector<std::uint32_t> incoming_begin; ///< per source rank, counted from values.size()
        std::vector<Vec3> incoming;         ///< contributions received from other ranks
    };

    void build_pairs(int r);
    void build_plans();
    void load_owned(std::vector<std::vector<Vec3>>& field, std::span<const Vec3> global);
    bool owned_equal(const std::vector<std::vector<Vec3>>& field, std::span<const Vec3> global) const;
    void evaluate(Kind kind, const DGScheme& scheme);
    void evaluate_rank(int r, Kind kind, const DGScheme& scheme);
    void reduce(std::vector<Vec3>& out);
    std::pair<double, double> reduce_energy();

    Model model_;
    int rank_count_;
    DomainMap map_;
    SimulatedFabric fabric_;
    TermIndex term_index_;
    std::vector<int> owner_;
    std::size_t migrations_ = 0;
    std::size_t particle_count_ = 0;

    std::vector<LocalStore> stores_;
    std::vector<HaloPlan> plans_;
    std::vector<Rank> ranks_;
    std::vector<std::vector<Vec3>> trial_, aux_, dir_;
    std::vector<std::pair<int, std::uint32_t>> energy_order_; ///< (rank, slot) in summation order
    TermAudit audit_;
};

} // namespace dgmd
