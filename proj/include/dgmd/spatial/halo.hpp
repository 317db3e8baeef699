#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "dgmd/core/system.hpp"
#include "dgmd/potentials/forcefield.hpp"
#include "dgmd/spatial/domain.hpp"
#include "dgmd/spatial/fabric.hpp"

namespace dgmd {

/// Particles held by one rank: owned ones first (ascending global id), then ghost copies in
/// arrival order. Coordinates are the owner's values bit for bit; `bin` is the position used for
/// cell binning, i.e. the wrapped position plus the periodic image shift of the copy.
struct LocalStore {
    int rank = 0;
    std::size_t n_owned = 0;
    std::vector<std::uint64_t> gid;
    std::vector<std::uint64_t> molecule;
    std::vector<std::uint32_t> species;
    std::vector<Vec3> q;
    std::vector<Vec3> q_trial;
    std::vector<Vec3> p;
    std::vector<Vec3> bin;
    std::unordered_map<std::uint64_t, std::uint32_t> first_copy;
    std::vector<std::uint32_t> canonical; ///< first copy of each entry's particle

    std::size_t size() const { return gid.size(); }
    GhostRecord record(std::size_t k) const;
    void append(const GhostRecord& r, const Vec3& bin_position);
    /// Rebuilds first_copy and canonical.
    void index();
};

/// One send/receive pair of the axis sweep, recorded so later refreshes can replay it.
struct HaloStage {
    int axis = 0;
    int direction = -1; ///< -1 sends the low strip to the lower neighbour
    int send_to = 0;
    int receive_from = 0;
    std::vector<std::uint32_t> send;
    std::uint32_t receive_begin = 0;
    std::uint32_t receive_count = 0;
};

struct HaloPlan {
    std::vector<HaloStage> stages; ///< axis-major, low direction first
};

/// Owned stores for every rank from the global arrays, using the given ownership.
std::vector<LocalStore> distribute(const ParticleSystem& sys, const DomainMap& map,
                                   std::span<const int> owner);

/// Three-phase axis sweep: along x, then y, then z, every rank sends the records within
/// `map.halo` cells of each face to the neighbour across it, including ghosts received in
/// earlier phases, so edge and corner regions arrive transitively. Appends the ghosts to the
/// stores and returns the replay plan per rank. A free-space map exchanges nothing.
std::vector<HaloPlan> exchange_ghosts(std::vector<LocalStore>& stores, const DomainMap& map,
                                      SimulatedFabric& fabric);

/// Replays the exchange for one per-rank field: owned entries of fields[r] are sent and the ghost
/// entries overwritten in the original order.
void refresh_ghosts(std::vector<std::vector<Vec3>>& fields, const std::vector<HaloPlan>& plans,
                    SimulatedFabric& fabric);

/// Bonded terms a rank evaluates, with their atoms resolved to local indices.
struct TermBindings {
    std::vector<std::uint32_t> bonds;
    std::vector<std::array<std::uint32_t, 2>> bond_atoms;
    std::vector<std::uint32_t> angles;
    std::vector<std::array<std::uint32_t, 3>> angle_atoms;
    std::vector<std::uint32_t> dihedrals;
    std::vector<std::array<std::uint32_t, 4>> dihedral_atoms;

    std::size_t size() const { return bonds.size() + angles.size() + dihedrals.size(); }
};

/// For each particle, the terms in which it has the lowest global id: (class, index) with class
/// 0 = bond, 1 = angle, 2 = dihedral.
using TermIndex = std::vector<std::vector<std::pair<int, std::uint32_t>>>;
TermIndex index_terms(const Topology& topology, std::size_t particle_count);

/// Binds every term whose lowest-id atom the rank owns; each term is therefore evaluated by
/// exactly one rank. Throws ConfigError naming the term when an atom has no local copy.
TermBindings reattach_molecules(const LocalStore& store, const Topology& topology,
                                const TermIndex& index);

struct MigrationReport {
    std::vector<int> owner;
    std::size_t transfers = 0;
};

/// New ownership from wrapped positions. Each transfer is sent as one record over the fabric.
/// Throws StepFailure when a particle jumped further than to a neighbouring subdomain.
MigrationReport migrate(const ParticleSystem& sys, std::span<const int> owner_before,
                        const DomainMap& map, SimulatedFabric& fabric);

} // namespace dgmd
