#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "dgmd/potentials/bonded.hpp"
#include "dgmd/potentials/pair.hpp"

namespace dgmd {

struct Species {
    std::string name;
    double mass = 1.0;
    double sigma = 1.0;
    double epsilon = 0.0;
};

/// Global particle id used by topology terms (dense, equal to the particle index).
using ParticleId = std::uint64_t;

struct BondTerm {
    std::array<ParticleId, 2> atoms{};
    std::uint32_t type = 0;
};

struct AngleTerm {
    std::array<ParticleId, 3> atoms{}; ///< i, j (vertex), k
    std::uint32_t type = 0;
};

struct DihedralTerm {
    std::array<ParticleId, 4> atoms{};
    std::uint32_t type = 0;
    bool improper = false;
};

struct Topology {
    std::vector<BondTerm> bonds;
    std::vector<AngleTerm> angles;
    std::vector<DihedralTerm> dihedrals;

    std::size_t term_count() const { return bonds.size() + angles.size() + dihedrals.size(); }
    bool empty() const { return term_count() == 0; }
};

/// Parameter tables for every potential style plus the Lennard-Jones pair settings.
class ForceField {
public:
    std::vector<Species> species;
    std::vector<BondParams> bond_types;
    std::vector<AngleParams> angle_types;
    std::vector<TorsionParams> torsion_types;

    bool lj_enabled = true;
    bool lj_switched = false;
    double lj_cutoff = std::numeric_limits<double>::infinity();
    /// Skip Lennard-Jones between particles that share a nonzero molecule id.
    bool lj_intermolecular_only = true;

    /// Builds the mixed pair table. Must be called after editing species or LJ settings.
    void finalize();

    const LJParams& pair(std::uint32_t a, std::uint32_t b) const {
        return pair_table_[a * species.size() + b];
    }

    bool pair_excluded(std::uint64_t molecule_a, std::uint64_t molecule_b) const {
        return lj_intermolecular_only && molecule_a != 0 && molecule_a == molecule_b;
    }

    /// Largest distance at which any pair interaction is nonzero (infinite when unswitched).
    double cutoff() const {
        return lj_enabled && lj_switched ? lj_cutoff : std::numeric_limits<double>::infinity();
    }

    std::uint32_t species_index(const std::string& name) const;

    /// Throws ConfigError when a topology term references a missing parameter type.
    void check(const Topology& topology) const;

private:
    std::vector<LJParams> pair_table_;
};

} // namespace dgmd
