#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "dgmd/core/system.hpp"
#include "dgmd/potentials/forcefield.hpp"

namespace dgmd {

/// A run of consecutive particles sharing one molecule id.
struct MoleculeBlock {
    std::uint64_t molecule = 0;
    std::size_t first = 0; ///< particle index
    std::size_t count = 0;
};

/// Contents of a "Positions" / "Velocities" data file. Indices are particle id - 1.
struct DataFile {
    std::vector<Vec3> positions;
    std::vector<Vec3> velocities; ///< zero where the file gives none
    std::vector<std::uint64_t> molecule; ///< 0 when the file has no molecule column
    bool has_molecule_column = false;
    bool has_velocities = false;
    std::vector<MoleculeBlock> blocks;
    /// Consecutive same-molecule atoms: bonds for pairs, angles for triples, proper
    /// dihedrals for quadruples. All terms use parameter type 0.
    Topology topology;

    std::size_t size() const { return positions.size(); }
};

/// Bonds, angles and proper dihedrals along every block with a nonzero molecule id.
Topology derive_topology(const std::vector<MoleculeBlock>& blocks);

/// Parses the paper's data fragment format. '#' starts a comment. Throws ParseError with the
/// line number on unknown sections, ragged or non-numeric rows, duplicate or non-dense ids.
DataFile parse_data_file(std::string_view text);

/// Inverse of parse_data_file; numbers use the shortest form that reads back exactly.
void write_data_file(std::ostream& out, const DataFile& data);

/// Builds particles with masses from the species table; momentum = mass * velocity.
/// species[i] names the species index of particle i.
ParticleSystem build_system(const DataFile& data, const ForceField& ff,
                            const std::vector<std::uint32_t>& species);

} // namespace dgmd
