#include "dgmd/potentials/forcefield.hpp"

#include <cmath>

#include "dgmd/core/errors.hpp"

namespace dgmd {

void ForceField::finalize() {
    if (lj_enabled && lj_switched && !(lj_cutoff > 0.0 && std::isfinite(lj_cutoff)))
        throw ConfigError("switched Lennard-Jones needs a positive finite cutoff");
    const std::size_t n = species.size();
    pair_table_.assign(n * n, LJParams{});
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            const auto m = mix(species[a].sigma, species[a].epsilon, species[b].sigma,
                               species[b].epsilon);
            pair_table_[a * n + b] = lj_switched ? LJParams::with_switch(m.sigma, m.epsilon, lj_cutoff)
                                                 : LJParams::plain(m.sigma, m.epsilon);
        }
    }
}

std::uint32_t ForceField::species_index(const std::string& name) const {
    for (std::size_t s = 0; s < species.size(); ++s)
        if (species[s].name == name) return static_cast<std::uint32_t>(s);
    throw ConfigError("unknown species '" + name + "'");
}

void ForceField::check(const Topology& topology) const {
    for (const auto& b : topology.bonds)
        if (b.type >= bond_types.size()) throw ConfigError("bond references a missing bond type");
    for (const auto& a : topology.angles)
        if (a.type >= angle_types.size()) throw ConfigError("angle references a missing angle type");
    for (const auto& d : topology.dihedrals)
        if (d.type >= torsion_types.size())
            throw ConfigError("dihedral references a missing torsion type");
}

} // namespace dgmd
