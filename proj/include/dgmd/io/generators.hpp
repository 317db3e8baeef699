#pragma once

#include <array>
#include <cstdint>

#include "dgmd/core/system.hpp"
#include "dgmd/io/data_file.hpp"

namespace dgmd {

/// Lattice constant of an FCC lattice with nearest-neighbour spacing 2^(1/6) sigma.
double fcc_lattice_constant(double sigma);

struct FccBody {
    std::array<int, 3> cells{1, 1, 1};
    Vec3 origin{};   ///< corner of the first unit cell
    Vec3 velocity{}; ///< common velocity of every particle
};

struct CollisionSetup {
    FccBody small;
    FccBody large;
    double sigma = 1.0;
    double mass = 1.0;
    std::uint32_t species = 0;
};

/// Appends 4 particles per cubic cell (corner plus three face centres) of body b.
void add_fcc_body(ParticleSystem& sys, const FccBody& b, double sigma, double mass,
                  std::uint32_t species);

/// Small body first, then the large one. Throws ConfigError when the bodies come closer than
/// the nearest-neighbour spacing (axis-aligned extents padded by half a spacing intersect).
ParticleSystem fcc_collision_setup(const CollisionSetup& setup);

/// Places the bodies centred on (L/2, L/2) in x and y of a cubic box of side L, the large body
/// starting at z_floor with the small one a gap above it, moving along -z.
CollisionSetup centred_collision(std::array<int, 3> small_cells, std::array<int, 3> large_cells,
                                 double sigma, double mass, double speed, double box_length,
                                 double z_floor, double gap);

struct ButaneBoxSetup {
    int molecules_per_axis[3]{2, 2, 1};
    double box_length = 1.0;
    double bond_length = 0.153;
    double bond_angle_deg = 109.47;
    double temperature = 0.0;  ///< k_B T in energy units; sets the velocity spread
    std::uint64_t seed = 1;
    std::uint32_t end_species = 0, middle_species = 1;
};

/// United-atom butane molecules as planar zig-zag chains on a regular grid in a periodic box, with
/// Gaussian velocities (zero total momentum). Molecule ids start at 1. Returns the data file
/// rows plus the per-particle species.
struct GeneratedData {
    DataFile data;
    std::vector<std::uint32_t> species;
};
GeneratedData butane_box(const ButaneBoxSetup& setup, double end_mass, double middle_mass);

} // namespace dgmd
