#include "dgmd/io/generators.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "dgmd/core/errors.hpp"

namespace dgmd {

double fcc_lattice_constant(double sigma) { return std::sqrt(2.0) * std::pow(2.0, 1.0 / 6.0) * sigma; }

void add_fcc_body(ParticleSystem& sys, const FccBody& b, double sigma, double mass,
                  std::uint32_t species) {
    for (int c : b.cells)
        if (c < 1) throw ConfigError("FCC body cell counts must be positive");
    const double a = fcc_lattice_constant(sigma);
    static constexpr std::array<Vec3, 4> basis{{{0, 0, 0}, {0, 0.5, 0.5}, {0.5, 0, 0.5}, {0.5, 0.5, 0}}};
    for (int ix = 0; ix < b.cells[0]; ++ix)
        for (int iy = 0; iy < b.cells[1]; ++iy)
            for (int iz = 0; iz < b.cells[2]; ++iz)
                for (const auto& e : basis) {
                    const Vec3 cell{double(ix), double(iy), double(iz)};
                    sys.add(b.origin + a * (cell + e), mass * b.velocity, mass, species);
                }
}

namespace {

// Extent of the occupied lattice sites, padded by half a nearest-neighbour spacing.
std::pair<Vec3, Vec3> padded_extent(const FccBody& b, double sigma) {
    const double a = fcc_lattice_constant(sigma);
    const double pad = 0.5 * std::pow(2.0, 1.0 / 6.0) * sigma;
    const Vec3 top{(b.cells[0] - 0.5) * a, (b.cells[1] - 0.5) * a, (b.cells[2] - 0.5) * a};
    return {b.origin - Vec3{pad, pad, pad}, b.origin + top + Vec3{pad, pad, pad}};
}

} // namespace

ParticleSystem fcc_collision_setup(const CollisionSetup& setup) {
    if (!(setup.sigma > 0.0) || !(setup.mass > 0.0))
        throw ConfigError("collision sigma and mass must be positive");
    const auto [lo_s, hi_s] = padded_extent(setup.small, setup.sigma);
    const auto [lo_l, hi_l] = padded_extent(setup.large, setup.sigma);
    bool apart = false;
    for (int d = 0; d < 3; ++d) apart = apart || hi_s[d] <= lo_l[d] || hi_l[d] <= lo_s[d];
    if (!apart) throw ConfigError("the two FCC bodies overlap");

    ParticleSystem sys;
    add_fcc_body(sys, setup.small, setup.sigma, setup.mass, setup.species);
    add_fcc_body(sys, setup.large, setup.sigma, setup.mass, setup.species);
    return sys;
}

CollisionSetup centred_collision(std::array<int, 3> small_cells, std::array<int, 3> large_cells,
                                 double sigma, double mass, double speed, double box_length,
                                 double z_floor, double gap) {
    const double a = fcc_lattice_constant(sigma);
    // Centre the occupied sites, which span (cells - 1/2) lattice constants per axis.
    auto centred = [&](std::array<int, 3> cells, double z) {
        return Vec3{0.5 * box_length - 0.5 * (cells[0] - 0.5) * a,
                    0.5 * box_length - 0.5 * (cells[1] - 0.5) * a, z};
    };
    CollisionSetup s;
    s.sigma = sigma;
    s.mass = mass;
    s.large = {large_cells, centred(large_cells, z_floor), {}};
    const double large_top = z_floor + (large_cells[2] - 0.5) * a;
    s.small = {small_cells, centred(small_cells, large_top + gap), {0.0, 0.0, -speed}};
    return s;
}

GeneratedData butane_box(const ButaneBoxSetup& setup, double end_mass, double middle_mass) {
    const auto& n = setup.molecules_per_axis;
    if (n[0] < 1 || n[1] < 1 || n[2] < 1) throw ConfigError("molecule grid counts must be positive");
    const double L = setup.box_length;

    // Zig-zag in the xy plane, centred on the origin.
    const double half = 0.5 * setup.bond_angle_deg * std::numbers::pi / 180.0;
    const double dx = setup.bond_length * std::sin(half);
    const double dy = setup.bond_length * std::cos(half);
    const std::array<Vec3, 4> chain{{{-1.5 * dx, 0.5 * dy, 0}, {-0.5 * dx, -0.5 * dy, 0},
                                     {0.5 * dx, 0.5 * dy, 0}, {1.5 * dx, -0.5 * dy, 0}}};
    if (3.0 * dx >= L / n[0]) throw ConfigError("butane molecules do not fit in the box");

    GeneratedData g;
    auto& d = g.data;
    d.has_molecule_column = true;
    d.has_velocities = true;
    std::mt19937_64 rng(setup.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uint64_t mol = 0;
    for (int i = 0; i < n[0]; ++i)
        for (int j = 0; j < n[1]; ++j)
            for (int k = 0; k < n[2]; ++k) {
                ++mol;
                const Vec3 centre{(i + 0.5) * L / n[0], (j + 0.5) * L / n[1], (k + 0.5) * L / n[2]};
                d.blocks.push_back({mol, d.size(), 4});
                for (int a = 0; a < 4; ++a) {
                    const bool end = a == 0 || a == 3;
                    const double m = end ? end_mass : middle_mass;
                    const double s = std::sqrt(setup.temperature / m);
                    d.positions.push_back(centre + chain[a]);
                    d.velocities.push_back(Vec3{s * normal(rng), s * normal(rng), s * normal(rng)});
                    d.molecule.push_back(mol);
                    g.species.push_back(end ? setup.end_species : setup.middle_species);
                }
            }

    // Remove the centre-of-mass drift.
    Vec3 momentum{};
    double total_mass = 0.0;
    for (std::size_t p = 0; p < d.size(); ++p) {
        const double m = g.species[p] == setup.end_species ? end_mass : middle_mass;
        momentum += m * d.velocities[p];
        total_mass += m;
    }
    for (auto& v : d.velocities) v -= (1.0 / total_mass) * momentum;

    d.topology = derive_topology(d.blocks);
    return g;
}

} // namespace dgmd
