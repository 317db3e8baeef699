#pragma once

#include <array>

#include "dgmd/core/system.hpp"
#include "dgmd/spatial/cells.hpp"

namespace dgmd {

/// Rank grid over a periodic box, with subdomain boundaries on global cell boundaries.
struct DomainMap {
    Box box;
    double r_cut = 0.0;
    int halo = 2;
    std::array<int, 3> ranks{1, 1, 1};
    std::array<int, 3> cells{1, 1, 1}; ///< global cell counts
    Vec3 cell_edge{};

    int rank_count() const { return ranks[0] * ranks[1] * ranks[2]; }
    std::array<int, 3> coords(int rank) const;
    int rank_at(std::array<int, 3> c) const; ///< coordinates taken modulo the grid
    Bounds subdomain(int rank) const;
    std::array<int, 3> subdomain_cells() const;
    /// Rank whose subdomain contains the wrapped position.
    int rank_of(const Vec3& q) const;
};

/// Chooses px*py*pz = rank_count with cell counts divisible per axis and at least `halo` cells
/// per subdomain axis, minimising the subdomain surface; ties go to the lexicographically
/// largest (px, py, pz). A free-space box only admits a single rank.
/// Throws ConfigError when no admissible grid exists.
DomainMap decompose(const Box& box, double r_cut, int rank_count, int halo = 2);

} // namespace dgmd
