#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "dgmd/core/system.hpp"
#include "dgmd/dgrad/assembly.hpp"

namespace dgmd {

struct Bounds {
    Vec3 lo{};
    Vec3 hi{};
    Vec3 extent() const { return hi - lo; }
};

/// Linked cells over bounds widened by `margin` cells on every side (the ghost layer).
struct CellGrid {
    std::array<int, 3> counts{}; ///< including margin cells
    Vec3 edge{};
    Vec3 origin{}; ///< lower corner of the first margin cell
    int margin = 0;
    std::vector<std::vector<std::uint32_t>> cells;

    int index(int ix, int iy, int iz) const { return (iz * counts[1] + iy) * counts[0] + ix; }
    std::array<int, 3> cell_of(const Vec3& x) const;
};

/// Interior cell count and edge per axis: floor(extent / r_cut) cells of edge >= r_cut.
/// Throws ConfigError when an extent is shorter than r_cut.
std::pair<std::array<int, 3>, Vec3> cell_layout(const Bounds& bounds, double r_cut);

/// Bins points into cells of edge >= r_cut covering bounds plus `margin` cells. Points outside the
/// covered region are clamped into the outermost cells.
CellGrid build_cells(std::span<const Vec3> points, const Bounds& bounds, double r_cut,
                     int margin = 0);

/// Every unordered pair of binned points whose cells are at most `halo_width` cells apart per
/// axis, each exactly once as (i, j) with i < j, in cell sweep order.
std::vector<PairIndex> candidate_pairs(const CellGrid& grid, int halo_width);

/// Pairs with at least one point among the first `centres` binned points (the owned particles),
/// within `halo_width` cells per axis, each exactly once as (i, j) with i < j.
std::vector<PairIndex> candidate_pairs(const CellGrid& grid, int halo_width, std::uint32_t centres);

/// Pairs whose current separation is below 2 * r_cut for a single domain (free or periodic box),
/// deduplicated across periodic images and sorted. With an infinite cutoff returns all pairs.
/// Under the half-cutoff step bound this contains every pair that comes within r_cut during a step.
std::vector<PairIndex> neighbor_pairs(std::span<const Vec3> q, const Box& box, double r_cut);

} // namespace dgmd
