#include "dgmd/spatial/cells.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dgmd/core/errors.hpp"

namespace dgmd {

std::array<int, 3> CellGrid::cell_of(const Vec3& x) const {
    std::array<int, 3> c{};
    for (int a = 0; a < 3; ++a) {
        const int k = static_cast<int>(std::floor((x[a] - origin[a]) / edge[a]));
        c[a] = std::clamp(k, 0, counts[a] - 1);
    }
    return c;
}

std::pair<std::array<int, 3>, Vec3> cell_layout(const Bounds& bounds, double r_cut) {
    if (!(r_cut > 0.0) || !std::isfinite(r_cut))
        throw ConfigError("cell size needs a positive finite cutoff");
    std::array<int, 3> n{};
    Vec3 edge{};
    const Vec3 ext = bounds.extent();
    for (int a = 0; a < 3; ++a) {
        const double k = std::floor(ext[a] / r_cut);
        if (!(k >= 1.0)) throw ConfigError("domain is thinner than one cell of edge r_cut");
        n[a] = static_cast<int>(k);
        edge[a] = ext[a] / k;
    }
    return {n, edge};
}

CellGrid build_cells(std::span<const Vec3> points, const Bounds& bounds, double r_cut, int margin) {
    const auto [n, edge] = cell_layout(bounds, r_cut);
    CellGrid g;
    g.margin = margin;
    g.edge = edge;
    for (int a = 0; a < 3; ++a) {
        g.counts[a] = n[a] + 2 * margin;
        g.origin[a] = bounds.lo[a] - margin * edge[a];
    }
    g.cells.resize(static_cast<std::size_t>(g.counts[0]) * g.counts[1] * g.counts[2]);
    for (std::uint32_t i = 0; i < points.size(); ++i) {
        const auto c = g.cell_of(points[i]);
        g.cells[g.index(c[0], c[1], c[2])].push_back(i);
    }
    return g;
}

std::vector<PairIndex> candidate_pairs(const CellGrid& grid, int halo_width) {
    std::vector<PairIndex> out;
    const auto& n = grid.counts;
    for (int z = 0; z < n[2]; ++z)
        for (int y = 0; y < n[1]; ++y)
            for (int x = 0; x < n[0]; ++x) {
                const auto& here = grid.cells[grid.index(x, y, z)];
                if (here.empty()) continue;
                for (int dz = -halo_width; dz <= halo_width; ++dz)
                    for (int dy = -halo_width; dy <= halo_width; ++dy)
                        for (int dx = -halo_width; dx <= halo_width; ++dx) {
                            const int ox = x + dx, oy = y + dy, oz = z + dz;
                            if (ox < 0 || oy < 0 || oz < 0 || ox >= n[0] || oy >= n[1] ||
                                oz >= n[2])
                                continue;
                            const int other = grid.index(ox, oy, oz);
                            const int self = grid.index(x, y, z);
                            if (other < self) continue;
                            const auto& there = grid.cells[other];
                            for (auto i : here)
                                for (auto j : there) {
                                    if (other == self && j <= i) continue;
                                    out.push_back({std::min(i, j), std::max(i, j)});
                                }
                        }
            }
    return out;
}

std::vector<PairIndex> candidate_pairs(const CellGrid& grid, int halo_width,
                                      std::uint32_t centres) {
    std::vector<PairIndex> out;
    const auto& n = grid.counts;
    for (int z = 0; z < n[2]; ++z)
        for (int y = 0; y < n[1]; ++y)
            for (int x = 0; x < n[0]; ++x) {
                const auto& here = grid.cells[grid.index(x, y, z)];
                bool any = false;
                for (auto i : here) any = any || i < centres;
                if (!any) continue;
                for (int oz = std::max(0, z - halo_width); oz <= std::min(n[2] - 1, z + halo_width); ++oz)
                    for (int oy = std::max(0, y - halo_width); oy <= std::min(n[1] - 1, y + halo_width); ++oy)
                        for (int ox = std::max(0, x - halo_width); ox <= std::min(n[0] - 1, x + halo_width); ++ox)
                            for (auto j : grid.cells[grid.index(ox, oy, oz)])
                                for (auto i : here) {
                                    // A pair of two centres is emitted from the lower one only.
                                    if (i >= centres || i == j || (j < centres && j < i)) continue;
                                    out.push_back({std::min(i, j), std::max(i, j)});
                                }
            }
    return out;
}

std::vector<PairIndex> neighbor_pairs(std::span<const Vec3> q, const Box& box, double r_cut) {
    if (!std::isfinite(r_cut)) return all_pairs(q.size());
    const double reach = 2.0 * r_cut;

    std::vector<Vec3> points;
    std::vector<std::uint32_t> owner;
    Bounds bounds;
    if (box.is_periodic()) {
        bounds = {{0, 0, 0}, box.lengths};
        const auto [n, edge] = cell_layout(bounds, r_cut);
        std::vector<Vec3> images;
        std::vector<std::uint32_t> image_owner;
        for (std::uint32_t i = 0; i < q.size(); ++i) {
            const Vec3 x = wrap_position(q[i], box);
            // Shifts per axis: 0 always, +L near the low face, -L near the high face.
            std::array<std::array<double, 3>, 3> shifts{};
            std::array<int, 3> count{};
            for (int a = 0; a < 3; ++a) {
                shifts[a][count[a]++] = 0.0;
                if (x[a] < 2.0 * edge[a]) shifts[a][count[a]++] = box.lengths[a];
                if (x[a] >= box.lengths[a] - 2.0 * edge[a]) shifts[a][count[a]++] = -box.lengths[a];
            }
            for (int sx = 0; sx < count[0]; ++sx)
                for (int sy = 0; sy < count[1]; ++sy)
                    for (int sz = 0; sz < count[2]; ++sz) {
                        if (sx == 0 && sy == 0 && sz == 0) continue;
                        images.push_back(x + Vec3{shifts[0][sx], shifts[1][sy], shifts[2][sz]});
                        image_owner.push_back(i);
                    }
            points.push_back(x);
            owner.push_back(i);
        }
        points.insert(points.end(), images.begin(), images.end());
        owner.insert(owner.end(), image_owner.begin(), image_owner.end());
    } else {
        if (q.empty()) return {};
        Vec3 lo = q[0], hi = q[0];
        for (const auto& x : q)
            for (int a = 0; a < 3; ++a) {
                lo[a] = std::min(lo[a], x[a]);
                hi[a] = std::max(hi[a], x[a]);
            }
        for (int a = 0; a < 3; ++a) {
            const double pad = 0.5 * std::max(0.0, r_cut - (hi[a] - lo[a])) + 1e-9 * r_cut;
            lo[a] -= pad;
            hi[a] += pad;
        }
        bounds = {lo, hi};
        points.assign(q.begin(), q.end());
        for (std::uint32_t i = 0; i < q.size(); ++i) owner.push_back(i);
    }

    const CellGrid grid = build_cells(points, bounds, r_cut, box.is_periodic() ? 2 : 0);
    std::vector<PairIndex> out;
    for (const auto& pr : candidate_pairs(grid, 2, static_cast<std::uint32_t>(q.size()))) {
        std::uint32_t a = owner[pr.i], b = owner[pr.j];
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        if (norm(minimum_image(q[b] - q[a], box)) < reach) out.push_back({a, b});
    }
    std::sort(out.begin(), out.end(), [](const PairIndex& x, const PairIndex& y) {
        return x.i != y.i ? x.i < y.i : x.j < y.j;
    });
    out.erase(std::unique(out.begin(), out.end(),
                          [](const PairIndex& x, const PairIndex& y) {
                              return x.i == y.i && x.j == y.j;
                          }),
              out.end());
    return out;
}

} // namespace dgmd
