#include "dgmd/spatial/domain.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "dgmd/core/errors.hpp"

namespace dgmd {

std::array<int, 3> DomainMap::coords(int rank) const {
    return {rank % ranks[0], (rank / ranks[0]) % ranks[1], rank / (ranks[0] * ranks[1])};
}

int DomainMap::rank_at(std::array<int, 3> c) const {
    for (int a = 0; a < 3; ++a) c[a] = ((c[a] % ranks[a]) + ranks[a]) % ranks[a];
    return (c[2] * ranks[1] + c[1]) * ranks[0] + c[0];
}

std::array<int, 3> DomainMap::subdomain_cells() const {
    return {cells[0] / ranks[0], cells[1] / ranks[1], cells[2] / ranks[2]};
}

Bounds DomainMap::subdomain(int rank) const {
    const auto c = coords(rank);
    const auto n = subdomain_cells();
    Bounds b;
    for (int a = 0; a < 3; ++a) {
        b.lo[a] = c[a] * n[a] * cell_edge[a];
        b.hi[a] = c[a] + 1 == ranks[a] ? box.lengths[a] : (c[a] + 1) * n[a] * cell_edge[a];
    }
    return b;
}

int DomainMap::rank_of(const Vec3& q) const {
    if (rank_count() == 1) return 0;
    const Vec3 x = wrap_position(q, box);
    const auto n = subdomain_cells();
    std::array<int, 3> c{};
    for (int a = 0; a < 3; ++a) {
        const int cell = std::min(static_cast<int>(std::floor(x[a] / cell_edge[a])), cells[a] - 1);
        c[a] = std::min(cell / n[a], ranks[a] - 1);
    }
    return rank_at(c);
}

DomainMap decompose(const Box& box, double r_cut, int rank_count, int halo) {
    if (rank_count < 1) throw ConfigError("rank count must be positive");
    DomainMap m;
    m.box = box;
    m.r_cut = r_cut;
    m.halo = halo;
    if (!box.is_periodic()) {
        if (rank_count != 1)
            throw ConfigError("domain decomposition needs a periodic box; use a single rank");
        return m;
    }
    const auto [n, edge] = cell_layout({{0, 0, 0}, box.lengths}, r_cut);
    m.cells = n;
    m.cell_edge = edge;

    double best = std::numeric_limits<double>::infinity();
    bool found = false;
    for (int px = rank_count; px >= 1; --px) {
        if (rank_count % px) continue;
        for (int py = rank_count / px; py >= 1; --py) {
            if ((rank_count / px) % py) continue;
            const int pz = rank_count / px / py;
            const std::array<int, 3> p{px, py, pz};
            bool ok = true;
            std::array<double, 3> s{};
            for (int a = 0; a < 3; ++a) {
                if (n[a] % p[a] || n[a] / p[a] < halo) ok = false;
                s[a] = static_cast<double>(n[a] / p[a]) * edge[a];
            }
            if (!ok) continue;
            const double surface = 2.0 * (s[0] * s[1] + s[1] * s[2] + s[2] * s[0]);
            // Loops run in descending lexicographic order, so strict improvement keeps ties first.
            if (surface < best) {
                best = surface;
                m.ranks = p;
                found = true;
            }
        }
    }
    if (!found)
        throw ConfigError("cannot split " + std::to_string(n[0]) + "x" + std::to_string(n[1]) + "x" +
                          std::to_string(n[2]) + " cells over " + std::to_string(rank_count) +
                          " ranks");
    return m;
}

} // namespace dgmd
