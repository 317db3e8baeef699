#include "dgmd/spatial/halo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dgmd/core/errors.hpp"

namespace dgmd {

namespace {

enum Tag : int {
    tag_records = 100,
    tag_images = 200,
    tag_refresh = 300,
    tag_migrate = 400,
};

int stage_tag(int base, int axis, int direction) { return base + 2 * axis + (direction > 0); }

// Periodic image code of a binning position relative to the wrapped position, 2 bits per axis.
std::uint64_t image_code(const Vec3& bin, const Vec3& wrapped, const Box& box) {
    std::uint64_t code = 0;
    for (int a = 0; a < 3; ++a) {
        const long k = std::lround((bin[a] - wrapped[a]) / box.lengths[a]);
        code |= static_cast<std::uint64_t>(k + 1) << (2 * a);
    }
    return code;
}

Vec3 apply_image(const Vec3& wrapped, std::uint64_t code, const Box& box) {
    Vec3 out = wrapped;
    for (int a = 0; a < 3; ++a) {
        const long k = static_cast<long>((code >> (2 * a)) & 3u) - 1;
        out[a] += static_cast<double>(k) * box.lengths[a];
    }
    return out;
}

} // namespace

GhostRecord LocalStore::record(std::size_t k) const {
    return {gid[k], molecule[k], species[k], q[k], q_trial[k], p[k]};
}

void LocalStore::append(const GhostRecord& r, const Vec3& bin_position) {
    gid.push_back(r.global_id);
    molecule.push_back(r.molecule);
    species.push_back(r.species);
    q.push_back(r.q);
    q_trial.push_back(r.q_trial);
    p.push_back(r.p);
    bin.push_back(bin_position);
}

void LocalStore::index() {
    first_copy.clear();
    first_copy.reserve(gid.size());
    canonical.resize(gid.size());
    for (std::uint32_t k = 0; k < gid.size(); ++k) canonical[k] = first_copy.emplace(gid[k], k).first->second;
}

std::vector<LocalStore> distribute(const ParticleSystem& sys, const DomainMap& map,
                                   std::span<const int> owner) {
    std::vector<LocalStore> stores(map.rank_count());
    for (int r = 0; r < map.rank_count(); ++r) stores[r].rank = r;
    for (std::size_t i = 0; i < sys.size(); ++i) {
        auto& s = stores[owner[i]];
        s.append({sys.global_id[i], sys.molecule[i], sys.species[i], sys.q[i], sys.q[i], sys.p[i]},
                 wrap_position(sys.q[i], map.box));
    }
    for (auto& s : stores) {
        s.n_owned = s.size();
        s.index();
    }
    return stores;
}

std::vector<HaloPlan> exchange_ghosts(std::vector<LocalStore>& stores, const DomainMap& map,
                                      SimulatedFabric& fabric) {
    const int nr = map.rank_count();
    std::vector<HaloPlan> plans(nr);
    if (!map.box.is_periodic()) return plans;
    const Box& box = map.box;

    for (int a = 0; a < 3; ++a) {
        const double width = map.halo * map.cell_edge[a];
        for (int r = 0; r < nr; ++r) {
            auto& s = stores[r];
            const Bounds b = map.subdomain(r);
            const auto c = map.coords(r);
            const std::size_t n_before = s.size();
            for (int dir : {-1, +1}) {
                HaloStage st;
                st.axis = a;
                st.direction = dir;
                auto to = c, from = c;
                to[a] += dir;
                from[a] -= dir;
                st.send_to = map.rank_at(to);
                st.receive_from = map.rank_at(from);
                double shift = 0.0;
                if (dir < 0 && c[a] == 0) shift = box.lengths[a];
                if (dir > 0 && c[a] == map.ranks[a] - 1) shift = -box.lengths[a];

                std::vector<GhostRecord> recs;
                std::vector<std::uint64_t> images;
                for (std::uint32_t k = 0; k < n_before; ++k) {
                    const double x = s.bin[k][a];
                    const bool in_strip = dir < 0 ? x < b.lo[a] + width : x >= b.hi[a] - width;
                    if (!in_strip) continue;
                    st.send.push_back(k);
                    recs.push_back(s.record(k));
                    Vec3 moved = s.bin[k];
                    moved[a] += shift;
                    images.push_back(image_code(moved, wrap_position(s.q[k], box), box));
                }
                fabric.send(r, st.send_to, stage_tag(tag_records, a, dir), encode_records(recs));
                fabric.send(r, st.send_to, stage_tag(tag_images, a, dir), encode_u64(images));
                plans[r].stages.push_back(std::move(st));
            }
        }
        for (int r = 0; r < nr; ++r) {
            auto& s = stores[r];
            for (auto& st : plans[r].stages) {
                if (st.axis != a) continue;
                const auto recs = decode_records(
                    fabric.receive(r, st.receive_from, stage_tag(tag_records, a, st.direction)));
                const auto images = decode_u64(
                    fabric.receive(r, st.receive_from, stage_tag(tag_images, a, st.direction)));
                if (images.size() != recs.size())
                    throw std::runtime_error("ghost image codes do not match the records");
                st.receive_begin = static_cast<std::uint32_t>(s.size());
                st.receive_count = static_cast<std::uint32_t>(recs.size());
                for (std::size_t k = 0; k < recs.size(); ++k)
                    s.append(recs[k], apply_image(wrap_position(recs[k].q, box), images[k], box));
            }
        }
    }
    for (auto& s : stores) s.index();
    return plans;
}

void refresh_ghosts(std::vector<std::vector<Vec3>>& fields, const std::vector<HaloPlan>& plans,
                    SimulatedFabric& fabric) {
    const int nr = static_cast<int>(plans.size());
    for (int a = 0; a < 3; ++a) {
        for (int r = 0; r < nr; ++r) {
            for (const auto& st : plans[r].stages) {
                if (st.axis != a) continue;
                std::vector<Vec3> values;
                values.reserve(st.send.size());
                for (auto k : st.send) values.push_back(fields[r][k]);
                fabric.send(r, st.send_to, stage_tag(tag_refresh, a, st.direction),
                            encode_vectors(values));
            }
        }
        for (int r = 0; r < nr; ++r) {
            for (const auto& st : plans[r].stages) {
                if (st.axis != a) continue;
                const auto values = decode_vectors(
                    fabric.receive(r, st.receive_from, stage_tag(tag_refresh, a, st.direction)));
                if (values.size() != st.receive_count)
                    throw std::runtime_error("ghost refresh does not match the exchange plan");
                std::copy(values.begin(), values.end(), fields[r].begin() + st.receive_begin);
            }
        }
    }
}

TermIndex index_terms(const Topology& topology, std::size_t particle_count) {
    TermIndex index(particle_count);
    const auto add = [&](int cls, std::uint32_t t, const auto& atoms) {
        const auto lowest = *std::min_element(atoms.begin(), atoms.end());
        if (lowest >= particle_count) throw ConfigError("topology term references a missing particle");
        index[lowest].emplace_back(cls, t);
    };
    for (std::uint32_t t = 0; t < topology.bonds.size(); ++t) add(0, t, topology.bonds[t].atoms);
    for (std::uint32_t t = 0; t < topology.angles.size(); ++t) add(1, t, topology.angles[t].atoms);
    for (std::uint32_t t = 0; t < topology.dihedrals.size(); ++t)
        add(2, t, topology.dihedrals[t].atoms);
    return index;
}

namespace {

template <std::size_t N>
std::array<std::uint32_t, N> resolve(const LocalStore& store, const std::array<ParticleId, N>& atoms,
                                     const char* kind, std::uint32_t term) {
    std::array<std::uint32_t, N> out{};
    for (std::size_t k = 0; k < N; ++k) {
        const auto it = store.first_copy.find(atoms[k]);
        if (it == store.first_copy.end())
            throw ConfigError(std::string(kind) + " term #" + std::to_string(term) + " atom " +
                              std::to_string(atoms[k]) + " has no copy on rank " +
                              std::to_string(store.rank) + " (ghost layer too thin)");
        out[k] = it->second;
    }
    return out;
}

} // namespace

TermBindings reattach_molecules(const LocalStore& store, const Topology& topology,
                                const TermIndex& index) {
    TermBindings b;
    std::vector<std::uint32_t> bonds, angles, dihedrals;
    for (std::size_t k = 0; k < store.n_owned; ++k) {
        for (const auto& [cls, t] : index[store.gid[k]]) {
            if (cls == 0) bonds.push_back(t);
            else if (cls == 1) angles.push_back(t);
            else dihedrals.push_back(t);
        }
    }
    std::sort(bonds.begin(), bonds.end());
    std::sort(angles.begin(), angles.end());
    std::sort(dihedrals.begin(), dihedrals.end());
    for (auto t : bonds) {
        b.bonds.push_back(t);
        b.bond_atoms.push_back(resolve(store, topology.bonds[t].atoms, "bond", t));
    }
    for (auto t : angles) {
        b.angles.push_back(t);
        b.angle_atoms.push_back(resolve(store, topology.angles[t].atoms, "angle", t));
    }
    for (auto t : dihedrals) {
        b.dihedrals.push_back(t);
        b.dihedral_atoms.push_back(resolve(store, topology.dihedrals[t].atoms, "dihedral", t));
    }
    return b;
}

MigrationReport migrate(const ParticleSystem& sys, std::span<const int> owner_before,
                        const DomainMap& map, SimulatedFabric& fabric) {
    MigrationReport rep;
    rep.owner.resize(sys.size());
    for (std::size_t i = 0; i < sys.size(); ++i) rep.owner[i] = map.rank_of(sys.q[i]);
    if (owner_before.size() != sys.size()) return rep;

    std::vector<std::size_t> moved;
    for (std::size_t i = 0; i < sys.size(); ++i) {
        const int from = owner_before[i], to = rep.owner[i];
        if (from == to) continue;
        const auto cf = map.coords(from), ct = map.coords(to);
        for (int a = 0; a < 3; ++a) {
            const int d = ((ct[a] - cf[a]) % map.ranks[a] + map.ranks[a]) % map.ranks[a];
            if (d > 1 && d != map.ranks[a] - 1)
                throw StepFailure("particle " + std::to_string(sys.global_id[i]) +
                                  " crossed more than one subdomain in a step");
        }
        const GhostRecord r{sys.global_id[i], sys.molecule[i], sys.species[i],
                            sys.q[i],         sys.q[i],        sys.p[i]};
        fabric.send(from, to, tag_migrate, encode_records(std::span(&r, 1)));
        moved.push_back(i);
    }
    for (auto i : moved) {
        const auto got = decode_records(fabric.receive(rep.owner[i], owner_before[i], tag_migrate));
        if (got.size() != 1 || got[0].global_id != sys.global_id[i])
            throw std::runtime_error("migration message out of order");
    }
    rep.transfers = moved.size();
    return rep;
}

} // namespace dgmd
