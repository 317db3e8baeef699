#include "dgmd/spatial/engine.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>
#include <tuple>

#include "dgmd/core/errors.hpp"
#include "dgmd/dgrad/terms.hpp"
#include "dgmd/spatial/cells.hpp"

namespace dgmd {

namespace {

enum Tag : int {
    tag_plan = 500,
    tag_energy_plan = 501,
    tag_contrib = 600,
    tag_energy = 601,
};

constexpr int pair_kind = 0, bond_kind = 1, angle_kind = 2, dihedral_kind = 3;

template <std::size_t N>
std::string describe(const char* kind, std::size_t index, const std::array<ParticleId, N>& atoms) {
    std::string s = std::string(kind) + " term #" + std::to_string(index) + " (atoms";
    for (auto a : atoms) s += " " + std::to_string(a);
    return s + ")";
}

template <std::size_t N>
std::array<Vec3, N> gather(const std::vector<Vec3>& x, const std::array<std::uint32_t, N>& idx) {
    std::array<Vec3, N> out{};
    for (std::size_t k = 0; k < N; ++k) out[k] = x[idx[k]];
    return out;
}

bool pair_less(const PairIndex& a, const PairIndex& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
}

} // namespace

Engine::Engine(Model model, int ranks) : model_(model), rank_count_(ranks) {
    const double cutoff = model_.forcefield.cutoff();
    if (model_.box.is_periodic()) {
        if (!std::isfinite(cutoff))
            throw ConfigError("a periodic box needs a finite (switched) interaction cutoff");
        model_.box.validate(cutoff);
    }
    map_ = decompose(model_.box, cutoff, ranks);
    model_.forcefield.check(model_.topology);
}

void Engine::prepare(const ParticleSystem& sys) {
    if (sys.size() != particle_count_ || term_index_.size() != sys.size()) {
        particle_count_ = sys.size();
        term_index_ = index_terms(model_.topology, sys.size());
        owner_.clear();
    }
    const MigrationReport mig = migrate(sys, owner_, map_, fabric_);
    migrations_ += mig.transfers;
    owner_ = mig.owner;

    stores_ = distribute(sys, map_, owner_);
    plans_ = exchange_ghosts(stores_, map_, fabric_);

    ranks_.assign(rank_count_, Rank{});
    trial_.assign(rank_count_, {});
    aux_.assign(rank_count_, {});
    dir_.assign(rank_count_, {});
    for (int r = 0; r < rank_count_; ++r) {
        const auto& s = stores_[r];
        trial_[r] = s.q;
        aux_[r] = s.q;
        dir_[r].assign(s.size(), Vec3{});
        build_pairs(r);
        ranks_[r].terms = reattach_molecules(s, model_.topology, term_index_);
    }
    build_plans();
}

void Engine::build_pairs(int r) {
    const auto& s = stores_[r];
    const auto& ff = model_.forcefield;
    const double cutoff = ff.cutoff();
    auto& out = ranks_[r].pairs;
    out.clear();
    if (!ff.lj_enabled) return;

    // Local index pairs (first copies), lower global id first.
    std::vector<PairIndex> local;
    if (!std::isfinite(cutoff)) {
        // Single rank in free space: all owned pairs.
        local = all_pairs(s.n_owned);
    } else {
        Bounds bounds;
        int margin = 0;
        if (model_.box.is_periodic()) {
            bounds = map_.subdomain(r);
            margin = map_.halo;
        } else {
            if (s.size() == 0) return;
            bounds = {s.bin[0], s.bin[0]};
            for (const auto& x : s.bin)
                for (int a = 0; a < 3; ++a) {
                    bounds.lo[a] = std::min(bounds.lo[a], x[a]);
                    bounds.hi[a] = std::max(bounds.hi[a], x[a]);
                }
            for (int a = 0; a < 3; ++a) {
                const double pad =
                    0.5 * std::max(0.0, cutoff - (bounds.hi[a] - bounds.lo[a])) + 1e-9 * cutoff;
                bounds.lo[a] -= pad;
                bounds.hi[a] += pad;
            }
        }
        const CellGrid grid = build_cells(s.bin, bounds, cutoff, margin);
        const double reach = 2.0 * cutoff;
        for (const auto& pr : candidate_pairs(grid, 2, static_cast<std::uint32_t>(s.n_owned))) {
            auto ia = s.canonical[pr.i], ib = s.canonical[pr.j];
            if (ia == ib) continue;
            if (s.gid[ia] > s.gid[ib]) std::swap(ia, ib);
            if (ia >= s.n_owned) continue; // the owner of the lower id evaluates
            if (!(norm(minimum_image(s.q[ib] - s.q[ia], model_.box)) < reach)) continue;
            local.push_back({ia, ib});
        }
        // Owned particles are stored in global-id order, so bucketing by the first index and
        // sorting each bucket by partner id yields global-id order overall.
        std::vector<std::uint32_t> start(s.n_owned + 1, 0);
        for (const auto& pr : local) ++start[pr.i + 1];
        for (std::size_t k = 0; k < s.n_owned; ++k) start[k + 1] += start[k];
        std::vector<std::uint32_t> partner(local.size()), cursor(start.begin(), start.end() - 1);
        for (const auto& pr : local) partner[cursor[pr.i]++] = pr.j;
        local.clear();
        for (std::uint32_t a = 0; a < s.n_owned; ++a) {
            const auto first = partner.begin() + start[a], last = partner.begin() + start[a + 1];
            std::sort(first, last, [&s](std::uint32_t x, std::uint32_t y) { return s.gid[x] < s.gid[y]; });
            for (auto it = first; it != last; ++it)
                if (it == first || *it != *(it - 1)) local.push_back({a, *it});
        }
    }
    out.reserve(local.size());
    const auto ns = static_cast<std::uint32_t>(ff.species.size());
    for (const auto& [i, j] : local) {
        if (ff.pair_excluded(s.molecule[i], s.molecule[j])) continue;
        out.push_back({i, j, s.gid[i], s.gid[j], s.species[i] * ns + s.species[j]});
    }
}

void Engine::build_plans() {
    struct Entry {
        std::uint32_t target;
        int kind;
        std::uint64_t key;
        std::uint32_t source;
    };
    const auto& topo = model_.topology;

    // Every contribution entry of a rank, in slot order.
    std::vector<std::vector<std::tuple<std::uint32_t, int, std::uint64_t>>> entries(rank_count_);
    for (int r = 0; r < rank_count_; ++r) {
        auto& e = entries[r];
        const auto& w = ranks_[r];
        for (const auto& p : w.pairs) {
            e.emplace_back(p.i, pair_kind, p.gid_j);
            e.emplace_back(p.j, pair_kind, p.gid_i);
        }
        for (std::size_t t = 0; t < w.terms.bonds.size(); ++t)
            for (auto a : w.terms.bond_atoms[t]) e.emplace_back(a, bond_kind, w.terms.bonds[t]);
        for (std::size_t t = 0; t < w.terms.angles.size(); ++t)
            for (auto a : w.terms.angle_atoms[t]) e.emplace_back(a, angle_kind, w.terms.angles[t]);
        for (std::size_t t = 0; t < w.terms.dihedrals.size(); ++t)
            for (auto a : w.terms.dihedral_atoms[t])
                e.emplace_back(a, dihedral_kind, w.terms.dihedrals[t]);
    }

    // Send the keys of contributions to remotely owned particles to their owners.
    for (int r = 0; r < rank_count_; ++r) {
        auto& w = ranks_[r];
        const auto& s = stores_[r];
        w.entries = entries[r].size();
        w.values.assign(w.entries, Vec3{});
        const std::size_t slots = w.pairs.size() + w.terms.size();
        w.v_start.assign(slots, 0.0);
        w.v_end.assign(slots, 0.0);
        w.remote.assign(rank_count_, {});
        for (std::uint32_t k = 0; k < w.entries; ++k) {
            const auto target = std::get<0>(entries[r][k]);
            if (target < s.n_owned) continue;
            w.remote[map_.rank_of(s.q[target])].push_back(k);
        }
        for (int d = 0; d < rank_count_; ++d) {
            if (d == r) continue;
            std::vector<std::uint64_t> keys;
            for (auto k : w.remote[d]) {
                const auto& [target, kind, key] = entries[r][k];
                keys.insert(keys.end(), {s.gid[target], static_cast<std::uint64_t>(kind), key});
            }
            fabric_.send(r, d, tag_plan, encode_u64(keys));
        }
        std::vector<std::uint64_t> ekeys;
        for (const auto& p : w.pairs) ekeys.insert(ekeys.end(), {pair_kind, p.gid_i, p.gid_j});
        for (auto t : w.terms.bonds) ekeys.insert(ekeys.end(), {bond_kind, t, 0});
        for (auto t : w.terms.angles) ekeys.insert(ekeys.end(), {angle_kind, t, 0});
        for (auto t : w.terms.dihedrals) ekeys.insert(ekeys.end(), {dihedral_kind, t, 0});
        fabric_.send(r, 0, tag_energy_plan, encode_u64(ekeys));
    }

    // Owners: canonical summation order per owned particle.
    for (int d = 0; d < rank_count_; ++d) {
        auto& w = ranks_[d];
        const auto& s = stores_[d];
        std::vector<Entry> list;
        for (std::uint32_t k = 0; k < w.entries; ++k) {
            const auto& [target, kind, key] = entries[d][k];
            if (target < s.n_owned) list.push_back({target, kind, key, k});
        }
        w.incoming_begin.assign(rank_count_, 0);
        std::uint32_t offset = static_cast<std::uint32_t>(w.entries);
        for (int r = 0; r < rank_count_; ++r) {
            if (r == d) continue;
            const auto keys = decode_u64(fabric_.receive(d, r, tag_plan));
            w.incoming_begin[r] = offset;
            for (std::size_t m = 0; m + 2 < keys.size(); m += 3) {
                const auto it = s.first_copy.find(keys[m]);
                if (it == s.first_copy.end() || it->second >= s.n_owned)
                    throw std::runtime_error("contribution sent to a rank that does not own it");
                list.push_back({it->second, static_cast<int>(keys[m + 1]), keys[m + 2], offset});
                ++offset;
            }
        }
        w.incoming.assign(offset - w.entries, Vec3{});
        // Bucket by target, then order each bucket by (kind, key).
        w.offsets.assign(s.n_owned + 1, 0);
        for (const auto& m : list) ++w.offsets[m.target + 1];
        for (std::size_t k = 0; k < s.n_owned; ++k) w.offsets[k + 1] += w.offsets[k];
        std::vector<Entry> sorted(list.size());
        std::vector<std::uint32_t> cursor(w.offsets.begin(), w.offsets.end() - 1);
        for (const auto& m : list) sorted[cursor[m.target]++] = m;
        w.sources.resize(sorted.size());
        for (std::size_t k = 0; k < s.n_owned; ++k) {
            const auto first = sorted.begin() + w.offsets[k], last = sorted.begin() + w.offsets[k + 1];
            std::sort(first, last, [](const Entry& a, const Entry& b) {
                return std::tie(a.kind, a.key) < std::tie(b.kind, b.key);
            });
        }
        for (std::size_t m = 0; m < sorted.size(); ++m) w.sources[m] = sorted[m].source;
    }

    // Rank 0: summation order of the potential energy, a merge of the per-rank key lists.
    using Key = std::array<std::uint64_t, 3>;
    std::vector<std::vector<std::pair<Key, std::uint32_t>>> lists(rank_count_);
    for (int r = 0; r < rank_count_; ++r) {
        const auto keys = decode_u64(fabric_.receive(0, r, tag_energy_plan));
        auto& l = lists[r];
        l.reserve(keys.size() / 3);
        for (std::size_t m = 0; m + 2 < keys.size(); m += 3)
            l.push_back({{keys[m], keys[m + 1], keys[m + 2]}, static_cast<std::uint32_t>(m / 3)});
        if (!std::is_sorted(l.begin(), l.end())) std::sort(l.begin(), l.end());
    }
    energy_order_.clear();
    std::vector<std::size_t> head(rank_count_, 0);
    for (;;) {
        int best = -1;
        for (int r = 0; r < rank_count_; ++r)
            if (head[r] < lists[r].size() &&
                (best < 0 || lists[r][head[r]].first < lists[best][head[best]].first))
                best = r;
        if (best < 0) break;
        energy_order_.emplace_back(best, lists[best][head[best]++].second);
    }

    audit_.bonds.assign(topo.bonds.size(), 0);
    audit_.angles.assign(topo.angles.size(), 0);
    audit_.dihedrals.assign(topo.dihedrals.size(), 0);
}

void Engine::load_owned(std::vector<std::vector<Vec3>>& field, std::span<const Vec3> global) {
    for (int r = 0; r < rank_count_; ++r) {
        const auto& s = stores_[r];
        for (std::size_t k = 0; k < s.n_owned; ++k) field[r][k] = global[s.gid[k]];
    }
    refresh_ghosts(field, plans_, fabric_);
}

bool Engine::owned_equal(const std::vector<std::vector<Vec3>>& field,
                         std::span<const Vec3> global) const {
    for (int r = 0; r < rank_count_; ++r) {
        const auto& s = stores_[r];
        for (std::size_t k = 0; k < s.n_owned; ++k) {
            const Vec3& a = field[r][k];
            const Vec3& b = global[s.gid[k]];
            if (a.x != b.x || a.y != b.y || a.z != b.z) return false;
        }
    }
    return true;
}

void Engine::evaluate_rank(int r, Kind kind, const DGScheme& scheme) {
    auto& w = ranks_[r];
    const auto& s = stores_[r];
    const auto& ff = model_.forcefield;
    const auto& topo = model_.topology;
    const Box& box = model_.box;
    const double cutoff = ff.cutoff();
    const auto& q = s.q;
    const auto& u = trial_[r];
    const auto& x = aux_[r];
    const auto& v = dir_[r];
    const std::size_t np = w.pairs.size();

    std::exception_ptr error;
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < np; ++k) {
        const auto& pr = w.pairs[k];
        const LJParams& params = ff.pair(pr.species_pair / ff.species.size(),
                                         pr.species_pair % ff.species.size());
        const auto fn = [&params](double rr) { return lj_eval(rr, params); };
        Vec3 gi{}, gj{};
        double e0 = 0.0, e1 = 0.0;
        try {
            switch (kind) {
            case Kind::dg: {
                const Vec3 d = minimum_image(q[pr.j] - q[pr.i], box);
                const Vec3 dp = minimum_image(u[pr.j] - u[pr.i], box);
                if (std::min(norm(d), norm(dp)) >= cutoff) break;
                const PairDG t = pair_dg_from_separation(fn, d, dp);
                gi = t.g_i;
                gj = t.g_j;
                e0 = t.v_start;
                e1 = t.v_end;
                break;
            }
            case Kind::gradient: {
                const Vec3 d = minimum_image(x[pr.j] - x[pr.i], box);
                const double rr = norm(d);
                if (rr >= cutoff) break;
                if (!(rr > 0.0))
                    throw DegenerateGeometry("coincident particles in a pair interaction");
                const Radial f = lj_eval(rr, params);
                const Vec3 t = (f.d1 / rr) * d;
                gi = -t;
                gj = t;
                e0 = f.v;
                break;
            }
            case Kind::jacobian_full: {
                const Vec3 d = minimum_image(q[pr.j] - q[pr.i], box);
                const Vec3 dp = minimum_image(u[pr.j] - u[pr.i], box);
                if (std::min(norm(d), norm(dp)) >= cutoff) break;
                const Vec3 t = pair_dg_jacobian_apply(fn, d, dp, v[pr.j] - v[pr.i]);
                gi = -t;
                gj = t;
                break;
            }
            case Kind::hessian: {
                const Vec3 mi = 0.5 * (u[pr.i] + q[pr.i]);
                const Vec3 mj = 0.5 * (u[pr.j] + q[pr.j]);
                const Vec3 d = minimum_image(mj - mi, box);
                if (norm(d) >= cutoff) break;
                const Vec3 t = pair_hessian_apply(fn, d, v[pr.j] - v[pr.i]);
                gi = -t;
                gj = t;
                break;
            }
            }
        } catch (...) {
#pragma omp critical(dgmd_engine_error)
            if (!error) error = std::current_exception();
        }
        w.values[2 * k] = gi;
        w.values[2 * k + 1] = gj;
        w.v_start[k] = e0;
        w.v_end[k] = e1;
    }
    if (error) std::rethrow_exception(error);

    std::size_t entry = 2 * np;
    std::size_t slot = np;
    const auto& tb = w.terms;
    const bool energies = kind == Kind::dg || kind == Kind::gradient;

    for (std::size_t b = 0; b < tb.bonds.size(); ++b, ++slot, entry += 2) {
        const auto& term = topo.bonds[tb.bonds[b]];
        const auto [i, j] = tb.bond_atoms[b];
        const BondParams& params = ff.bond_types[term.type];
        const auto fn = [&params](double rr) { return bond_eval(rr, params); };
        Vec3 gi{}, gj{};
        double e0 = 0.0, e1 = 0.0;
        switch (kind) {
        case Kind::dg: {
            try {
                const PairDG t = pairwise_dg(fn, q[i], q[j], u[i], u[j], box);
                gi = t.g_i;
                gj = t.g_j;
                e0 = t.v_start;
                e1 = t.v_end;
            } catch (const DegenerateGeometry& e) {
                throw DegenerateGeometry(describe("bond", tb.bonds[b], term.atoms) + ": " + e.what());
            }
            break;
        }
        case Kind::gradient: {
            const Vec3 d = minimum_image(x[j] - x[i], box);
            const double rr = norm(d);
            if (!(rr > 0.0)) throw DegenerateGeometry("bond with coincident atoms");
            const Radial f = bond_eval(rr, params);
            const Vec3 t = (f.d1 / rr) * d;
            gi = -t;
            gj = t;
            e0 = f.v;
            break;
        }
        case Kind::jacobian_full: {
            const Vec3 d = minimum_image(q[j] - q[i], box);
            const Vec3 dp = minimum_image(u[j] - u[i], box);
            const Vec3 t = pair_dg_jacobian_apply(fn, d, dp, v[j] - v[i]);
            gi = -t;
            gj = t;
            break;
        }
        case Kind::hessian: {
            const Vec3 d = minimum_image(0.5 * (u[j] + q[j]) - 0.5 * (u[i] + q[i]), box);
            const Vec3 t = pair_hessian_apply(fn, d, v[j] - v[i]);
            gi = -t;
            gj = t;
            break;
        }
        }
        w.values[entry] = gi;
        w.values[entry + 1] = gj;
        w.v_start[slot] = e0;
        w.v_end[slot] = e1;
        if (energies) ++audit_.bonds[tb.bonds[b]];
    }

    for (std::size_t a = 0; a < tb.angles.size(); ++a, ++slot, entry += 3) {
        const auto& term = topo.angles[tb.angles[a]];
        const auto& params = ff.angle_types[term.type];
        std::array<Vec3, 3> g{};
        double e0 = 0.0, e1 = 0.0;
        if (kind == Kind::dg) {
            try {
                const auto t = angle_dg(scheme.angle, params, gather(q, tb.angle_atoms[a]),
                                        gather(u, tb.angle_atoms[a]), box);
                g = t.gradient;
                e0 = t.v_start;
                e1 = t.v_end;
            } catch (const DegenerateGeometry& e) {
                throw DegenerateGeometry(describe("angle", tb.angles[a], term.atoms) + ": " +
                                         e.what());
            }
        } else if (kind == Kind::gradient) {
            const auto pos = unwrap_term(gather(x, tb.angle_atoms[a]), box);
            g = angle_grad_distance_form(pos, params);
            e0 = angle_energy(pos, params);
        }
        for (int k = 0; k < 3; ++k) w.values[entry + k] = g[k];
        w.v_start[slot] = e0;
        w.v_end[slot] = e1;
        if (energies) ++audit_.angles[tb.angles[a]];
    }

    for (std::size_t d = 0; d < tb.dihedrals.size(); ++d, ++slot, entry += 4) {
        const auto& term = topo.dihedrals[tb.dihedrals[d]];
        const auto& params = ff.torsion_types[term.type];
        std::array<Vec3, 4> g{};
        double e0 = 0.0, e1 = 0.0;
        if (kind == Kind::dg) {
            try {
                const auto t = dihedral_dg(
                    scheme.dihedral, params, gather(q, tb.dihedral_atoms[d]),
                    gather(u, tb.dihedral_atoms[d]),
                    term.improper ? DihedralKind::improper : DihedralKind::proper, box);
                g = t.gradient;
                e0 = t.v_start;
                e1 = t.v_end;
            } catch (const DegenerateGeometry& e) {
                throw DegenerateGeometry(describe("dihedral", tb.dihedrals[d], term.atoms) + ": " +
                                         e.what());
            }
        } else if (kind == Kind::gradient) {
            const auto pos = unwrap_term(gather(x, tb.dihedral_atoms[d]), box);
            g = dihedral_grad_distance_form(pos, params);
            e0 = dihedral_energy(pos, params);
        }
        for (int k = 0; k < 4; ++k) w.values[entry + k] = g[k];
        w.v_start[slot] = e0;
        w.v_end[slot] = e1;
        if (energies) ++audit_.dihedrals[tb.dihedrals[d]];
    }
}

void Engine::evaluate(Kind kind, const DGScheme& scheme) {
    if (kind == Kind::jacobian_full &&
        (!model_.topology.angles.empty() || !model_.topology.dihedrals.empty()))
        throw ConfigError("the full Newton Jacobian is only available for pairwise models");
    if (kind == Kind::dg || kind == Kind::gradient) {
        std::fill(audit_.bonds.begin(), audit_.bonds.end(), 0);
        std::fill(audit_.angles.begin(), audit_.angles.end(), 0);
        std::fill(audit_.dihedrals.begin(), audit_.dihedrals.end(), 0);
    }
    for (int r = 0; r < rank_count_; ++r) evaluate_rank(r, kind, scheme);

    // Contributions for ghosts go back to their owners.
    for (int r = 0; r < rank_count_; ++r) {
        const auto& w = ranks_[r];
        for (int d = 0; d < rank_count_; ++d) {
            if (d == r) continue;
            std::vector<Vec3> vals;
            vals.reserve(w.remote[d].size());
            for (auto k : w.remote[d]) vals.push_back(w.values[k]);
            fabric_.send(r, d, tag_contrib, encode_vectors(vals));
        }
        if (kind == Kind::dg || kind == Kind::gradient) {
            std::vector<Vec3> e(w.v_start.size());
            for (std::size_t k = 0; k < e.size(); ++k) e[k] = {w.v_start[k], w.v_end[k], 0.0};
            fabric_.send(r, 0, tag_energy, encode_vectors(e));
        }
    }
    for (int d = 0; d < rank_count_; ++d) {
        auto& w = ranks_[d];
        for (int r = 0; r < rank_count_; ++r) {
            if (r == d) continue;
            const auto vals = decode_vectors(fabric_.receive(d, r, tag_contrib));
            std::copy(vals.begin(), vals.end(), w.incoming.begin() + (w.incoming_begin[r] - w.entries));
        }
    }
}

void Engine::reduce(std::vector<Vec3>& out) {
    out.assign(particle_count_, Vec3{});
    for (int r = 0; r < rank_count_; ++r) {
        const auto& w = ranks_[r];
        const auto& s = stores_[r];
        const auto n_owned = static_cast<std::ptrdiff_t>(s.n_owned);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t k = 0; k < n_owned; ++k) {
            Vec3 acc{};
            for (auto m = w.offsets[k]; m < w.offsets[k + 1]; ++m) {
                const auto src = w.sources[m];
                acc += src < w.entries ? w.values[src] : w.incoming[src - w.entries];
            }
            out[s.gid[k]] = acc;
        }
    }
}

std::pair<double, double> Engine::reduce_energy() {
    std::vector<std::vector<Vec3>> per_rank(rank_count_);
    for (int r = 0; r < rank_count_; ++r) per_rank[r] = decode_vectors(fabric_.receive(0, r, tag_energy));
    double v0 = 0.0, v1 = 0.0;
    for (const auto& [r, slot] : energy_order_) {
        v0 += per_rank[r][slot].x;
        v1 += per_rank[r][slot].y;
    }
    return {v0, v1};
}

DGEvaluation Engine::discrete_gradient(std::span<const Vec3> q_n, std::span<const Vec3> u,
                                       const DGScheme& scheme) {
    (void)q_n; // the prepared positions
    load_owned(trial_, u);
    evaluate(Kind::dg, scheme);
    DGEvaluation out;
    reduce(out.gradient);
    std::tie(out.potential_at_q, out.potential_at_qprime) = reduce_energy();
    return out;
}

GradientEvaluation Engine::gradient(std::span<const Vec3> x) {
    load_owned(aux_, x);
    evaluate(Kind::gradient, {});
    GradientEvaluation out;
    reduce(out.gradient);
    out.potential = reduce_energy().first;
    return out;
}

VecField Engine::jacobian_apply(JacobianMode mode, std::span<const Vec3> q_n,
                                std::span<const Vec3> u, std::span<const Vec3> v, double tau) {
    (void)q_n;
    if (!owned_equal(trial_, u)) load_owned(trial_, u);
    load_owned(dir_, v);
    evaluate(mode == JacobianMode::full ? Kind::jacobian_full : Kind::hessian, {});
    VecField dv;
    reduce(dv);
    const double factor = mode == JacobianMode::full ? 0.5 * tau * tau : 0.25 * tau * tau;
    const auto& mass = model_.attributes.mass;
    VecField out(v.begin(), v.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += (factor / mass[i]) * dv[i];
    return out;
}

void Engine::accept(ParticleSystem& sys, std::span<const Vec3> q_old) {
    check_displacement_and_wrap(sys, q_old, model_.box, model_.forcefield.cutoff());
}

std::vector<PairIndex> Engine::evaluated_pairs() const {
    std::vector<PairIndex> out;
    for (const auto& w : ranks_)
        for (const auto& p : w.pairs)
            out.push_back({static_cast<std::uint32_t>(p.gid_i), static_cast<std::uint32_t>(p.gid_j)});
    std::sort(out.begin(), out.end(), pair_less);
    return out;
}

} // namespace dgmd
