#include "dgmd/dgrad/assembly.hpp"

#include <algorithm>
#include <string>

#include "dgmd/core/errors.hpp"
#include "dgmd/dgrad/terms.hpp"

namespace dgmd {

std::vector<PairIndex> all_pairs(std::size_t n) {
    std::vector<PairIndex> pairs;
    pairs.reserve(n * (n > 0 ? n - 1 : 0) / 2);
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j) pairs.push_back({i, j});
    return pairs;
}

namespace {

template <std::size_t N>
std::string describe(const char* kind, std::size_t index, const std::array<ParticleId, N>& atoms) {
    std::string s = std::string(kind) + " term #" + std::to_string(index) + " (atoms";
    for (auto a : atoms) s += " " + std::to_string(a);
    return s + ")";
}

template <std::size_t N>
std::array<Vec3, N> gather(std::span<const Vec3> q, const std::array<ParticleId, N>& atoms) {
    std::array<Vec3, N> out{};
    for (std::size_t k = 0; k < N; ++k) out[k] = q[atoms[k]];
    return out;
}

bool pair_active(const Model& m, const PairIndex& pr) {
    const auto& a = m.attributes;
    return m.forcefield.lj_enabled && !m.forcefield.pair_excluded(a.molecule[pr.i], a.molecule[pr.j]);
}

auto lj_fn(const LJParams& p) {
    return [&p](double r) { return lj_eval(r, p); };
}

auto bond_fn(const BondParams& p) {
    return [&p](double r) { return bond_eval(r, p); };
}

} // namespace

DGEvaluation assemble_system_dg(const Model& model, std::span<const Vec3> q,
                                std::span<const Vec3> q_prime, std::span<const PairIndex> pairs,
                                const DGScheme& scheme) {
    const auto& ff = model.forcefield;
    const auto& topo = model.topology;
    const auto& box = model.box;
    DGEvaluation out;
    out.gradient.assign(q.size(), Vec3{});
    auto& g = out.gradient;

    const double cutoff = ff.cutoff();
    for (const auto& pr : pairs) {
        if (!pair_active(model, pr)) continue;
        const Vec3 d = minimum_image(q[pr.j] - q[pr.i], box);
        const Vec3 dp = minimum_image(q_prime[pr.j] - q_prime[pr.i], box);
        if (std::min(norm(d), norm(dp)) >= cutoff) continue;
        const auto& params = ff.pair(model.attributes.species[pr.i], model.attributes.species[pr.j]);
        const PairDG t = pair_dg_from_separation(lj_fn(params), d, dp);
        g[pr.i] += t.g_i;
        g[pr.j] += t.g_j;
        out.potential_at_q += t.v_start;
        out.potential_at_qprime += t.v_end;
    }

    for (std::size_t b = 0; b < topo.bonds.size(); ++b) {
        const auto& term = topo.bonds[b];
        const auto [i, j] = term.atoms;
        try {
            const PairDG t = pairwise_dg(bond_fn(ff.bond_types[term.type]), q[i], q[j], q_prime[i],
                                         q_prime[j], box);
            g[i] += t.g_i;
            g[j] += t.g_j;
            out.potential_at_q += t.v_start;
            out.potential_at_qprime += t.v_end;
        } catch (const DegenerateGeometry& e) {
            throw DegenerateGeometry(describe("bond", b, term.atoms) + ": " + e.what());
        }
    }

    for (std::size_t a = 0; a < topo.angles.size(); ++a) {
        const auto& term = topo.angles[a];
        try {
            const auto t = angle_dg(scheme.angle, ff.angle_types[term.type], gather(q, term.atoms),
                                    gather(q_prime, term.atoms), box);
            for (std::size_t k = 0; k < 3; ++k) g[term.atoms[k]] += t.gradient[k];
            out.potential_at_q += t.v_start;
            out.potential_at_qprime += t.v_end;
        } catch (const DegenerateGeometry& e) {
            throw DegenerateGeometry(describe("angle", a, term.atoms) + ": " + e.what());
        }
    }

    for (std::size_t d = 0; d < topo.dihedrals.size(); ++d) {
        const auto& term = topo.dihedrals[d];
        try {
            const auto t = dihedral_dg(scheme.dihedral, ff.torsion_types[term.type],
                                       gather(q, term.atoms), gather(q_prime, term.atoms),
                                       term.improper ? DihedralKind::improper : DihedralKind::proper,
                                       box);
            for (std::size_t k = 0; k < 4; ++k) g[term.atoms[k]] += t.gradient[k];
            out.potential_at_q += t.v_start;
            out.potential_at_qprime += t.v_end;
        } catch (const DegenerateGeometry& e) {
            throw DegenerateGeometry(describe("dihedral", d, term.atoms) + ": " + e.what());
        }
    }
    return out;
}

GradientEvaluation assemble_gradient(const Model& model, std::span<const Vec3> q,
                                     std::span<const PairIndex> pairs) {
    const auto& ff = model.forcefield;
    const auto& topo = model.topology;
    const auto& box = model.box;
    GradientEvaluation out;
    out.gradient.assign(q.size(), Vec3{});
    auto& g = out.gradient;

    const double cutoff = ff.cutoff();
    for (const auto& pr : pairs) {
        if (!pair_active(model, pr)) continue;
        const Vec3 d = minimum_image(q[pr.j] - q[pr.i], box);
        const double r = norm(d);
        if (r >= cutoff) continue;
        if (!(r > 0.0)) throw DegenerateGeometry("coincident particles in a pair interaction");
        const Radial f =
            lj_eval(r, ff.pair(model.attributes.species[pr.i], model.attributes.species[pr.j]));
        const Vec3 t = (f.d1 / r) * d;
        g[pr.i] -= t;
        g[pr.j] += t;
        out.potential += f.v;
    }
    for (const auto& term : topo.bonds) {
        const auto [i, j] = term.atoms;
        const Vec3 d = minimum_image(q[j] - q[i], box);
        const double r = norm(d);
        if (!(r > 0.0)) throw DegenerateGeometry("bond with coincident atoms");
        const Radial f = bond_eval(r, ff.bond_types[term.type]);
        const Vec3 t = (f.d1 / r) * d;
        g[i] -= t;
        g[j] += t;
        out.potential += f.v;
    }
    for (const auto& term : topo.angles) {
        const auto pos = unwrap_term(gather(q, term.atoms), box);
        const auto& params = ff.angle_types[term.type];
        const auto t = angle_grad_distance_form(pos, params);
        for (std::size_t k = 0; k < 3; ++k) g[term.atoms[k]] += t[k];
        out.potential += angle_energy(pos, params);
    }
    for (const auto& term : topo.dihedrals) {
        const auto pos = unwrap_term(gather(q, term.atoms), box);
        const auto& params = ff.torsion_types[term.type];
        const auto t = dihedral_grad_distance_form(pos, params);
        for (std::size_t k = 0; k < 4; ++k) g[term.atoms[k]] += t[k];
        out.potential += dihedral_energy(pos, params);
    }
    return out;
}

std::vector<Vec3> dg_derivative_apply(const Model& model, std::span<const Vec3> q_n,
                                      std::span<const Vec3> u, std::span<const Vec3> v,
                                      std::span<const PairIndex> pairs) {
    const auto& ff = model.forcefield;
    const auto& topo = model.topology;
    const auto& box = model.box;
    if (!topo.angles.empty() || !topo.dihedrals.empty())
        throw ConfigError("the full Newton Jacobian is only available for pairwise models");

    std::vector<Vec3> out(u.size(), Vec3{});
    const double cutoff = ff.cutoff();
    for (const auto& pr : pairs) {
        if (!pair_active(model, pr)) continue;
        const Vec3 d = minimum_image(q_n[pr.j] - q_n[pr.i], box);
        const Vec3 dp = minimum_image(u[pr.j] - u[pr.i], box);
        if (std::min(norm(d), norm(dp)) >= cutoff) continue;
        const auto& params = ff.pair(model.attributes.species[pr.i], model.attributes.species[pr.j]);
        const Vec3 t = pair_dg_jacobian_apply(lj_fn(params), d, dp, v[pr.j] - v[pr.i]);
        out[pr.i] -= t;
        out[pr.j] += t;
    }
    for (const auto& term : topo.bonds) {
        const auto [i, j] = term.atoms;
        const Vec3 d = minimum_image(q_n[j] - q_n[i], box);
        const Vec3 dp = minimum_image(u[j] - u[i], box);
        const Vec3 t = pair_dg_jacobian_apply(bond_fn(ff.bond_types[term.type]), d, dp, v[j] - v[i]);
        out[i] -= t;
        out[j] += t;
    }
    return out;
}

std::vector<Vec3> hessian_apply(const Model& model, std::span<const Vec3> x,
                                std::span<const Vec3> v, std::span<const PairIndex> pairs) {
    const auto& ff = model.forcefield;
    const auto& box = model.box;
    std::vector<Vec3> out(x.size(), Vec3{});
    const double cutoff = ff.cutoff();
    for (const auto& pr : pairs) {
        if (!pair_active(model, pr)) continue;
        const Vec3 d = minimum_image(x[pr.j] - x[pr.i], box);
        if (norm(d) >= cutoff) continue;
        const auto& params = ff.pair(model.attributes.species[pr.i], model.attributes.species[pr.j]);
        const Vec3 t = pair_hessian_apply(lj_fn(params), d, v[pr.j] - v[pr.i]);
        out[pr.i] -= t;
        out[pr.j] += t;
    }
    for (const auto& term : model.topology.bonds) {
        const auto [i, j] = term.atoms;
        const Vec3 d = minimum_image(x[j] - x[i], box);
        const Vec3 t = pair_hessian_apply(bond_fn(ff.bond_types[term.type]), d, v[j] - v[i]);
        out[i] -= t;
        out[j] += t;
    }
    return out;
}

std::vector<Vec3> dg_jacobian_vector(JacobianMode mode, const Model& model,
                                     std::span<const Vec3> q_n, std::span<const Vec3> u,
                                     std::span<const Vec3> v, double tau,
                                     std::span<const PairIndex> pairs) {
    const auto& mass = model.attributes.mass;
    std::vector<Vec3> dv;
    double factor;
    if (mode == JacobianMode::full) {
        dv = dg_derivative_apply(model, q_n, u, v, pairs);
        factor = 0.5 * tau * tau;
    } else {
        std::vector<Vec3> mid(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) mid[i] = 0.5 * (u[i] + q_n[i]);
        dv = hessian_apply(model, mid, v, pairs);
        factor = 0.25 * tau * tau;
    }
    std::vector<Vec3> out(v.begin(), v.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += (factor / mass[i]) * dv[i];
    return out;
}

} // namespace dgmd
