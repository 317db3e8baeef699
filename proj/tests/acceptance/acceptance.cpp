// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and exits nonzero if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dgmd/core/errors.hpp"
#include "dgmd/dgrad/assembly.hpp"
#include "dgmd/dgrad/terms.hpp"
#include "dgmd/integrators/convergence.hpp"
#include "dgmd/integrators/integrators.hpp"
#include "dgmd/io/config.hpp"
#include "dgmd/spatial/cells.hpp"
#include "dgmd/spatial/engine.hpp"
#include "dgmd/spatial/reference_forces.hpp"
#include "support.hpp"

using namespace dgmd;
namespace ts = dgmd::testing;

namespace {

const std::filesystem::path configs{DGMD_CONFIG_DIR};
const DGVariant variants[] = {DGVariant::left, DGVariant::right, DGVariant::symmetric};

struct Outcome {
    bool pass = true;
    std::string detail;
    void require(bool ok, const std::string& what) {
        pass = pass && ok;
        if (!detail.empty()) detail += "; ";
        detail += what + (ok ? "" : " [over limit]");
    }
};

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", x);
    return buf;
}

std::string fixed(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", x);
    return buf;
}

double relative_energy_deviation(const std::vector<DiagnosticsRecord>& recs) {
    double dev = 0.0;
    for (const auto& r : recs) dev = std::max(dev, std::abs(r.total_energy - recs.front().total_energy));
    return dev / std::abs(recs.front().total_energy);
}

std::unique_ptr<Experiment> load(const char* name) { return load_experiment(configs / name); }

std::vector<DiagnosticsRecord> run_reference(Experiment& e, RunConfig cfg) {
    ReferenceForces forces(e.model());
    return run_simulation(e.system, cfg, forces);
}

double fd_relative(double fd, double exact) { return std::abs(fd - exact) / std::max(1.0, std::abs(exact)); }

const LJParams lj = LJParams::plain(1.0, 5.0);
const BondParams water_bond{450.0, 0.957};
const AngleParams water_angle = AngleParams::from_degrees(55.0, 104.52);
const TorsionParams butane_torsion = TorsionParams::butane(8.31451);

auto lj_fn = [](double r) { return lj_eval(r, lj); };
auto bond_fn = [](double r) { return bond_eval(r, water_bond); };

std::pair<Vec3, Vec3> random_pair(std::mt19937_64& rng, double r_lo, double r_hi) {
    std::uniform_real_distribution<double> len(r_lo, r_hi);
    for (;;) {
        const Vec3 a = ts::random_vec(rng, 0, 3);
        Vec3 d = ts::random_vec(rng, -1, 1);
        if (norm(d) < 0.1) continue;
        return {a, a + (len(rng) / norm(d)) * d};
    }
}

template <class F>
double pair_defect(const F& fn, const Vec3& qi, const Vec3& qj, const Vec3& qip, const Vec3& qjp) {
    const PairDG g = pairwise_dg(fn, qi, qj, qip, qjp, Box::free());
    const double s = dot(g.g_i, qip - qi) + dot(g.g_j, qjp - qj);
    return std::abs(s - (g.v_end - g.v_start)) / (1 + std::abs(g.v_start) + std::abs(g.v_end));
}

Outcome dg_property() {
    Outcome out;
    std::mt19937_64 rng(101);
    const int n = 1000;
    double lj_worst = 0, bond_worst = 0;
    for (int t = 0; t < n; ++t) {
        auto [qi, qj] = random_pair(rng, 0.85, 2.5);
        const Vec3 qip = qi + ts::random_vec(rng, -0.1, 0.1), qjp = qj + ts::random_vec(rng, -0.1, 0.1);
        lj_worst = std::max(lj_worst, pair_defect(lj_fn, qi, qj, qip, qjp));
        auto [bi, bj] = random_pair(rng, 0.7, 1.2);
        const Vec3 bip = bi + ts::random_vec(rng, -0.1, 0.1), bjp = bj + ts::random_vec(rng, -0.1, 0.1);
        bond_worst = std::max(bond_worst, pair_defect(bond_fn, bi, bj, bip, bjp));
    }
    out.require(lj_worst <= 1e-11, "pair LJ " + sci(lj_worst));
    out.require(bond_worst <= 1e-11, "pair harmonic " + sci(bond_worst));

    for (auto v : variants) {
        double worst = 0;
        for (int t = 0; t < n; ++t) {
            const auto q = ts::random_angle(rng);
            const auto qp = ts::perturb(q, rng, 0.1);
            const auto g = angle_dg(v, water_angle, q, qp, Box::free());
            worst = std::max(worst, std::abs(ts::pairing(g.gradient, q, qp) - (g.v_end - g.v_start)) /
                                        (1 + std::abs(g.v_start) + std::abs(g.v_end)));
        }
        out.require(worst <= 1e-11, "angle " + std::string(to_string(v)) + " " + sci(worst));
    }
    for (auto v : variants) {
        double worst = 0;
        for (int t = 0; t < n; ++t) {
            const auto q = ts::random_dihedral(rng);
            const auto qp = ts::perturb(q, rng, 0.05);
            const auto g = dihedral_dg(v, butane_torsion, q, qp, DihedralKind::proper, Box::free());
            worst = std::max(worst, std::abs(ts::pairing(g.gradient, q, qp) - (g.v_end - g.v_start)) /
                                        (1 + std::abs(g.v_start) + std::abs(g.v_end)));
        }
        out.require(worst <= 1e-11, "dihedral " + std::string(to_string(v)) + " " + sci(worst));
    }
    return out;
}

Outcome consistency() {
    Outcome out;
    std::mt19937_64 rng(103);
    const int n = 200;

    // discrete gradients at q' = q against the analytic gradients
    double pair_gap = 0, angle_gap = 0, dihedral_gap = 0;
    for (int t = 0; t < n; ++t) {
        auto [qi, qj] = random_pair(rng, 0.85, 2.5);
        const Vec3 d = qj - qi;
        for (const auto& fn : {std::function<Radial(double)>(lj_fn), std::function<Radial(double)>(bond_fn)}) {
            const PairDG g = pairwise_dg(fn, qi, qj, qi, qj, Box::free());
            const Vec3 exact = (fn(norm(d)).d1 / norm(d)) * d;
            pair_gap = std::max(pair_gap, ts::max_abs_diff(g.g_j, exact) / (1 + norm(exact)));
        }
        const auto qa = ts::random_angle(rng);
        const auto ga = angle_grad_distance_form(qa, water_angle);
        const auto qd = ts::random_dihedral(rng);
        const auto gd = dihedral_grad_distance_form(qd, butane_torsion);
        for (auto v : variants) {
            const auto a = angle_dg(v, water_angle, qa, qa, Box::free());
            for (int k = 0; k < 3; ++k)
                angle_gap = std::max(angle_gap, ts::max_abs_diff(a.gradient[k], ga[k]) / (1 + norm(ga[k])));
            const auto b = dihedral_dg(v, butane_torsion, qd, qd, DihedralKind::proper, Box::free());
            for (int k = 0; k < 4; ++k)
                dihedral_gap = std::max(dihedral_gap, ts::max_abs_diff(b.gradient[k], gd[k]) / (1 + norm(gd[k])));
        }
    }
    out.require(pair_gap <= 1e-10, "pair DG(q,q) " + sci(pair_gap));
    out.require(angle_gap <= 1e-10, "angle DG(q,q) " + sci(angle_gap));
    out.require(dihedral_gap <= 1e-10, "dihedral DG(q,q) " + sci(dihedral_gap));

    // analytic gradients against central differences
    double fd_worst = 0;
    const double h = 1e-6;
    for (int t = 0; t < n; ++t) {
        std::uniform_real_distribution<double> r(0.85, 2.5);
        const double x = r(rng);
        for (const auto& fn : {std::function<Radial(double)>(lj_fn), std::function<Radial(double)>(bond_fn)})
            fd_worst = std::max(fd_worst, fd_relative((fn(x + h).v - fn(x - h).v) / (2 * h), fn(x).d1));

        const auto qa = ts::random_angle(rng);
        const auto ga = angle_grad_distance_form(qa, water_angle);
        const auto qd = ts::random_dihedral(rng);
        const auto gd = dihedral_grad_distance_form(qd, butane_torsion);
        for (int k = 0; k < 4; ++k)
            for (int a = 0; a < 3; ++a) {
                if (k < 3) {
                    auto up = qa, down = qa;
                    up[k][a] += h;
                    down[k][a] -= h;
                    const double fd = (angle_energy(up, water_angle) - angle_energy(down, water_angle)) / (2 * h);
                    fd_worst = std::max(fd_worst, fd_relative(fd, ga[k][a]));
                }
                auto up = qd, down = qd;
                up[k][a] += h;
                down[k][a] -= h;
                const double fd = (dihedral_energy(up, butane_torsion) - dihedral_energy(down, butane_torsion)) / (2 * h);
                fd_worst = std::max(fd_worst, fd_relative(fd, gd[k][a]));
            }
    }

    // assembled systems: consistency and central differences of the total potential
    for (const char* name : {"water.toml", "butane.toml"}) {
        const auto e = load(name);
        const Model m = e->model();
        const auto pairs = all_pairs(e->system.size());
        const auto& q = e->system.q;
        const auto exact = assemble_gradient(m, q, pairs);
        double sys_gap = 0;
        for (auto v : variants) {
            const auto dg = assemble_system_dg(m, q, q, pairs, DGScheme{v, v});
            for (std::size_t i = 0; i < q.size(); ++i)
                sys_gap = std::max(sys_gap, ts::max_abs_diff(dg.gradient[i], exact.gradient[i]) /
                                                (1 + norm(exact.gradient[i])));
        }
        out.require(sys_gap <= 1e-10, std::string(name) + " DG(q,q) " + sci(sys_gap));
        for (std::size_t i = 0; i < q.size(); ++i)
            for (int a = 0; a < 3; ++a) {
                auto up = q, down = q;
                up[i][a] += h;
                down[i][a] -= h;
                const double fd = (assemble_gradient(m, up, pairs).potential -
                                   assemble_gradient(m, down, pairs).potential) / (2 * h);
                fd_worst = std::max(fd_worst, fd_relative(fd, exact.gradient[i][a]));
            }
    }
    out.require(fd_worst <= 1e-6, "gradient vs central differences " + sci(fd_worst));
    return out;
}

Outcome distance_lemmas() {
    Outcome out;
    std::mt19937_64 rng(107);
    double angle_worst = 0, dihedral_worst = 0;
    for (int t = 0; t < 1000; ++t) {
        const auto a = ts::random_angle(rng);
        const Vec3 u = a[0] - a[1], w = a[2] - a[1];
        const double oracle = dot(u, w) / (norm(u) * norm(w));
        angle_worst = std::max(angle_worst,
                               std::abs(cos_angle_from_distances(norm(u), norm(w), norm(a[2] - a[0])) - oracle));

        const auto d = ts::random_dihedral(rng);
        const auto r = [&](int i, int j) { return norm(d[j] - d[i]); };
        const double c = cos_dihedral_from_distances(r(0, 1), r(1, 2), r(2, 3), r(0, 2), r(1, 3), r(0, 3));
        dihedral_worst = std::max(dihedral_worst, std::abs(c - ts::cos_dihedral_cross(d)));
    }
    out.require(angle_worst <= 1e-12, "cos angle " + sci(angle_worst));
    out.require(dihedral_worst <= 1e-12, "cos dihedral " + sci(dihedral_worst));
    return out;
}

Outcome two_particles() {
    Outcome out;
    double dev[3]{};
    double p_worst = 0, l_worst = 0;
    int k = 0;
    for (auto method : {Method::velocity_dg, Method::verlet, Method::implicit_midpoint}) {
        auto e = load("two_lj.toml");
        RunConfig cfg = e->run;
        cfg.integrator.method = method;
        cfg.trajectory_interval = 0;
        const auto recs = run_reference(*e, cfg);
        dev[k++] = relative_energy_deviation(recs);
        for (const auto& r : recs) {
            p_worst = std::max(p_worst, norm(r.linear_momentum));
            l_worst = std::max(l_worst, norm(r.angular_momentum - recs.front().angular_momentum));
        }
    }
    out.require(dev[0] <= 1e-10, "DG energy deviation " + sci(dev[0]));
    out.require(dev[1] > 10 * dev[0], "Verlet " + sci(dev[1]));
    out.require(dev[2] > 10 * dev[0], "midpoint " + sci(dev[2]));
    out.require(p_worst <= 1e-13, "|P| " + sci(p_worst));
    out.require(l_worst <= 1e-12, "|L - L0| " + sci(l_worst));
    return out;
}

ConvergenceResult study(Experiment& e, Method method, DGScheme scheme, std::vector<double> taus, double t_max) {
    RunConfig base = e.run;
    base.integrator = {method, scheme};
    base.trajectory_interval = 0;
    base.diagnostics_interval = 1 << 30;
    const Experiment& ex = e;
    return convergence_study(ex.system, ex.box, [&] { return make_forces(ex, 1); }, base, taus, t_max,
                             ex.convergence.reference_divisor);
}

Outcome orders(std::string& info) {
    Outcome out;
    auto two = load("two_lj.toml");
    const std::vector<double> pinned{0.02, 0.01, 0.005, 0.0025};
    const std::vector<double> fine{0.0025, 0.00125, 0.000625, 0.0003125};
    info = "two-LJ slopes on tau 0.0025..0.0003125:";
    for (auto method : {Method::velocity_dg, Method::verlet, Method::implicit_midpoint}) {
        const double order = study(*two, method, {}, pinned, 10.0).order;
        out.require(std::abs(order - 2.0) <= 0.2, "two-LJ " + to_string(method) + " " + fixed(order));
        info += " " + to_string(method) + " " + fixed(study(*two, method, {}, fine, 10.0).order);
    }

    auto water = load("water.toml");
    const auto& taus = water->convergence.taus;
    const double left = study(*water, Method::velocity_dg, {DGVariant::left, DGVariant::left}, taus, 10.0).order;
    out.require(std::abs(left - 1.0) <= 0.25, "water left " + fixed(left));
    const double sym = study(*water, Method::velocity_dg, {}, taus, 10.0).order;
    out.require(std::abs(sym - 2.0) <= 0.2, "water symmetric " + fixed(sym));
    return out;
}

Outcome butane() {
    Outcome out;
    auto e = load("butane.toml");
    RunConfig cfg = e->run;
    cfg.trajectory_interval = 0;
    const double dev = relative_energy_deviation(run_reference(*e, cfg));
    out.require(dev <= 1e-9, "energy deviation " + sci(dev) + " over " + std::to_string(cfg.steps) + " steps");

    auto fresh = load("butane.toml");
    const double order = study(*fresh, Method::velocity_dg, {}, fresh->convergence.taus, fresh->convergence.t_max).order;
    out.require(std::abs(order - 2.0) <= 0.2, "symmetric order " + fixed(order));
    return out;
}

Outcome collision() {
    Outcome out;
    auto e = load("collision_small.toml");
    RunConfig cfg = e->run;
    cfg.diagnostics_interval = 1;
    cfg.trajectory_interval = 0;
    const double dev = relative_energy_deviation(run_reference(*e, cfg));
    out.require(cfg.steps == 2000 && e->system.size() == 1280,
                std::to_string(e->system.size()) + " particles, " + std::to_string(cfg.steps) + " steps");
    out.require(dev <= 1e-8, "energy deviation " + sci(dev));
    return out;
}

Outcome pair_completeness() {
    Outcome out;
    std::mt19937_64 rng(109);
    std::uniform_int_distribution<int> count(2, 500);
    std::uniform_real_distribution<double> cut(0.8, 3.0), extent(4.0, 16.0), unit(0.0, 1.0);
    std::size_t mismatched = 0, total_pairs = 0;
    for (int t = 0; t < 100; ++t) {
        const int n = count(rng);
        const double r_cut = cut(rng);
        const Bounds b{{0, 0, 0}, {std::max(r_cut, extent(rng)), std::max(r_cut, extent(rng)), std::max(r_cut, extent(rng))}};
        std::vector<Vec3> q, trial;
        for (int i = 0; i < n; ++i) {
            const Vec3 e = b.extent();
            q.push_back({unit(rng) * e.x, unit(rng) * e.y, unit(rng) * e.z});
            Vec3 d = ts::random_vec(rng, -1, 1);
            d = (0.4999 * r_cut * unit(rng) / std::max(norm(d), 1e-12)) * d;
            trial.push_back(q.back() + d);
        }
        const auto close = [&](std::uint32_t i, std::uint32_t j) {
            return std::min(norm(q[j] - q[i]), norm(trial[j] - trial[i])) <= r_cut;
        };
        std::set<std::pair<std::uint32_t, std::uint32_t>> brute, found;
        for (std::uint32_t i = 0; i < q.size(); ++i)
            for (std::uint32_t j = i + 1; j < q.size(); ++j)
                if (close(i, j)) brute.emplace(i, j);
        for (const auto& p : candidate_pairs(build_cells(q, b, r_cut), 2)) {
            const auto i = std::min(p.i, p.j), j = std::max(p.i, p.j);
            if (close(i, j)) found.emplace(i, j);
        }
        total_pairs += brute.size();
        if (found != brute) ++mismatched;
    }
    out.require(mismatched == 0, std::to_string(mismatched) + " of 100 systems differ (" +
                                     std::to_string(total_pairs) + " pairs in range)");
    return out;
}

Outcome serial_parallel() {
    Outcome out;
    for (const char* name : {"collision_small.toml", "butane_box.toml"}) {
        std::vector<DiagnosticsRecord> recs[2];
        std::vector<Vec3> final_q[2];
        bool audit_ok = true;
        std::size_t terms = 0;
        Box box;
        for (int k = 0; k < 2; ++k) {
            auto e = load(name);
            box = e->box;
            Engine engine(e->model(), k == 0 ? 1 : 4);
            RunConfig cfg = e->run;
            cfg.steps = 500;
            cfg.diagnostics_interval = 1;
            cfg.trajectory_interval = 1;
            terms = e->topology.term_count();
            recs[k] = run_simulation(e->system, cfg, engine, [&](long n, double, const ParticleSystem&) {
                if (n == 0) return;
                const auto& a = engine.audit();
                for (const auto* counts : {&a.bonds, &a.angles, &a.dihedrals})
                    for (int c : *counts) audit_ok = audit_ok && c == 1;
                audit_ok = audit_ok && a.bonds.size() + a.angles.size() + a.dihedrals.size() == terms;
            });
            final_q[k] = e->system.q;
        }
        double energy_gap = 0, position_gap = 0;
        for (std::size_t i = 0; i < recs[0].size(); ++i)
            energy_gap = std::max(energy_gap, std::abs(recs[0][i].total_energy - recs[1][i].total_energy));
        for (std::size_t i = 0; i < final_q[0].size(); ++i)
            position_gap = std::max(position_gap, norm(minimum_image(final_q[1][i] - final_q[0][i], box)));
        const std::string label = std::filesystem::path(name).stem().string();
        out.require(recs[0].size() == 501 && energy_gap <= 1e-12, label + " energy gap " + sci(energy_gap));
        out.require(position_gap <= 1e-10, label + " position gap " + sci(position_gap));
        out.require(audit_ok, label + " audit over " + std::to_string(terms) + " terms");
    }
    return out;
}

Outcome reversibility() {
    Outcome out;
    auto e = load("water.toml");
    const auto q0 = e->system.q, p0 = e->system.p;
    RunConfig cfg = e->run;
    cfg.steps = 200;
    cfg.trajectory_interval = 0;
    cfg.integrator.scheme = {};
    run_reference(*e, cfg);
    for (auto& p : e->system.p) p = -p;
    run_reference(*e, cfg);
    for (auto& p : e->system.p) p = -p;
    double gap = 0;
    for (std::size_t i = 0; i < q0.size(); ++i)
        gap = std::max({gap, ts::max_abs_diff(e->system.q[i], q0[i]), ts::max_abs_diff(e->system.p[i], p0[i])});
    out.require(gap <= 1e-8, "max |(q,p) - (q0,p0)| " + sci(gap));
    return out;
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> check;
    };
    std::string order_info;
    const std::vector<Criterion> criteria{
        {"discrete gradient property", dg_property},
        {"consistency and gradient oracle", consistency},
        {"distance representation lemmas", distance_lemmas},
        {"two Lennard-Jones particles", two_particles},
        {"convergence orders", [&] { return orders(order_info); }},
        {"butane", butane},
        {"desk-scale collision", collision},
        {"pair completeness", pair_completeness},
        {"serial/parallel equivalence", serial_parallel},
        {"reversibility", reversibility},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].check();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %2zu %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                    o.detail.c_str(), secs);
        if (i == 4 && !order_info.empty()) std::printf("INFO    %s\n", order_info.c_str());
        std::fflush(stdout);
        failures += !o.pass;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
