#include <doctest.h>

#include <cmath>
#include <random>

#include "dgmd/core/errors.hpp"
#include "dgmd/dgrad/assembly.hpp"
#include "dgmd/dgrad/generic.hpp"
#include "dgmd/dgrad/terms.hpp"
#include "dgmd/solver/newton.hpp"
#include "support.hpp"

using namespace dgmd;
using doctest::Approx;

namespace {

const DGVariant all_variants[] = {DGVariant::left, DGVariant::right, DGVariant::symmetric};

double defect_scale(double v0, double v1) { return 1e-11 * (1 + std::abs(v0) + std::abs(v1)); }

struct Square {
    Radial operator()(double r) const { return {r * r, 2 * r, 2}; }
};

struct Butanes {
    ParticleSystem sys;
    Topology topo;
    ForceField ff;
};

// Two united-atom butane chains with standard parameters, in free space.
Butanes two_butanes() {
    Butanes b;
    const Vec3 pos[8] = {{0.949003, 1.144251, 1.1}, {1, 1, 1},          {1.153, 1, 1},
                         {1.203997, 1.144251, 0.9}, {0.375077, 0.588336, 1}, {0.5, 0.5, 1},
                         {0.624923, 0.588336, 1},   {0.749846, 0.5, 1}};
    for (int i = 0; i < 8; ++i) {
        const bool end = i % 4 == 0 || i % 4 == 3;
        b.sys.add(pos[i], {}, end ? 15.035 : 14.027, end ? 0 : 1, 1 + i / 4);
    }
    for (ParticleId m : {0u, 4u}) {
        b.topo.bonds.push_back({{m, m + 1}});
        b.topo.bonds.push_back({{m + 1, m + 2}});
        b.topo.bonds.push_back({{m + 2, m + 3}});
        b.topo.angles.push_back({{m, m + 1, m + 2}});
        b.topo.angles.push_back({{m + 1, m + 2, m + 3}});
        b.topo.dihedrals.push_back({{m, m + 1, m + 2, m + 3}});
    }
    b.ff.species = {{"CH3", 15.035, 0.3923, 0.5986}, {"CH2", 14.027, 0.3923, 0.5986}};
    b.ff.bond_types = {{17500, 0.153}};
    b.ff.angle_types = {AngleParams::from_degrees(65, 109.47)};
    b.ff.torsion_types = {TorsionParams::butane(8.31451)};
    b.ff.finalize();
    return b;
}

std::vector<Vec3> jiggle(const std::vector<Vec3>& q, std::mt19937_64& rng, double h) {
    auto out = q;
    for (auto& x : out) x += testing::random_vec(rng, -h, h);
    return out;
}

} // namespace

TEST_CASE("variant names") {
    CHECK(parse_dg_variant("left") == DGVariant::left);
    CHECK(parse_dg_variant("right") == DGVariant::right);
    CHECK(parse_dg_variant("symmetric") == DGVariant::symmetric);
    CHECK(to_string(DGVariant::right) == "right");
    CHECK_THROWS_AS(parse_dg_variant("middle"), ConfigError);
}

TEST_CASE("midpoint discrete gradient") {
    // V = u^T A u / 2 with A = [[2, 1], [1, 3]]
    const ScalarField quad = [](std::span<const double> u) {
        return 0.5 * (2 * u[0] * u[0] + 2 * u[0] * u[1] + 3 * u[1] * u[1]);
    };
    const GradientField quad_grad = [](std::span<const double> u) {
        return std::vector<double>{2 * u[0] + u[1], u[0] + 3 * u[1]};
    };
    const std::vector<double> u{0.3, -1.2}, up{1.1, 0.4};
    const auto g = gonzalez_dg(quad, quad_grad, u, up);
    CHECK(g[0] == Approx((2 * 1.4 + -0.8) / 2));
    CHECK(g[1] == Approx((1.4 + 3 * -0.8) / 2));

    const auto same = gonzalez_dg(quad, quad_grad, u, u);
    CHECK(same == quad_grad(u));

    const ScalarField quartic = [](std::span<const double> u) { return std::pow(u[0], 4); };
    const GradientField quartic_grad = [](std::span<const double> u) {
        return std::vector<double>{4 * std::pow(u[0], 3)};
    };
    const std::vector<double> one{1.0}, two{2.0};
    CHECK(gonzalez_dg(quartic, quartic_grad, one, two)[0] == Approx(15.0).epsilon(1e-14));
}

TEST_CASE("coordinate increment discrete gradient") {
    const ScalarField prod = [](std::span<const double> u) { return u[0] * u[1]; };
    const GradientField prod_grad = [](std::span<const double> u) {
        return std::vector<double>{u[1], u[0]};
    };
    const std::vector<double> zero{0, 0}, ones{1, 1};
    CHECK(itoh_abe_dg(prod, prod_grad, zero, ones, DGVariant::left) == std::vector<double>{0, 1});
    CHECK(itoh_abe_dg(prod, prod_grad, zero, ones, DGVariant::right) == std::vector<double>{1, 0});
    CHECK(itoh_abe_dg(prod, prod_grad, zero, ones, DGVariant::symmetric) ==
          std::vector<double>{0.5, 0.5});

    const std::vector<double> u{0.7, -0.2};
    for (auto v : all_variants) {
        const auto g = itoh_abe_dg(prod, prod_grad, u, u, v);
        CHECK(g[0] == Approx(-0.2));
        CHECK(g[1] == Approx(0.7));
    }

    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> d(-2, 2);
    const ScalarField wavy = [](std::span<const double> x) {
        return std::sin(x[0]) * x[1] + std::exp(0.3 * x[2]) * x[0] + x[1] * x[1] * x[2];
    };
    const GradientField wavy_grad = [](std::span<const double> x) {
        return std::vector<double>{std::cos(x[0]) * x[1] + std::exp(0.3 * x[2]),
                                   std::sin(x[0]) + 2 * x[1] * x[2],
                                   0.3 * std::exp(0.3 * x[2]) * x[0] + x[1] * x[1]};
    };
    for (int t = 0; t < 200; ++t) {
        const std::vector<double> a{d(rng), d(rng), d(rng)}, b{d(rng), d(rng), d(rng)};
        for (auto v : all_variants) {
            const auto g = itoh_abe_dg(wavy, wavy_grad, a, b, v);
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += g[k] * (b[k] - a[k]);
            CHECK(std::abs(s - (wavy(b) - wavy(a))) <= defect_scale(wavy(a), wavy(b)));
        }
        const auto gz = gonzalez_dg(wavy, wavy_grad, a, b);
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += gz[k] * (b[k] - a[k]);
        CHECK(std::abs(s - (wavy(b) - wavy(a))) <= defect_scale(wavy(a), wavy(b)));
    }
}

TEST_CASE("pairwise discrete gradient") {
    const Square sq;
    const PairDG g = pairwise_dg(sq, {0, 0, 0}, {1, 0, 0}, {0, 0, 0}, {2, 0, 0}, Box::free());
    CHECK(g.g_j == Vec3{3, 0, 0});
    CHECK(g.g_i == Vec3{-3, 0, 0});
    CHECK(g.v_start == 1.0);
    CHECK(g.v_end == 4.0);

    const LJParams lj = LJParams::with_switch(1, 5, 2.5);
    const auto fn = [&](double r) { return lj_eval(r, lj); };
    std::mt19937_64 rng(29);
    for (int t = 0; t < 200; ++t) {
        const Vec3 qi = testing::random_vec(rng, 0, 2), qj = testing::random_vec(rng, 0, 2);
        if (norm(qj - qi) < 0.8) continue;
        const Vec3 qip = qi + testing::random_vec(rng, -0.1, 0.1);
        const Vec3 qjp = qj + testing::random_vec(rng, -0.1, 0.1);
        const PairDG a = pairwise_dg(fn, qi, qj, qip, qjp, Box::free());
        const PairDG b = pairwise_dg(fn, qip, qjp, qi, qj, Box::free());
        CHECK(a.g_j == b.g_j);
        CHECK(a.g_i == -a.g_j);

        const PairDG same = pairwise_dg(fn, qi, qj, qi, qj, Box::free());
        const Vec3 d = qj - qi;
        const Vec3 exact = (fn(norm(d)).d1 / norm(d)) * d;
        CHECK(testing::max_abs_diff(same.g_j, exact) <= 1e-10 * (1 + norm(exact)));
    }

    const Box box = Box::periodic(10, 10, 10);
    const PairDG wrapped = pairwise_dg(sq, {0.5, 0, 0}, {9.5, 0, 0}, {0.5, 0, 0}, {9.0, 0, 0}, box);
    CHECK(wrapped.v_start == Approx(1.0));
    CHECK(wrapped.v_end == Approx(2.25));
    CHECK_THROWS_AS(pairwise_dg(sq, {1, 1, 1}, {1, 1, 1}, {0, 0, 0}, {1, 0, 0}, Box::free()),
                    DegenerateGeometry);
}

TEST_CASE("angle discrete gradient") {
    const AngleParams water = AngleParams::from_degrees(55, 104.52);
    std::mt19937_64 rng(31);
    for (int t = 0; t < 300; ++t) {
        const auto q = testing::random_angle(rng);
        const auto qp = testing::perturb(q, rng, 0.1);
        for (auto v : all_variants) {
            const auto dg = angle_dg(v, water, q, qp, Box::free());
            const double s = testing::pairing(dg.gradient, q, qp);
            CHECK(std::abs(s - (dg.v_end - dg.v_start)) <= defect_scale(dg.v_start, dg.v_end));
            CHECK(dg.v_start == Approx(angle_energy(q, water)).epsilon(1e-12));

            const Vec3 sum = dg.gradient[0] + dg.gradient[1] + dg.gradient[2];
            CHECK(norm(sum) <= 1e-13 * (1 + norm(dg.gradient[0]) + norm(dg.gradient[2])));
            Vec3 torque{};
            for (int k = 0; k < 3; ++k) torque += cross(qp[k] + q[k], dg.gradient[k]);
            CHECK(norm(torque) <= 1e-12 * (1 + norm(dg.gradient[0]) + norm(dg.gradient[2])));

            const auto same = angle_dg(v, water, q, q, Box::free());
            const auto exact = angle_grad_distance_form(q, water);
            for (int k = 0; k < 3; ++k)
                CHECK(testing::max_abs_diff(same.gradient[k], exact[k]) <= 1e-10 * (1 + norm(exact[k])));
        }
        const auto fwd = angle_dg(DGVariant::symmetric, water, q, qp, Box::free());
        const auto rev = angle_dg(DGVariant::symmetric, water, qp, q, Box::free());
        CHECK(fwd.gradient == rev.gradient);
        const auto left = angle_dg(DGVariant::left, water, q, qp, Box::free());
        const auto right_swapped = angle_dg(DGVariant::right, water, qp, q, Box::free());
        CHECK(left.gradient == right_swapped.gradient);
    }
}

TEST_CASE("dihedral discrete gradient") {
    const TorsionParams butane = TorsionParams::butane(8.31451);
    std::mt19937_64 rng(37);
    for (int t = 0; t < 300; ++t) {
        const auto q = testing::random_dihedral(rng);
        const auto qp = testing::perturb(q, rng, 0.05);
        for (auto kind : {DihedralKind::proper, DihedralKind::improper}) {
            for (auto v : all_variants) {
                const auto dg = dihedral_dg(v, butane, q, qp, kind, Box::free());
                const double s = testing::pairing(dg.gradient, q, qp);
                CHECK(std::abs(s - (dg.v_end - dg.v_start)) <= defect_scale(dg.v_start, dg.v_end));

                double scale = 1.0;
                for (const auto& x : dg.gradient) scale += norm(x);
                Vec3 sum{}, torque{};
                for (int k = 0; k < 4; ++k) {
                    sum += dg.gradient[k];
                    torque += cross(qp[k] + q[k], dg.gradient[k]);
                }
                CHECK(norm(sum) <= 1e-13 * scale);
                CHECK(norm(torque) <= 1e-12 * scale);
            }
        }
        for (auto v : all_variants) {
            const auto same = dihedral_dg(v, butane, q, q, DihedralKind::proper, Box::free());
            const auto exact = dihedral_grad_distance_form(q, butane);
            for (int k = 0; k < 4; ++k)
                CHECK(testing::max_abs_diff(same.gradient[k], exact[k]) <= 1e-10 * (1 + norm(exact[k])));
        }
        const auto fwd = dihedral_dg(DGVariant::symmetric, butane, q, qp, DihedralKind::proper, Box::free());
        const auto rev = dihedral_dg(DGVariant::symmetric, butane, qp, q, DihedralKind::proper, Box::free());
        CHECK(fwd.gradient == rev.gradient);
    }

    const auto q = testing::random_dihedral(rng);
    const auto flat = dihedral_dg(DGVariant::left, {3.0, {1.5}}, q, testing::perturb(q, rng, 0.1),
                                  DihedralKind::proper, Box::free());
    for (const auto& g : flat.gradient) CHECK(g == Vec3{0, 0, 0});

    const std::array<Vec3, 4> line{{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 1, 0}}};
    CHECK_THROWS_AS(dihedral_dg(DGVariant::left, butane, line, line, DihedralKind::proper, Box::free()),
                    DegenerateGeometry);
}

TEST_CASE("bonded terms across a periodic boundary") {
    const AngleParams water = AngleParams::from_degrees(55, 104.52);
    const Box box = Box::periodic(5, 5, 5);
    const std::array<Vec3, 3> inside{{{0.2, 1, 1}, {0.9, 1.3, 1}, {1.5, 0.8, 1}}};
    const std::array<Vec3, 3> inside_p{{{0.25, 1, 1}, {0.85, 1.35, 1}, {1.5, 0.75, 1.1}}};
    const Vec3 shift{-1.0, 0, 0};
    std::array<Vec3, 3> split = inside, split_p = inside_p;
    for (int k = 0; k < 3; ++k) {
        split[k] = wrap_position(inside[k] + shift, box);
        split_p[k] = wrap_position(inside_p[k] + shift, box);
    }
    const auto a = angle_dg(DGVariant::symmetric, water, inside, inside_p, box);
    const auto b = angle_dg(DGVariant::symmetric, water, split, split_p, box);
    for (int k = 0; k < 3; ++k) CHECK(testing::max_abs_diff(a.gradient[k], b.gradient[k]) < 1e-10);
    CHECK(a.v_end == Approx(b.v_end).epsilon(1e-12));
}

TEST_CASE("system assembly") {
    ParticleSystem none;
    Topology empty_topo;
    ForceField ff;
    ff.finalize();
    const Model empty{none, empty_topo, ff, Box::free()};
    const auto e = assemble_system_dg(empty, {}, {}, {});
    CHECK(e.gradient.empty());
    CHECK(e.potential_at_q == 0.0);
    CHECK(e.potential_at_qprime == 0.0);

    SUBCASE("single pair") {
        ParticleSystem two;
        two.add({6.010216, 5, 5}, {}, 1, 0);
        two.add({5, 5, 5}, {}, 1, 0);
        ForceField lj;
        lj.species = {{"A", 1, 1, 5}};
        lj.finalize();
        const Model m{two, empty_topo, lj, Box::free()};
        const std::vector<Vec3> qp{{6.02, 5.01, 5}, {4.99, 5, 5.02}};
        const auto pairs = all_pairs(2);
        const auto sys_dg = assemble_system_dg(m, two.q, qp, pairs);
        const auto fn = [&](double r) { return lj_eval(r, lj.pair(0, 0)); };
        const auto pair = pairwise_dg(fn, two.q[0], two.q[1], qp[0], qp[1], Box::free());
        CHECK(sys_dg.gradient[0] == pair.g_i);
        CHECK(sys_dg.gradient[1] == pair.g_j);
        CHECK(sys_dg.potential_at_q == pair.v_start);
        CHECK(sys_dg.potential_at_qprime == pair.v_end);
    }

    SUBCASE("two butane chains") {
        auto b = two_butanes();
        const Model m{b.sys, b.topo, b.ff, Box::free()};
        const auto pairs = all_pairs(b.sys.size());
        const auto exact = assemble_gradient(m, b.sys.q, pairs);
        for (const DGScheme scheme : {DGScheme{}, DGScheme{DGVariant::left, DGVariant::right}}) {
            const auto dg = assemble_system_dg(m, b.sys.q, b.sys.q, pairs, scheme);
            CHECK(dg.potential_at_q == Approx(exact.potential).epsilon(1e-14));
            for (std::size_t i = 0; i < b.sys.size(); ++i)
                CHECK(testing::max_abs_diff(dg.gradient[i], exact.gradient[i]) <=
                      1e-10 * (1 + norm(exact.gradient[i])));
        }

        // analytic gradient against central differences of the assembled potential
        const double h = 1e-6;
        for (std::size_t i = 0; i < b.sys.size(); ++i) {
            for (int a = 0; a < 3; ++a) {
                auto plus = b.sys.q, minus = b.sys.q;
                plus[i][a] += h;
                minus[i][a] -= h;
                const double fd = (assemble_gradient(m, plus, pairs).potential -
                                   assemble_gradient(m, minus, pairs).potential) /
                                  (2 * h);
                CHECK(exact.gradient[i][a] == Approx(fd).epsilon(1e-6).scale(1e3));
            }
        }

        std::mt19937_64 rng(41);
        for (int t = 0; t < 50; ++t) {
            const auto qp = jiggle(b.sys.q, rng, 0.01);
            const auto dg = assemble_system_dg(m, b.sys.q, qp, pairs);
            double s = 0.0;
            for (std::size_t i = 0; i < qp.size(); ++i) s += dot(dg.gradient[i], qp[i] - b.sys.q[i]);
            CHECK(std::abs(s - (dg.potential_at_qprime - dg.potential_at_q)) <=
                  defect_scale(dg.potential_at_q, dg.potential_at_qprime));
        }
    }
}

TEST_CASE("intramolecular pairs are excluded") {
    ParticleSystem sys;
    sys.add({0, 0, 0}, {}, 1, 0, 1);
    sys.add({1.2, 0, 0}, {}, 1, 0, 1);
    sys.add({0, 1.3, 0}, {}, 1, 0, 2);
    Topology topo;
    ForceField ff;
    ff.species = {{"A", 1, 1, 1}};
    ff.finalize();
    const Model m{sys, topo, ff, Box::free()};
    const auto g = assemble_gradient(m, sys.q, all_pairs(3));
    const double expected = lj_eval(1.3, ff.pair(0, 0)).v + lj_eval(std::hypot(1.2, 1.3), ff.pair(0, 0)).v;
    CHECK(g.potential == Approx(expected).epsilon(1e-14));
}

TEST_CASE("residual jacobian") {
    ParticleSystem two;
    two.add({6.010216, 5, 5}, {0, 1, 0}, 1, 0);
    two.add({5, 5, 5}, {0, -1, 0}, 1, 0);
    Topology topo;
    ForceField ff;
    ff.species = {{"A", 1, 1, 5}};
    ff.finalize();
    const Model m{two, topo, ff, Box::free()};
    const auto pairs = all_pairs(2);
    const std::vector<Vec3> u{{6.011, 5.005, 5}, {4.999, 4.995, 5.001}};
    const std::vector<Vec3> v{{0.3, -0.2, 0.5}, {-0.1, 0.4, 0.2}};
    const double tau = 0.005;

    for (auto mode : {JacobianMode::full, JacobianMode::simplified}) {
        const auto id = dg_jacobian_vector(mode, m, two.q, u, v, 0.0, pairs);
        CHECK(id == v);
    }

    const auto res = [&](const std::vector<Vec3>& x) {
        const auto dg = assemble_system_dg(m, two.q, x, pairs);
        return residual(x, two.q, two.p, tau, two.mass, dg.gradient);
    };
    const double eps = 1e-6;
    std::vector<Vec3> up = u, um = u;
    for (std::size_t i = 0; i < u.size(); ++i) {
        up[i] += eps * v[i];
        um[i] -= eps * v[i];
    }
    const auto fp = res(up), fm = res(um);
    const auto jv = dg_jacobian_vector(JacobianMode::full, m, two.q, u, v, tau, pairs);
    for (std::size_t i = 0; i < u.size(); ++i) {
        const Vec3 fd = (fp[i] - fm[i]) / (2 * eps);
        // compare the parts beyond the identity, where all the information is
        const Vec3 a = jv[i] - v[i], b = fd - v[i];
        CHECK(norm(a - b) <= 1e-5 * norm(b));
    }

    SUBCASE("no interaction gives the identity") {
        ForceField off;
        off.species = {{"A", 1, 1, 5}};
        off.lj_enabled = false;
        off.finalize();
        const Model free_flight{two, topo, off, Box::free()};
        for (auto mode : {JacobianMode::full, JacobianMode::simplified})
            CHECK(dg_jacobian_vector(mode, free_flight, two.q, u, v, tau, pairs) == v);
    }

    SUBCASE("full jacobian symmetry") {
        // Symmetric at u = q_n; away from it the asymmetry shrinks linearly with |u - q_n|.
        const std::vector<Vec3> w{{-0.7, 0.1, 0.3}, {0.2, 0.6, -0.4}};
        const auto skew = [&](double h) {
            std::vector<Vec3> x = two.q;
            x[0] += Vec3{h, h, 0};
            x[1] += Vec3{-h, 0, h};
            const auto jv_x = dg_jacobian_vector(JacobianMode::full, m, two.q, x, v, tau, pairs);
            const auto jw_x = dg_jacobian_vector(JacobianMode::full, m, two.q, x, w, tau, pairs);
            return std::abs(dot(w, jv_x) - dot(v, jw_x));
        };
        CHECK(skew(0.0) < 1e-12);
        const double a = skew(1e-3), b = skew(1e-4);
        CHECK(a > 0.0);
        CHECK(b / a == Approx(0.1).epsilon(0.05));
    }

    SUBCASE("simplified jacobian is symmetric") {
        const std::vector<Vec3> w{{-0.7, 0.1, 0.3}, {0.2, 0.6, -0.4}};
        const auto jw = dg_jacobian_vector(JacobianMode::simplified, m, two.q, u, w, tau, pairs);
        const auto jv2 = dg_jacobian_vector(JacobianMode::simplified, m, two.q, u, v, tau, pairs);
        CHECK(dot(w, jv2) == Approx(dot(v, jw)).epsilon(1e-12));
    }
}
