#include "dgmd/core/system.hpp"

#include <cmath>
#include <string>
#include <unordered_set>

#include "dgmd/core/errors.hpp"

namespace dgmd {

void Box::validate(double cutoff) const {
    if (!is_periodic()) return;
    for (int d = 0; d < 3; ++d) {
        if (!(lengths[d] > 0.0) || !std::isfinite(lengths[d]))
            throw ConfigError("periodic box lengths must be positive and finite");
        if (std::isfinite(cutoff) && !(lengths[d] > 2.0 * cutoff))
            throw ConfigError("periodic box length " + std::to_string(lengths[d]) +
                              " must exceed twice the cutoff " + std::to_string(cutoff));
    }
}

namespace {

double wrap_component(double x, double length) {
    double w = x - length * std::floor(x / length);
    if (w >= length) w -= length;
    if (w < 0.0) w = 0.0;
    return w;
}

} // namespace

Vec3 wrap_position(const Vec3& q, const Box& box) {
    if (!box.is_periodic()) return q;
    return {wrap_component(q.x, box.lengths.x), wrap_component(q.y, box.lengths.y),
            wrap_component(q.z, box.lengths.z)};
}

void ParticleSystem::add(const Vec3& position, const Vec3& momentum, double m,
                         std::uint32_t species_id, std::uint64_t molecule_id) {
    global_id.push_back(q.size());
    q.push_back(position);
    p.push_back(momentum);
    mass.push_back(m);
    species.push_back(species_id);
    molecule.push_back(molecule_id);
}

void ParticleSystem::validate() const {
    const auto n = q.size();
    if (p.size() != n || mass.size() != n || species.size() != n || molecule.size() != n ||
        global_id.size() != n)
        throw ConfigError("particle arrays have inconsistent lengths");
    std::unordered_set<std::uint64_t> seen;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(mass[i] > 0.0)) throw ConfigError("particle " + std::to_string(i) + " has non-positive mass");
        if (!is_finite(q[i]) || !is_finite(p[i]))
            throw ConfigError("particle " + std::to_string(i) + " has a non-finite coordinate");
        if (!seen.insert(global_id[i]).second)
            throw ConfigError("duplicate global id " + std::to_string(global_id[i]));
    }
}

double UnitScale::alpha_ref() const { return sigma_ref * std::sqrt(mass_ref / epsilon_ref); }

namespace {
constexpr double avogadro = 6.02214076e23;
constexpr double atomic_mass_unit = 1.66053906660e-27; // kg
} // namespace

UnitScale UnitScale::angstrom_kcal_u() {
    return {1e-10, 4184.0 / avogadro, atomic_mass_unit};
}

UnitScale UnitScale::nanometre_kj_u() {
    return {1e-9, 1000.0 / avogadro, atomic_mass_unit};
}

Vec3 total_linear_momentum(const ParticleSystem& sys) {
    Vec3 total{};
    for (const auto& pi : sys.p) total += pi;
    return total;
}

Vec3 total_angular_momentum(const ParticleSystem& sys) {
    Vec3 total{};
    for (std::size_t i = 0; i < sys.size(); ++i) total += cross(sys.q[i], sys.p[i]);
    return total;
}

double kinetic_energy(std::span<const Vec3> p, std::span<const double> mass) {
    double kinetic = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) kinetic += norm2(p[i]) / (2.0 * mass[i]);
    return kinetic;
}

EnergySplit total_energy(const ParticleSystem& sys, double potential) {
    EnergySplit e;
    e.kinetic = kinetic_energy(sys.p, sys.mass);
    e.total = e.kinetic + potential;
    return e;
}

DiagnosticsRecord make_diagnostics(long step, double time, const ParticleSystem& sys,
                                   double potential, long newton_iterations, long cg_iterations) {
    DiagnosticsRecord rec;
    rec.step = step;
    rec.time = time;
    const auto e = total_energy(sys, potential);
    rec.kinetic = e.kinetic;
    rec.potential = potential;
    rec.total_energy = e.total;
    rec.linear_momentum = total_linear_momentum(sys);
    rec.angular_momentum = total_angular_momentum(sys);
    rec.newton_iterations = newton_iterations;
    rec.cg_iterations_total = cg_iterations;
    return rec;
}

} // namespace dgmd
