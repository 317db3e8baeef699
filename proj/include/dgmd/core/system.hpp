#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "dgmd/core/vec3.hpp"

namespace dgmd {

/// Orthorhombic simulation box. Free space has no lengths.
struct Box {
    enum class Kind { free_space, periodic };

    Kind kind = Kind::free_space;
    Vec3 lengths{};

    static Box free() { return {}; }
    static Box periodic(double lx, double ly, double lz) { return {Kind::periodic, {lx, ly, lz}}; }

    bool is_periodic() const { return kind == Kind::periodic; }

    /// Throws ConfigError unless every periodic length exceeds 2 * cutoff.
    void validate(double cutoff) const;
};

namespace detail {
inline double image_component(double r, double length) {
    if (r >= -0.5 * length && r < 0.5 * length) return r;
    // floor keeps the lower boundary inside and pushes +L/2 down
    double shifted = r - length * std::floor(r / length + 0.5);
    if (shifted >= 0.5 * length) shifted -= length;
    if (shifted < -0.5 * length) shifted += length;
    return shifted;
}
} // namespace detail

/// Minimum image of a separation vector; each periodic component lands in [-L/2, L/2).
inline Vec3 minimum_image(const Vec3& r, const Box& box) {
    if (!box.is_periodic()) return r;
    return {detail::image_component(r.x, box.lengths.x), detail::image_component(r.y, box.lengths.y),
            detail::image_component(r.z, box.lengths.z)};
}

/// Wraps a position into [0, L) along periodic axes.
Vec3 wrap_position(const Vec3& q, const Box& box);

/// State of N particles. Index i always carries global_id[i]; the library keeps
/// global ids dense and equal to the index, so index order is global-id order.
struct ParticleSystem {
    std::vector<Vec3> q;
    std::vector<Vec3> p;
    std::vector<double> mass;
    std::vector<std::uint32_t> species;
    /// Molecule id per particle; 0 means "not part of a molecule".
    std::vector<std::uint64_t> molecule;
    std::vector<std::uint64_t> global_id;

    std::size_t size() const { return q.size(); }

    /// Appends one particle with the next dense global id.
    void add(const Vec3& position, const Vec3& momentum, double m, std::uint32_t species_id,
             std::uint64_t molecule_id = 0);

    /// Throws ConfigError on ragged arrays, non-positive masses or duplicate ids.
    void validate() const;
};

/// Reference scales for removing units: time scale alpha = sigma * sqrt(mass / epsilon).
struct UnitScale {
    double sigma_ref = 1.0;
    double epsilon_ref = 1.0;
    double mass_ref = 1.0;

    double alpha_ref() const;

    /// Angstrom, kcal/mol, atomic mass unit (water-like experiment), SI values.
    static UnitScale angstrom_kcal_u();
    /// Nanometre, kJ/mol, atomic mass unit (butane experiments), SI values.
    static UnitScale nanometre_kj_u();
};

struct EnergySplit {
    double kinetic = 0.0;
    double total = 0.0;
};

Vec3 total_linear_momentum(const ParticleSystem& sys);
Vec3 total_angular_momentum(const ParticleSystem& sys);
double kinetic_energy(std::span<const Vec3> p, std::span<const double> mass);
EnergySplit total_energy(const ParticleSystem& sys, double potential);

struct DiagnosticsRecord {
    long step = 0;
    double time = 0.0;
    double kinetic = 0.0;
    double potential = 0.0;
    double total_energy = 0.0;
    Vec3 linear_momentum{};
    Vec3 angular_momentum{};
    long newton_iterations = 0;
    long cg_iterations_total = 0;

    friend bool operator==(const DiagnosticsRecord&, const DiagnosticsRecord&) = default;
};

DiagnosticsRecord make_diagnostics(long step, double time, const ParticleSystem& sys,
                                   double potential, long newton_iterations = 0,
                                   long cg_iterations = 0);

} // namespace dgmd
