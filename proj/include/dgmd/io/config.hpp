#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "dgmd/integrators/convergence.hpp"
#include "dgmd/integrators/integrators.hpp"
#include "dgmd/potentials/forcefield.hpp"

namespace dgmd {

struct ConvergenceSettings {
    std::vector<double> taus;
    double t_max = 0.0;
    int reference_divisor = 16;
};

/// Everything one experiment needs: particles, terms, parameters, box and run settings.
/// Force providers made from it refer to its members, so keep it alive and in place.
struct Experiment {
    std::string name;
    ParticleSystem system;
    Topology topology;
    ForceField forcefield;
    Box box;
    RunConfig run;
    double t_max = 0.0;
    int ranks = 1;
    std::uint64_t seed = 1;
    std::string output_prefix;
    ConvergenceSettings convergence;

    Experiment() = default;
    Experiment(const Experiment&) = delete;
    Experiment& operator=(const Experiment&) = delete;

    std::vector<std::string> species_labels() const;
    Model model() const { return {system, topology, forcefield, box}; }
    /// Tau from the run settings and steps from t_max.
    void set_tau(double tau);
};

/// Parses a TOML experiment description. Relative data paths resolve against base_dir.
/// Throws ConfigError on unknown keys, missing values or invalid settings.
std::unique_ptr<Experiment> parse_experiment(std::string_view toml_text,
                                             const std::filesystem::path& base_dir = {});
std::unique_ptr<Experiment> load_experiment(const std::filesystem::path& file);

/// Serial reference forces for one rank in free space, the domain-decomposed engine otherwise.
std::unique_ptr<ForceProvider> make_forces(const Experiment& e, int ranks);

} // namespace dgmd
