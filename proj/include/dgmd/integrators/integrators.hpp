#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dgmd/core/system.hpp"
#include "dgmd/integrators/force_provider.hpp"
#include "dgmd/solver/newton.hpp"

namespace dgmd {

enum class Method { velocity_dg, verlet, implicit_midpoint };

Method parse_method(const std::string& name); ///< "dg", "verlet" or "midpoint"
std::string to_string(Method m);

struct IntegratorChoice {
    Method method = Method::velocity_dg;
    DGScheme scheme{}; ///< only used by velocity_dg
};

struct StepOutcome {
    SolveReport report;
    double potential = 0.0; ///< at the new positions
};

StepOutcome velocity_dg_step(ParticleSystem& sys, double tau, ForceProvider& forces,
                             const DGScheme& scheme, const SolverSettings& settings);

/// Kick-drift-kick velocity Verlet.
StepOutcome verlet_step(ParticleSystem& sys, double tau, ForceProvider& forces);

/// Implicit midpoint on (q, p); p is eliminated so Newton runs on positions only with the
/// simplified (midpoint Hessian) Jacobian.
StepOutcome implicit_midpoint_step(ParticleSystem& sys, double tau, ForceProvider& forces,
                                   const SolverSettings& settings);

StepOutcome step(ParticleSystem& sys, double tau, ForceProvider& forces,
                 const IntegratorChoice& choice, const SolverSettings& settings);

using TrajectorySink = std::function<void(long step, double time, const ParticleSystem& sys)>;

struct RunConfig {
    IntegratorChoice integrator{};
    SolverSettings solver{};
    double tau = 0.005;
    long steps = 0;
    long diagnostics_interval = 1;
    long trajectory_interval = 0; ///< 0 disables trajectory output
};

/// Number of steps of size tau that reach t_max (rounded to nearest).
long steps_for(double t_max, double tau);

/// Runs cfg.steps steps and returns diagnostics for step 0 and every diagnostics_interval steps
/// (the final step is always included). Step failures are rethrown with the step index.
std::vector<DiagnosticsRecord> run_simulation(ParticleSystem& sys, const RunConfig& cfg,
                                              ForceProvider& forces,
                                              const TrajectorySink& sink = {});

} // namespace dgmd
