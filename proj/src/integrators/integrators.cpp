#include "dgmd/integrators/integrators.hpp"

#include <cmath>
#include <string>

#include "dgmd/core/errors.hpp"

namespace dgmd {

void check_displacement_and_wrap(ParticleSystem& sys, std::span<const Vec3> q_old, const Box& box,
                                 double cutoff) {
    if (std::isfinite(cutoff)) {
        const double limit2 = 0.25 * cutoff * cutoff;
        for (std::size_t i = 0; i < sys.size(); ++i) {
            if (!(norm2(sys.q[i] - q_old[i]) < limit2))
                throw StepFailure("particle " + std::to_string(sys.global_id[i]) +
                                  " moved at least half the cutoff in one step");
        }
    }
    if (box.is_periodic())
        for (auto& x : sys.q) x = wrap_position(x, box);
}

Method parse_method(const std::string& name) {
    if (name == "dg") return Method::velocity_dg;
    if (name == "verlet") return Method::verlet;
    if (name == "midpoint") return Method::implicit_midpoint;
    throw ConfigError("unknown integrator '" + name + "' (expected dg, verlet or midpoint)");
}

std::string to_string(Method m) {
    switch (m) {
    case Method::velocity_dg: return "dg";
    case Method::verlet: return "verlet";
    case Method::implicit_midpoint: return "midpoint";
    }
    return "?";
}

StepOutcome velocity_dg_step(ParticleSystem& sys, double tau, ForceProvider& forces,
                             const DGScheme& scheme, const SolverSettings& settings) {
    forces.prepare(sys);
    const VecField q_n = sys.q;
    const auto mode = settings.jacobian_mode;
    NewtonResult res = newton_solve(
        q_n, sys.p, tau, sys.mass,
        [&](std::span<const Vec3> q0, std::span<const Vec3> u) {
            return forces.discrete_gradient(q0, u, scheme);
        },
        [&](std::span<const Vec3> u, std::span<const Vec3> v) {
            return forces.jacobian_apply(mode, q_n, u, v, tau);
        },
        settings);
    sys.q = std::move(res.q_next);
    for (std::size_t i = 0; i < sys.size(); ++i) sys.p[i] -= tau * res.dg.gradient[i];
    forces.accept(sys, q_n);
    return {res.report, res.dg.potential_at_qprime};
}

StepOutcome verlet_step(ParticleSystem& sys, double tau, ForceProvider& forces) {
    forces.prepare(sys);
    const VecField q_n = sys.q;
    const VecField g0 = forces.gradient(q_n).gradient;
    for (std::size_t i = 0; i < sys.size(); ++i) {
        sys.p[i] -= (0.5 * tau) * g0[i];
        sys.q[i] += (tau / sys.mass[i]) * sys.p[i];
    }
    const GradientEvaluation g1 = forces.gradient(sys.q);
    for (std::size_t i = 0; i < sys.size(); ++i) sys.p[i] -= (0.5 * tau) * g1.gradient[i];
    forces.accept(sys, q_n);
    return {SolveReport{true, 0, 0, 0.0}, g1.potential};
}

StepOutcome implicit_midpoint_step(ParticleSystem& sys, double tau, ForceProvider& forces,
                                   const SolverSettings& settings) {
    forces.prepare(sys);
    const VecField q_n = sys.q;
    const std::size_t n = sys.size();
    VecField u0(n);
    for (std::size_t i = 0; i < n; ++i) u0[i] = q_n[i] + (tau / sys.mass[i]) * sys.p[i];

    VecField g_mid;
    const auto fn = [&](std::span<const Vec3> u) {
        VecField mid(n);
        for (std::size_t i = 0; i < n; ++i) mid[i] = 0.5 * (u[i] + q_n[i]);
        g_mid = forces.gradient(mid).gradient;
        return residual(u, q_n, sys.p, tau, sys.mass, g_mid);
    };
    const auto jac = [&](std::span<const Vec3> u, std::span<const Vec3> v) {
        return forces.jacobian_apply(JacobianMode::simplified, q_n, u, v, tau);
    };
    RootResult root = newton_root(std::move(u0), fn, jac, sys.mass, settings);
    sys.q = std::move(root.u);
    for (std::size_t i = 0; i < n; ++i) sys.p[i] -= tau * g_mid[i];
    const double potential = forces.gradient(sys.q).potential;
    forces.accept(sys, q_n);
    return {root.report, potential};
}

StepOutcome step(ParticleSystem& sys, double tau, ForceProvider& forces,
                 const IntegratorChoice& choice, const SolverSettings& settings) {
    switch (choice.method) {
    case Method::velocity_dg: return velocity_dg_step(sys, tau, forces, choice.scheme, settings);
    case Method::verlet: return verlet_step(sys, tau, forces);
    case Method::implicit_midpoint: return implicit_midpoint_step(sys, tau, forces, settings);
    }
    throw ConfigError("unknown integrator");
}

long steps_for(double t_max, double tau) {
    if (!(tau != 0.0) || !std::isfinite(t_max / tau)) throw ConfigError("invalid time step");
    return std::lround(std::abs(t_max / tau));
}

std::vector<DiagnosticsRecord> run_simulation(ParticleSystem& sys, const RunConfig& cfg,
                                              ForceProvider& forces, const TrajectorySink& sink) {
    cfg.solver.validate();
    if (cfg.steps < 0 || cfg.diagnostics_interval < 1 || cfg.trajectory_interval < 0)
        throw ConfigError("invalid run length or output interval");

    std::vector<DiagnosticsRecord> out;
    forces.prepare(sys);
    out.push_back(make_diagnostics(0, 0.0, sys, forces.gradient(sys.q).potential));
    if (sink && cfg.trajectory_interval > 0) sink(0, 0.0, sys);

    for (long n = 1; n <= cfg.steps; ++n) {
        StepOutcome o;
        try {
            o = step(sys, cfg.tau, forces, cfg.integrator, cfg.solver);
        } catch (const StepFailure& e) {
            throw StepFailure("step " + std::to_string(n) + ": " + e.what());
        }
        const double t = static_cast<double>(n) * cfg.tau;
        if (n % cfg.diagnostics_interval == 0 || n == cfg.steps)
            out.push_back(make_diagnostics(n, t, sys, o.potential, o.report.newton_iterations,
                                           o.report.cg_iterations));
        if (sink && cfg.trajectory_interval > 0 &&
            (n % cfg.trajectory_interval == 0 || n == cfg.steps))
            sink(n, t, sys);
    }
    return out;
}

} // namespace dgmd
