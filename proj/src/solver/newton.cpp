#include "dgmd/solver/newton.hpp"

#include <cmath>
#include <string>

#include "dgmd/core/errors.hpp"

namespace dgmd {

void SolverSettings::validate() const {
    if (!(newton_tol > 0.0) || !(cg_tol > 0.0))
        throw ConfigError("solver tolerances must be positive");
    if (newton_max_iter < 1 || cg_max_iter < 1 || polish_iter < 0)
        throw ConfigError("solver iteration caps must be at least 1");
}

double dot(std::span<const Vec3> a, std::span<const Vec3> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += dgmd::dot(a[i], b[i]);
    return s;
}

double scaled_norm(std::span<const Vec3> f) {
    if (f.empty()) return 0.0;
    return std::sqrt(dot(f, f) / (3.0 * static_cast<double>(f.size())));
}

VecField residual(std::span<const Vec3> u, std::span<const Vec3> q_n, std::span<const Vec3> p_n,
                  double tau, std::span<const double> mass, std::span<const Vec3> g) {
    VecField f(u.size());
    const double half_tau2 = 0.5 * tau * tau;
    for (std::size_t i = 0; i < u.size(); ++i)
        f[i] = u[i] - q_n[i] - (tau / mass[i]) * p_n[i] + (half_tau2 / mass[i]) * g[i];
    return f;
}

VecField residual(std::span<const Vec3> u, std::span<const Vec3> q_n, std::span<const Vec3> p_n,
                  double tau, std::span<const double> mass, const DGAssembler& assemble) {
    return residual(u, q_n, p_n, tau, mass, assemble(q_n, u).gradient);
}

CGResult cg_solve(const LinearOperator& apply, std::span<const Vec3> rhs, double tol,
                  int max_iter) {
    const std::size_t n = rhs.size();
    CGResult out;
    out.solution.assign(n, Vec3{});
    const double b_norm = std::sqrt(dot(rhs, rhs));
    if (b_norm == 0.0) {
        out.converged = true;
        return out;
    }
    VecField r(rhs.begin(), rhs.end());
    VecField d = r;
    double rr = dot(r, r);
    auto& x = out.solution;
    for (int k = 1; k <= max_iter; ++k) {
        const VecField ad = apply(d);
        const double dad = dot(d, ad);
        if (!(dad > 0.0) || !std::isfinite(dad)) break; // lost positive definiteness
        const double alpha = rr / dad;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * d[i];
            r[i] -= alpha * ad[i];
        }
        const double rr_next = dot(r, r);
        out.iterations = k;
        out.residual_norm = std::sqrt(rr_next);
        if (out.residual_norm <= tol * b_norm) {
            out.converged = true;
            return out;
        }
        const double beta = rr_next / rr;
        rr = rr_next;
        for (std::size_t i = 0; i < n; ++i) d[i] = r[i] + beta * d[i];
    }
    return out;
}

CGResult cg_solve(const LinearOperator& apply, std::span<const Vec3> rhs,
                  const SolverSettings& settings) {
    return cg_solve(apply, rhs, settings.cg_tol, settings.cg_max_iter);
}

RootResult newton_root(VecField u0, const std::function<VecField(std::span<const Vec3>)>& residual_fn,
                       const JacobianVector& jac_vec, std::span<const double> mass,
                       const SolverSettings& settings) {
    RootResult out;
    out.u = std::move(u0);
    auto& u = out.u;
    auto& rep = out.report;
    VecField f = residual_fn(u);
    rep.final_residual_norm = scaled_norm(f);

    const auto newton_update = [&] {
        VecField rhs(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) rhs[i] = -mass[i] * f[i];
        const LinearOperator op = [&](std::span<const Vec3> v) {
            VecField jv = jac_vec(u, v);
            for (std::size_t i = 0; i < jv.size(); ++i) jv[i] *= mass[i];
            return jv;
        };
        CGResult cg = cg_solve(op, rhs, settings);
        rep.cg_iterations += cg.iterations;
        if (!cg.converged)
            throw StepFailure("CG did not converge in " + std::to_string(settings.cg_max_iter) +
                              " iterations");
        ++rep.newton_iterations;
        return std::move(cg.solution);
    };

    while (!(rep.final_residual_norm <= settings.newton_tol)) {
        if (!std::isfinite(rep.final_residual_norm))
            throw StepFailure("Newton residual is not finite");
        if (rep.newton_iterations == settings.newton_max_iter)
            throw StepFailure("Newton did not converge in " +
                              std::to_string(settings.newton_max_iter) +
                              " iterations (residual " + std::to_string(rep.final_residual_norm) +
                              ")");
        const VecField du = newton_update();
        for (std::size_t i = 0; i < u.size(); ++i) u[i] += du[i];
        f = residual_fn(u);
        rep.final_residual_norm = scaled_norm(f);
    }

    for (int k = 0; k < settings.polish_iter && rep.final_residual_norm > 0.0; ++k) {
        const VecField du = newton_update();
        VecField trial = u;
        for (std::size_t i = 0; i < u.size(); ++i) trial[i] += du[i];
        VecField f_trial = residual_fn(trial);
        const double norm_trial = scaled_norm(f_trial);
        // A trial that leaves the tolerance is dropped; evaluating the accepted iterate again
        // restores the side results of residual_fn. At the round-off floor a kept trial may be
        // marginally worse than the previous iterate.
        if (!(norm_trial <= settings.newton_tol)) {
            f = residual_fn(u);
            rep.final_residual_norm = scaled_norm(f);
            break;
        }
        const bool keep_going = norm_trial <= 0.1 * rep.final_residual_norm;
        u = std::move(trial);
        f = std::move(f_trial);
        rep.final_residual_norm = norm_trial;
        if (!keep_going) break;
    }
    rep.converged = true;
    return out;
}

NewtonResult newton_solve(std::span<const Vec3> q_n, std::span<const Vec3> p_n, double tau,
                          std::span<const double> mass, const DGAssembler& assemble,
                          const JacobianVector& jac_vec, const SolverSettings& settings) {
    VecField u0(q_n.size());
    for (std::size_t i = 0; i < u0.size(); ++i) u0[i] = q_n[i] + (tau / mass[i]) * p_n[i];
    NewtonResult out;
    const auto fn = [&](std::span<const Vec3> u) {
        out.dg = assemble(q_n, u);
        return residual(u, q_n, p_n, tau, mass, out.dg.gradient);
    };
    RootResult root = newton_root(std::move(u0), fn, jac_vec, mass, settings);
    out.q_next = std::move(root.u);
    out.report = root.report;
    return out;
}

} // namespace dgmd
