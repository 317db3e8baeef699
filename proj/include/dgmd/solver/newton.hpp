#pragma once

#include <functional>
#include <span>
#include <vector>

#include "dgmd/core/vec3.hpp"
#include "dgmd/dgrad/assembly.hpp"

namespace dgmd {

struct SolverSettings {
    double newton_tol = 1e-12; ///< on ||F|| / sqrt(3N)
    int newton_max_iter = 200;
    double cg_tol = 1e-10; ///< relative residual of the linear solve
    int cg_max_iter = 500;
    JacobianMode jacobian_mode = JacobianMode::simplified;
    /// Extra iterations allowed after newton_tol is met, taken only while each one still cuts the
    /// residual tenfold. The energy error of a step is <grad-bar V, F>, so driving F down to
    /// round-off matters for systems whose energy is small compared to the forces.
    int polish_iter = 2;

    /// Throws ConfigError on non-positive tolerances or caps.
    void validate() const;
};

struct SolveReport {
    bool converged = false;
    int newton_iterations = 0;
    int cg_iterations = 0;
    double final_residual_norm = 0.0;
};

using VecField = std::vector<Vec3>;
using LinearOperator = std::function<VecField(std::span<const Vec3>)>;
/// Discrete gradient of the full system between q_n and u.
using DGAssembler = std::function<DGEvaluation(std::span<const Vec3> q_n, std::span<const Vec3> u)>;
/// Unweighted residual Jacobian at u applied to v, e.g. dg_jacobian_vector.
using JacobianVector = std::function<VecField(std::span<const Vec3> u, std::span<const Vec3> v)>;

double dot(std::span<const Vec3> a, std::span<const Vec3> b);
/// ||F|| / sqrt(3N); zero for an empty vector.
double scaled_norm(std::span<const Vec3> f);

/// F(u) = u - q_n - tau M^-1 p_n + tau^2/2 M^-1 g, with g the discrete gradient at (q_n, u).
VecField residual(std::span<const Vec3> u, std::span<const Vec3> q_n, std::span<const Vec3> p_n,
                  double tau, std::span<const double> mass, std::span<const Vec3> g);
VecField residual(std::span<const Vec3> u, std::span<const Vec3> q_n, std::span<const Vec3> p_n,
                  double tau, std::span<const double> mass, const DGAssembler& assemble);

struct CGResult {
    VecField solution; ///< best iterate when not converged
    int iterations = 0;
    double residual_norm = 0.0;
    bool converged = false;
};

/// Unpreconditioned conjugate gradients from a zero start.
CGResult cg_solve(const LinearOperator& apply, std::span<const Vec3> rhs, double tol, int max_iter);
CGResult cg_solve(const LinearOperator& apply, std::span<const Vec3> rhs,
                  const SolverSettings& settings);

struct NewtonResult {
    VecField q_next;
    DGEvaluation dg; ///< discrete gradient at (q_n, q_next), reused for the momentum update
    SolveReport report;
};

/// Solves F(u) = 0 from u0 = q_n + tau M^-1 p_n. Each linear step solves the mass-weighted system
/// (M J) du = -M F, which is symmetric for the simplified Jacobian at any masses.
/// Throws StepFailure when Newton or CG hits its iteration cap.
NewtonResult newton_solve(std::span<const Vec3> q_n, std::span<const Vec3> p_n, double tau,
                          std::span<const double> mass, const DGAssembler& assemble,
                          const JacobianVector& jac_vec, const SolverSettings& settings);

/// Generic form: residual(u) returns F(u) and may stash side results; the solve starts at u0.
struct RootResult {
    VecField u;
    SolveReport report;
};
RootResult newton_root(VecField u0, const std::function<VecField(std::span<const Vec3>)>& residual,
                       const JacobianVector& jac_vec, std::span<const double> mass,
                       const SolverSettings& settings);

} // namespace dgmd
