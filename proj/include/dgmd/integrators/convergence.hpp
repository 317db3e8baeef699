#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "dgmd/integrators/integrators.hpp"

namespace dgmd {

/// Builds a fresh force provider for one run of a study.
using ForceFactory = std::function<std::unique_ptr<ForceProvider>()>;

struct ConvergencePoint {
    double tau = 0.0;
    double error = 0.0;
};

struct ConvergenceResult {
    std::vector<ConvergencePoint> points;
    double reference_tau = 0.0;
    double order = 0.0; ///< least-squares slope of log(error) against log(tau)
};

/// Euclidean norm over all position differences (minimum image in a periodic box).
double position_error(std::span<const Vec3> a, std::span<const Vec3> b, const Box& box);

/// Least-squares slope of log(error) against log(tau).
double fitted_order(std::span<const ConvergencePoint> points);

/// Runs `initial` to t_max with every tau in `taus` and with the reference step
/// min(taus) / reference_divisor, all with the same method, and compares final positions.
ConvergenceResult convergence_study(const ParticleSystem& initial, const Box& box,
                                    const ForceFactory& make_forces, RunConfig base,
                                    std::span<const double> taus, double t_max,
                                    int reference_divisor = 16);

} // namespace dgmd
