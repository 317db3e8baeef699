#include "dgmd/integrators/convergence.hpp"

#include <algorithm>
#include <cmath>

#include "dgmd/core/errors.hpp"

namespace dgmd {

double position_error(std::span<const Vec3> a, std::span<const Vec3> b, const Box& box) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += norm2(minimum_image(a[i] - b[i], box));
    return std::sqrt(sum);
}

double fitted_order(std::span<const ConvergencePoint> points) {
    const double n = static_cast<double>(points.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& p : points) {
        const double x = std::log(p.tau), y = std::log(p.error);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

std::vector<Vec3> final_positions(const ParticleSystem& initial, const ForceFactory& make_forces,
                                  RunConfig cfg, double tau, double t_max) {
    ParticleSystem sys = initial;
    cfg.tau = tau;
    cfg.steps = steps_for(t_max, tau);
    cfg.diagnostics_interval = std::max<long>(cfg.steps, 1);
    cfg.trajectory_interval = 0;
    auto forces = make_forces();
    run_simulation(sys, cfg, *forces);
    return sys.q;
}

} // namespace

ConvergenceResult convergence_study(const ParticleSystem& initial, const Box& box,
                                    const ForceFactory& make_forces, RunConfig base,
                                    std::span<const double> taus, double t_max,
                                    int reference_divisor) {
    if (taus.size() < 2) throw ConfigError("a convergence study needs at least two step sizes");
    if (reference_divisor < 1) throw ConfigError("reference divisor must be at least 1");
    for (double tau : taus)
        if (!(tau > 0.0)) throw ConfigError("step sizes must be positive");

    ConvergenceResult result;
    result.reference_tau = *std::min_element(taus.begin(), taus.end()) / reference_divisor;
    const auto reference = final_positions(initial, make_forces, base, result.reference_tau, t_max);
    for (double tau : taus) {
        const auto q = final_positions(initial, make_forces, base, tau, t_max);
        result.points.push_back({tau, position_error(q, reference, box)});
    }
    result.order = fitted_order(result.points);
    return result;
}

} // namespace dgmd
