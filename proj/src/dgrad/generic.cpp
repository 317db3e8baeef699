#include "dgmd/dgrad/generic.hpp"

#include <cassert>
#include <cmath>
#include <string>

#include "dgmd/core/errors.hpp"

namespace dgmd {

DGVariant parse_dg_variant(std::string_view name) {
    if (name == "left") return DGVariant::left;
    if (name == "right") return DGVariant::right;
    if (name == "symmetric") return DGVariant::symmetric;
    throw ConfigError("unknown discrete gradient variant '" + std::string(name) + "'");
}

std::string_view to_string(DGVariant v) {
    switch (v) {
    case DGVariant::left: return "left";
    case DGVariant::right: return "right";
    case DGVariant::symmetric: return "symmetric";
    }
    return "?";
}

std::vector<double> gonzalez_dg(const ScalarField& V, const GradientField& grad_v,
                                std::span<const double> u, std::span<const double> u_prime) {
    assert(u.size() == u_prime.size());
    const std::size_t n = u.size();
    std::vector<double> mid(n), du(n);
    double du2 = 0.0, scale = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        mid[i] = 0.5 * (u[i] + u_prime[i]);
        du[i] = u_prime[i] - u[i];
        du2 += du[i] * du[i];
        scale = std::max(scale, std::abs(u[i]));
    }
    std::vector<double> g = grad_v(mid);
    if (std::sqrt(du2) <= degenerate_increment * scale) return g;

    double slope = 0.0;
    for (std::size_t i = 0; i < n; ++i) slope += g[i] * du[i];
    const double correction = (V(u_prime) - V(u) - slope) / du2;
    for (std::size_t i = 0; i < n; ++i) g[i] += correction * du[i];
    return g;
}

namespace {

std::vector<double> itoh_abe_left(const ScalarField& V, const GradientField& grad_v,
                                  std::span<const double> u, std::span<const double> u_prime) {
    const std::size_t n = u.size();
    std::vector<double> point(u.begin(), u.end());
    std::vector<double> g(n);
    double v_lo = V(point);
    for (std::size_t k = 0; k < n; ++k) {
        if (near_degenerate(u[k], u_prime[k])) {
            point[k] = 0.5 * (u[k] + u_prime[k]);
            g[k] = grad_v(point)[k];
            point[k] = u_prime[k];
            v_lo = V(point);
            continue;
        }
        point[k] = u_prime[k];
        const double v_hi = V(point);
        g[k] = (v_hi - v_lo) / (u_prime[k] - u[k]);
        v_lo = v_hi;
    }
    return g;
}

} // namespace

std::vector<double> itoh_abe_dg(const ScalarField& V, const GradientField& grad_v,
                                std::span<const double> u, std::span<const double> u_prime,
                                DGVariant variant) {
    assert(u.size() == u_prime.size());
    switch (variant) {
    case DGVariant::left: return itoh_abe_left(V, grad_v, u, u_prime);
    case DGVariant::right: return itoh_abe_left(V, grad_v, u_prime, u);
    case DGVariant::symmetric: {
        auto g = itoh_abe_left(V, grad_v, u, u_prime);
        const auto r = itoh_abe_left(V, grad_v, u_prime, u);
        for (std::size_t k = 0; k < g.size(); ++k) g[k] = 0.5 * (g[k] + r[k]);
        return g;
    }
    }
    return {};
}

} // namespace dgmd
