#pragma once

#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace dgmd {

/// Which coordinate-increment pattern a distance-based or Itoh-Abe discrete gradient uses.
/// Right is Left with the two time levels exchanged; Symmetric is their average.
enum class DGVariant { left, right, symmetric };

DGVariant parse_dg_variant(std::string_view name);
std::string_view to_string(DGVariant v);

using ScalarField = std::function<double(std::span<const double>)>;
using GradientField = std::function<std::vector<double>(std::span<const double>)>;

/// Relative size below which a difference quotient is replaced by the analytic partial
/// derivative at the midpoint of the increment.
inline constexpr double degenerate_increment = 1e-10;

inline bool near_degenerate(double x, double x_prime) {
    const double scale = 1.0 + (x > x_prime ? x : x_prime);
    const double h = x_prime - x;
    return (h < 0 ? -h : h) <= degenerate_increment * scale;
}

/// Midpoint (Gonzalez) discrete gradient:
/// grad V(m) + (V(u') - V(u) - <grad V(m), u' - u>) / |u' - u|^2 * (u' - u), m = (u + u') / 2.
std::vector<double> gonzalez_dg(const ScalarField& V, const GradientField& grad_v,
                                std::span<const double> u, std::span<const double> u_prime);

/// Coordinate-increment (Itoh-Abe) discrete gradient. Components with a vanishing increment
/// use the analytic partial at the increment midpoint.
std::vector<double> itoh_abe_dg(const ScalarField& V, const GradientField& grad_v,
                                std::span<const double> u, std::span<const double> u_prime,
                                DGVariant variant);

} // namespace dgmd
