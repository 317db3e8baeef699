#include "dgmd/potentials/pair.hpp"

#include <cassert>
#include <cmath>

namespace dgmd {

Radial switch_eval(double r, double r_m, double r_cut) {
    if (r < r_m) return {1.0, 0.0, 0.0};
    if (r > r_cut) return {0.0, 0.0, 0.0};
    const double width = r_cut - r_m;
    const double x = (r - r_m) / width;
    const double omx = 1.0 - x;
    Radial s;
    s.v = omx * omx * omx * (1.0 + 3.0 * x + 6.0 * x * x);
    s.d1 = -30.0 * x * x * (x - 1.0) * (x - 1.0) / width;
    s.d2 = -60.0 * x * (x - 1.0) * (2.0 * x - 1.0) / (width * width);
    return s;
}

Radial lj_eval(double r, const LJParams& params) {
    assert(r > 0.0);
    if (params.switched && r >= params.r_cut) return {};

    const double inv_r = 1.0 / r;
    const double sr = params.sigma * inv_r;
    const double sr2 = sr * sr;
    const double sr6 = sr2 * sr2 * sr2;
    const double sr12 = sr6 * sr6;
    const double four_eps = 4.0 * params.epsilon;

    Radial u;
    u.v = four_eps * (sr12 - sr6);
    u.d1 = four_eps * (-12.0 * sr12 + 6.0 * sr6) * inv_r;
    u.d2 = four_eps * (156.0 * sr12 - 42.0 * sr6) * inv_r * inv_r;
    if (!params.switched || r < params.r_m) return u;

    const Radial s = switch_eval(r, params.r_m, params.r_cut);
    return {u.v * s.v, u.d1 * s.v + u.v * s.d1, u.d2 * s.v + 2.0 * u.d1 * s.d1 + u.v * s.d2};
}

Radial bond_eval(double r, const BondParams& params) {
    const double dr = r - params.r0;
    return {params.k_b * dr * dr, 2.0 * params.k_b * dr, 2.0 * params.k_b};
}

MixedLJ mix(double sigma_a, double epsilon_a, double sigma_b, double epsilon_b) {
    if (sigma_a == sigma_b && epsilon_a == epsilon_b) return {sigma_a, epsilon_a};
    return {0.5 * (sigma_a + sigma_b), std::sqrt(epsilon_a * epsilon_b)};
}

} // namespace dgmd
