#pragma once

#include <array>
#include <limits>

namespace dgmd {

/// Value and first two derivatives of a scalar function of one distance.
struct Radial {
    double v = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

struct LJParams {
    double sigma = 1.0;
    double epsilon = 1.0;
    double r_cut = std::numeric_limits<double>::infinity();
    double r_m = std::numeric_limits<double>::infinity();
    bool switched = false;

    /// Switched 12-6 potential with the blend starting at r_cut / 2.
    static LJParams with_switch(double sigma, double epsilon, double r_cut) {
        return {sigma, epsilon, r_cut, 0.5 * r_cut, true};
    }
    static LJParams plain(double sigma, double epsilon) { return {sigma, epsilon}; }

    /// Distance beyond which the potential is identically zero (infinite if unswitched).
    double cutoff() const { return switched ? r_cut : std::numeric_limits<double>::infinity(); }
};

struct BondParams {
    double k_b = 0.0;
    double r0 = 0.0;
};

/// C2 switching function s(r) = (1-x)^3 (1 + 3x + 6x^2), x = (r - r_m) / (r_cut - r_m).
Radial switch_eval(double r, double r_m, double r_cut);

/// 12-6 Lennard-Jones, multiplied by switch_eval when params.switched.
Radial lj_eval(double r, const LJParams& params);

/// Harmonic bond V = k_b (r - r0)^2 (no factor one half).
Radial bond_eval(double r, const BondParams& params);

struct MixedLJ {
    double sigma;
    double epsilon;
};

/// Lorentz-Berthelot combination: arithmetic mean of sigma, geometric mean of epsilon.
MixedLJ mix(double sigma_a, double epsilon_a, double sigma_b, double epsilon_b);

} // namespace dgmd
