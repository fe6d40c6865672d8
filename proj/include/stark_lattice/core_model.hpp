#pragma once

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "errors.hpp"

namespace stark {

/// Hopping amplitudes of the two-sublattice square model and the period of
/// the underlying simple square lattice. t3 == t2 is the plain square
/// lattice, t3 == -t2 the pi-flux lattice, t3 == 0 is honeycomb-like.
struct LatticeSpec {
    double t1 = 1.0;
    double t2 = 0.5;
    double t3 = 0.25;
    double a = 1.0;

    void validate() const {
        if (!(a > 0.0) || !std::isfinite(a))
            throw ConfigError("lattice constant a must be positive and finite");
        if (!std::isfinite(t1) || !std::isfinite(t2) || !std::isfinite(t3))
            throw ConfigError("hopping amplitudes must be finite");
    }

    double hopping_sum() const { return std::abs(t1) + std::abs(t2) + std::abs(t3); }

    friend bool operator==(const LatticeSpec&, const LatticeSpec&) = default;
};

enum class OrientationClass { Generic, Diagonal, AntiDiagonal };

inline const char* to_string(OrientationClass c) {
    switch (c) {
    case OrientationClass::Generic: return "generic";
    case OrientationClass::Diagonal: return "diagonal";
    case OrientationClass::AntiDiagonal: return "anti-diagonal";
    }
    return "?";
}

/// Resonant tilt F_x/F_y = r/q with derived geometry. Construct through
/// make_tilt(); the fields are then consistent and (r, q) coprime with the
/// sign convention q > 0, or q == 0 and r > 0.
struct TiltSpec {
    int r = 0;
    int q = 0;
    double F = 0.0;
    double d = 0.0;      // period along the force: sqrt(2) a / sqrt(r^2 + q^2)
    double E0 = 0.0;     // sublattice offset F d (r + q) / 2
    double theta = 0.0;  // atan2(r, q)

    /// Stark energy step between neighbouring chain sites.
    double stark_step() const { return F * d; }

    friend bool operator==(const TiltSpec&, const TiltSpec&) = default;
};

/// Coprime form of (r, q) with the sign convention of TiltSpec.
inline std::pair<int, int> reduce_direction(int r, int q) {
    if (r == 0 && q == 0)
        throw ConfigError("tilt direction (0, 0) is undefined");
    const int g = std::gcd(r, q);
    r /= g;
    q /= g;
    if (q < 0 || (q == 0 && r < 0)) {
        r = -r;
        q = -q;
    }
    return {r, q};
}

inline TiltSpec make_tilt(int r, int q, double F, const LatticeSpec& lattice) {
    if (!(F > 0.0) || !std::isfinite(F))
        throw ConfigError("force magnitude F must be positive, got " + std::to_string(F));
    lattice.validate();
    const auto [rr, qq] = reduce_direction(r, q);
    TiltSpec t;
    t.r = rr;
    t.q = qq;
    t.F = F;
    t.d = std::numbers::sqrt2 * lattice.a / std::sqrt(double(rr * rr + qq * qq));
    t.E0 = F * t.d * (rr + qq) / 2.0;
    t.theta = std::atan2(double(rr), double(qq));
    return t;
}

/// Same direction, different force.
inline TiltSpec with_force(const TiltSpec& tilt, double F, const LatticeSpec& lattice) {
    return make_tilt(tilt.r, tilt.q, F, lattice);
}

inline OrientationClass classify_orientation(const TiltSpec& tilt) {
    if (tilt.r == tilt.q)
        return OrientationClass::Diagonal;
    if (tilt.r == -tilt.q)
        return OrientationClass::AntiDiagonal;
    return OrientationClass::Generic;
}

/// Uniform samples of [0, 2 pi / d), endpoint excluded. Every kappa
/// dependence enters through e^{i k kappa d} with integer k, so this is
/// always a (possibly multiple) period of the dispersion.
inline std::vector<double> kappa_grid(const TiltSpec& tilt, int n_points) {
    if (n_points < 2)
        throw ConfigError("kappa grid needs at least 2 points");
    const double period = 2.0 * std::numbers::pi / tilt.d;
    std::vector<double> k(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i)
        k[static_cast<std::size_t>(i)] = period * i / n_points;
    return k;
}

} // namespace stark
