#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "core_model.hpp"
#include "errors.hpp"
#include "parallel.hpp"

namespace stark {

using cplx = std::complex<double>;

/// Two-component chain at fixed transverse quasimomentum, sites j in
/// [-J, J]. Basis index of (j, s) is 2 (j + J) + s with s = 0 (A), 1 (B).
struct ReducedHamiltonian {
    int site_range = 0;
    double kappa = 0.0;
    Eigen::MatrixXcd matrix;
    LatticeSpec lattice;
    TiltSpec tilt;

    Eigen::Index index(int j, int sublattice) const {
        return 2 * (j + site_range) + sublattice;
    }
    Eigen::Index dimension() const { return matrix.rows(); }
};

/// Smallest J for which every coupling range fits twice inside the chain.
inline int minimum_site_range(const TiltSpec& tilt) {
    return 2 * (std::abs(tilt.r) + std::abs(tilt.q));
}

/// Truncation heuristic: Wannier-Stark states extend ~ hopping / (F d) sites.
inline int default_site_range(const LatticeSpec& lat, const TiltSpec& tilt) {
    const double fd = tilt.stark_step();
    return int(std::ceil((12.0 * lat.hopping_sum() + 4.0 * std::abs(tilt.E0)) / fd))
        + 4 * (std::abs(tilt.r) + std::abs(tilt.q));
}

/// One A_j <-> B_{j - shift} coupling family at quasimomentum kappa.
struct ChainBond {
    int shift;
    cplx amplitude;
};

inline std::array<ChainBond, 4> chain_bonds(const LatticeSpec& lat, const TiltSpec& tilt, double kappa) {
    const int r = tilt.r, q = tilt.q;
    const double kd = kappa * tilt.d;
    return {{
        {q, -lat.t1 * std::polar(1.0, -r * kd)},
        {r, -lat.t1 * std::polar(1.0, q * kd)},
        {q + r, -lat.t2 * std::polar(1.0, (q - r) * kd)},
        {0, cplx(-lat.t3, 0.0)},
    }};
}

inline ReducedHamiltonian build_reduced_hamiltonian(const LatticeSpec& lat, const TiltSpec& tilt,
                                                    double kappa, int J) {
    if (!std::isfinite(kappa))
        throw ConfigError("kappa must be finite");
    if (J < minimum_site_range(tilt))
        throw ConfigError("site range J=" + std::to_string(J) + " below minimum "
                          + std::to_string(minimum_site_range(tilt)));
    ReducedHamiltonian h;
    h.site_range = J;
    h.kappa = kappa;
    h.lattice = lat;
    h.tilt = tilt;
    const Eigen::Index n = 2 * (2 * J + 1);
    h.matrix = Eigen::MatrixXcd::Zero(n, n);

    const double fd = tilt.stark_step();
    const auto bonds = chain_bonds(lat, tilt, kappa);
    for (int j = -J; j <= J; ++j) {
        const auto a = h.index(j, 0);
        h.matrix(a, a) = fd * j;
        h.matrix(h.index(j, 1), h.index(j, 1)) = fd * j + tilt.E0;
        for (const auto& bond : bonds) {
            const int jb = j - bond.shift;
            if (jb < -J || jb > J)
                continue;
            const auto b = h.index(jb, 1);
            h.matrix(a, b) += bond.amplitude;
            h.matrix(b, a) += std::conj(bond.amplitude);
        }
    }
    return h;
}

struct Spectrum {
    Eigen::VectorXd values;       // ascending
    Eigen::MatrixXcd vectors;     // columns, empty unless requested
};

inline Spectrum eigen_spectrum(const ReducedHamiltonian& h, bool with_vectors = false) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
        h.matrix, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw NumericalError("Hermitian eigensolver did not converge");
    Spectrum s;
    s.values = solver.eigenvalues();
    if (with_vectors)
        s.vectors = solver.eigenvectors();
    return s;
}

/// One tracked band E(kappa).
struct DispersionCurve {
    std::vector<double> kappas;
    std::vector<double> energies;
    int band_label = 0; // ladder index p: kappa-averaged energy in units of the flat-ladder spacing
    double width = 0.0;

    double mean() const {
        if (energies.empty())
            return 0.0;
        return std::accumulate(energies.begin(), energies.end(), 0.0) / double(energies.size());
    }
};

namespace detail {

// Eigenvalues for every kappa, evaluated independently and stored by index.
inline std::vector<Eigen::VectorXd> spectra_on_grid(const LatticeSpec& lat, const TiltSpec& tilt,
                                                    const std::vector<double>& grid, int J) {
    std::vector<Eigen::VectorXd> out(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        out[i] = eigen_spectrum(build_reduced_hamiltonian(lat, tilt, grid[i], J)).values;
    });
    return out;
}

inline constexpr double kAmbiguityGap = 1e-10;

// Candidate window: central third of the truncated spectrum (edge states
// live near both ends).
inline std::pair<Eigen::Index, Eigen::Index> bulk_window(Eigen::Index n) {
    return {n / 3, n - n / 3};
}

inline DispersionCurve track_band(const std::vector<double>& grid,
                                  const std::vector<Eigen::VectorXd>& spectra, double ref) {
    DispersionCurve curve;
    curve.kappas = grid;
    curve.energies.resize(grid.size());
    double prev = ref;
    double prev_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& ev = spectra[i];
        const auto [lo, hi] = bulk_window(ev.size());
        Eigen::Index best = lo, second = -1;
        for (Eigen::Index k = lo; k < hi; ++k) {
            if (std::abs(ev[k] - prev) < std::abs(ev[best] - prev))
                best = k;
        }
        for (Eigen::Index k = lo; k < hi; ++k) {
            if (k == best)
                continue;
            if (second < 0 || std::abs(ev[k] - prev) < std::abs(ev[second] - prev))
                second = k;
        }
        const double gap = second >= 0 ? std::abs(ev[best] - ev[second]) : std::numeric_limits<double>::infinity();
        if (i > 0 && gap < kAmbiguityGap && prev_gap > kAmbiguityGap)
            throw TrackingAmbiguity("band tracking ambiguous near kappa=" + std::to_string(grid[i])
                                        + "; refine the kappa grid",
                                    i, grid[i]);
        prev_gap = gap;
        prev = ev[best];
        curve.energies[i] = prev;
    }
    const auto [mn, mx] = std::minmax_element(curve.energies.begin(), curve.energies.end());
    curve.width = curve.energies.empty() ? 0.0 : *mx - *mn;
    return curve;
}

inline int ladder_label(const TiltSpec& tilt, double energy) {
    const int g = std::gcd(tilt.r + tilt.q, std::abs(tilt.r - tilt.q));
    const double spacing = tilt.stark_step() * g / 2.0;
    return int(std::lround(energy / spacing));
}

} // namespace detail

enum class Tracking {
    Energy,  // nearest energy to the previous point
    Overlap, // largest eigenvector overlap with the previous point; follows exact crossings
};

namespace detail {

inline DispersionCurve track_by_overlap(const LatticeSpec& lat, const TiltSpec& tilt,
                                        const std::vector<double>& grid, double ref, int J) {
    std::vector<Spectrum> spectra(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        spectra[i] = eigen_spectrum(build_reduced_hamiltonian(lat, tilt, grid[i], J), true);
    });
    DispersionCurve curve;
    curve.kappas = grid;
    curve.energies.resize(grid.size());
    const auto [lo, hi] = bulk_window(spectra.front().values.size());
    Eigen::Index cur = lo;
    for (Eigen::Index k = lo; k < hi; ++k)
        if (std::abs(spectra[0].values[k] - ref) < std::abs(spectra[0].values[cur] - ref))
            cur = k;
    curve.energies[0] = spectra[0].values[cur];
    Eigen::VectorXcd prev = spectra[0].vectors.col(cur);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const auto& s = spectra[i];
        Eigen::Index best = lo;
        double best_overlap = -1.0;
        for (Eigen::Index k = lo; k < hi; ++k) {
            const double o = std::abs(prev.dot(s.vectors.col(k)));
            if (o > best_overlap) {
                best_overlap = o;
                best = k;
            }
        }
        curve.energies[i] = s.values[best];
        prev = s.vectors.col(best);
    }
    const auto [mn, mx] = std::minmax_element(curve.energies.begin(), curve.energies.end());
    curve.width = *mx - *mn;
    return curve;
}

} // namespace detail

/// Tracks the band nearest band_ref_energy at the first kappa, either by
/// energy continuity (throws TrackingAmbiguity at near-crossings) or by
/// eigenvector overlap. band_ref_energy must lie in the bulk,
/// |E| <= F d J / 2.
inline DispersionCurve dispersion_numeric(const LatticeSpec& lat, const TiltSpec& tilt,
                                          const std::vector<double>& grid, double band_ref_energy,
                                          int J, Tracking tracking = Tracking::Energy) {
    if (grid.empty())
        throw ConfigError("empty kappa grid");
    if (std::abs(band_ref_energy) > tilt.stark_step() * J / 2.0)
        throw ConfigError("reference energy outside the bulk of the truncated chain");
    auto curve = tracking == Tracking::Energy
        ? detail::track_band(grid, detail::spectra_on_grid(lat, tilt, grid, J), band_ref_energy)
        : detail::track_by_overlap(lat, tilt, grid, band_ref_energy, J);
    curve.band_label = detail::ladder_label(tilt, curve.mean());
    return curve;
}

/// Image of an energy under the map relating the two Wannier-Stark ladders:
/// E -> -E when (r + q) is even, E -> -E + F d / 2 when it is odd.
inline double ladder_reflection(const TiltSpec& tilt, double energy) {
    const bool half_integer = ((tilt.r + tilt.q) % 2) != 0;
    return half_integer ? -energy + tilt.stark_step() / 2.0 : -energy;
}

/// max over kappa of |E_2(kappa) - S(E_1(kappa))|, where E_2 is the band
/// tracked from S(E_1) at the first grid point.
inline double ladder_symmetry_residual(const DispersionCurve& curve, const LatticeSpec& lat,
                                       const TiltSpec& tilt, int J) {
    if (curve.energies.empty())
        return 0.0;
    const double ref = ladder_reflection(tilt, curve.energies.front());
    const auto partner = dispersion_numeric(lat, tilt, curve.kappas, ref, J);
    double res = 0.0;
    for (std::size_t i = 0; i < curve.energies.size(); ++i)
        res = std::max(res, std::abs(partner.energies[i] - ladder_reflection(tilt, curve.energies[i])));
    return res;
}

struct ConvergedWidth {
    double width = 0.0;
    int site_range = 0;
};

/// Reference energy at the centre of the truncated spectrum.
inline double central_energy(const TiltSpec& tilt) { return tilt.E0 / 2.0; }

/// Band tracked by energy continuity, switching to eigenvector overlap when
/// the grid runs into an exact crossing.
inline DispersionCurve dispersion_robust(const LatticeSpec& lat, const TiltSpec& tilt,
                                         const std::vector<double>& grid, double band_ref_energy, int J) {
    try {
        return dispersion_numeric(lat, tilt, grid, band_ref_energy, J, Tracking::Energy);
    } catch (const TrackingAmbiguity&) {
        return dispersion_numeric(lat, tilt, grid, band_ref_energy, J, Tracking::Overlap);
    }
}

/// Band width with J doubled until consecutive values agree to relative
/// 1e-4 (plus an absolute 1e-12 floor for flat bands). J <= 0 selects
/// default_site_range().
inline ConvergedWidth band_width_converged(const LatticeSpec& lat, const TiltSpec& tilt,
                                           int kappa_points, int J = 0, int max_doublings = 3) {
    if (J <= 0)
        J = default_site_range(lat, tilt);
    J = std::max(J, minimum_site_range(tilt));
    const auto grid = kappa_grid(tilt, kappa_points);
    const double ref = central_energy(tilt);
    double prev = dispersion_robust(lat, tilt, grid, ref, J).width;
    double before = prev;
    for (int i = 0; i < max_doublings; ++i) {
        J *= 2;
        const double cur = dispersion_robust(lat, tilt, grid, ref, J).width;
        if (std::abs(cur - prev) <= 1e-4 * std::max(cur, prev) + 1e-12)
            return {cur, J};
        before = prev;
        prev = cur;
    }
    throw NonConvergence("band width not converged under truncation doubling", before, prev, J);
}

} // namespace stark
