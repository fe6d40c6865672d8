#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "core_model.hpp"
#include "errors.hpp"
#include "exact_spectrum.hpp"
#include "fitting.hpp"
#include "special_fn.hpp"

namespace stark {

using StateVector = std::vector<cplx>;

/// Finite patch of the two-sublattice square lattice, N1 x N2 cells. Cell
/// vectors b1, b2 have length sqrt(2) a; B sits at A + (b1 + b2) / 2. Bonds
/// of A(n1, n2): B(n1-1, n2) and B(n1, n2-1) with -t1, B(n1-1, n2-1) with
/// -t2, B(n1, n2) with -t3. Cell coordinates are measured from the patch
/// centre (N1/2, N2/2).
///
/// Along the force:   xi_A  = d (r n1 + q n2),  xi_B  = xi_A + d (r + q) / 2.
/// Transverse:        eta_A = d (q n1 - r n2),  eta_B = eta_A + d (q - r) / 2.
class Lattice2D {
public:
    Lattice2D(const LatticeSpec& lat, const TiltSpec& tilt, int n1, int n2)
        : lat_(lat), tilt_(tilt), n1_(n1), n2_(n2) {
        const int min_extent = 8 * (std::abs(tilt.r) + std::abs(tilt.q));
        if (n1 < min_extent || n2 < min_extent)
            throw ConfigError("lattice patch " + std::to_string(n1) + "x" + std::to_string(n2)
                              + " smaller than the minimum " + std::to_string(min_extent));
        const std::size_t n = size();
        xi_.resize(n);
        eta_.resize(n);
        onsite_.resize(n);
        const double d = tilt.d;
        for (int i1 = 0; i1 < n1_; ++i1)
            for (int i2 = 0; i2 < n2_; ++i2) {
                const int m1 = i1 - n1_ / 2, m2 = i2 - n2_ / 2;
                const double xa = d * (tilt.r * m1 + tilt.q * m2);
                const double ea = d * (tilt.q * m1 - tilt.r * m2);
                const auto a = index(i1, i2, 0), b = index(i1, i2, 1);
                xi_[a] = xa;
                xi_[b] = xa + d * (tilt.r + tilt.q) / 2.0;
                eta_[a] = ea;
                eta_[b] = ea + d * (tilt.q - tilt.r) / 2.0;
                onsite_[a] = tilt.F * xi_[a];
                onsite_[b] = tilt.F * xi_[b];
            }
    }

    std::size_t size() const { return std::size_t(2) * std::size_t(n1_) * std::size_t(n2_); }
    int extent1() const { return n1_; }
    int extent2() const { return n2_; }
    const LatticeSpec& lattice() const { return lat_; }
    const TiltSpec& tilt() const { return tilt_; }

    std::size_t index(int i1, int i2, int s) const {
        return std::size_t(2) * (std::size_t(i1) * std::size_t(n2_) + std::size_t(i2)) + std::size_t(s);
    }
    /// Chain index j = r n1 + q n2 of the cell (both sublattices).
    int chain_index(int i1, int i2) const {
        return tilt_.r * (i1 - n1_ / 2) + tilt_.q * (i2 - n2_ / 2);
    }
    /// eta of the cell's A site.
    double cell_eta(int i1, int i2) const { return eta_[index(i1, i2, 0)]; }

    const std::vector<double>& xi() const { return xi_; }
    const std::vector<double>& eta() const { return eta_; }
    const std::vector<double>& onsite() const { return onsite_; }

    /// out = H in.
    void apply(const StateVector& in, StateVector& out) const {
        out.resize(size());
        for (std::size_t k = 0; k < size(); ++k)
            out[k] = onsite_[k] * in[k];
        const double t1 = lat_.t1, t2 = lat_.t2, t3 = lat_.t3;
        for (int i1 = 0; i1 < n1_; ++i1)
            for (int i2 = 0; i2 < n2_; ++i2) {
                const auto a = index(i1, i2, 0);
                const auto couple = [&](std::size_t b, double t) {
                    out[a] -= t * in[b];
                    out[b] -= t * in[a];
                };
                couple(index(i1, i2, 1), t3);
                if (i1 > 0)
                    couple(index(i1 - 1, i2, 1), t1);
                if (i2 > 0)
                    couple(index(i1, i2 - 1, 1), t1);
                if (i1 > 0 && i2 > 0)
                    couple(index(i1 - 1, i2 - 1, 1), t2);
            }
    }

    /// Gershgorin enclosure of the spectrum.
    std::pair<double, double> spectral_bounds() const {
        const auto [mn, mx] = std::minmax_element(onsite_.begin(), onsite_.end());
        const double hop = 2.0 * std::abs(lat_.t1) + std::abs(lat_.t2) + std::abs(lat_.t3);
        return {*mn - hop, *mx + hop};
    }

    /// Largest |amplitude| on the outermost `width` cells of the patch.
    double boundary_amplitude(const StateVector& psi, int width = 2) const {
        double worst = 0.0;
        for (int i1 = 0; i1 < n1_; ++i1)
            for (int i2 = 0; i2 < n2_; ++i2) {
                if (i1 >= width && i1 < n1_ - width && i2 >= width && i2 < n2_ - width)
                    continue;
                worst = std::max({worst, std::abs(psi[index(i1, i2, 0)]), std::abs(psi[index(i1, i2, 1)])});
            }
        return worst;
    }

private:
    LatticeSpec lat_;
    TiltSpec tilt_;
    int n1_, n2_;
    std::vector<double> xi_, eta_, onsite_;
};

inline Lattice2D build_lattice(const LatticeSpec& lat, const TiltSpec& tilt, int n1, int n2) {
    return Lattice2D(lat, tilt, n1, n2);
}

struct WavepacketState {
    StateVector amplitudes;
    double time = 0.0;

    double norm() const {
        double s = 0.0;
        for (const auto& v : amplitudes)
            s += std::norm(v);
        return s;
    }
};

struct SingleSite {};
struct GaussianPacket {
    double sigma = 4.0;  // length units
    double kappa0 = 0.0; // transverse momentum
};
using PacketKind = std::variant<SingleSite, GaussianPacket>;

/// Normalised packet centred on the A site of the central cell.
inline WavepacketState initial_packet(const Lattice2D& lattice, const PacketKind& kind) {
    WavepacketState state;
    state.amplitudes.assign(lattice.size(), cplx(0.0));
    const int c1 = lattice.extent1() / 2, c2 = lattice.extent2() / 2;
    if (std::holds_alternative<SingleSite>(kind)) {
        state.amplitudes[lattice.index(c1, c2, 0)] = 1.0;
        return state;
    }
    const auto& g = std::get<GaussianPacket>(kind);
    if (!(g.sigma > 0.0))
        throw ConfigError("gaussian packet width must be positive");
    const double cell = std::numbers::sqrt2 * lattice.lattice().a;
    const double room = (std::min(lattice.extent1(), lattice.extent2()) / 2 - 2) * cell;
    if (6.0 * g.sigma > room)
        throw ConfigError("gaussian packet (6 sigma = " + std::to_string(6.0 * g.sigma)
                          + ") does not fit inside the patch (" + std::to_string(room) + ")");
    const auto& xi = lattice.xi();
    const auto& eta = lattice.eta();
    double norm = 0.0;
    for (std::size_t k = 0; k < lattice.size(); ++k) {
        const double r2 = xi[k] * xi[k] + eta[k] * eta[k];
        state.amplitudes[k] = std::exp(-r2 / (4.0 * g.sigma * g.sigma)) * std::polar(1.0, g.kappa0 * eta[k]);
        norm += std::norm(state.amplitudes[k]);
    }
    const double s = 1.0 / std::sqrt(norm);
    for (auto& v : state.amplitudes)
        v *= s;
    return state;
}

/// exp(-i H dt) psi by Chebyshev expansion. `apply` computes out = H in and
/// [lo, hi] must enclose the spectrum of H.
template <class Apply>
void chebyshev_step(const Apply& apply, std::pair<double, double> bounds, StateVector& psi, double dt) {
    const double centre = 0.5 * (bounds.first + bounds.second);
    const double half = 0.5 * (bounds.second - bounds.first) * 1.01 + 1e-12;
    const double x = half * dt;
    const int terms = int(x + 12.0 * std::cbrt(x) + 30.0);
    const auto coeff = bessel_j_table(terms, x); // index terms + k holds J_k(x)

    const std::size_t n = psi.size();
    StateVector prev = psi, cur(n), next(n), tmp(n);
    const auto scaled = [&](const StateVector& in, StateVector& out) {
        apply(in, tmp);
        out.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            out[i] = (tmp[i] - centre * in[i]) / half;
    };
    StateVector result(n);
    const cplx c0 = coeff[std::size_t(terms)];
    for (std::size_t i = 0; i < n; ++i)
        result[i] = c0 * prev[i];
    scaled(prev, cur);
    cplx phase(0.0, -1.0); // (-i)^k
    for (int k = 1; k <= terms; ++k) {
        const cplx ck = 2.0 * phase * coeff[std::size_t(terms + k)];
        for (std::size_t i = 0; i < n; ++i)
            result[i] += ck * cur[i];
        if (k == terms)
            break;
        scaled(cur, next);
        for (std::size_t i = 0; i < n; ++i)
            next[i] = 2.0 * next[i] - prev[i];
        std::swap(prev, cur);
        std::swap(cur, next);
        phase *= cplx(0.0, -1.0);
    }
    const cplx global = std::polar(1.0, -centre * dt);
    for (std::size_t i = 0; i < n; ++i)
        psi[i] = global * result[i];
}

struct SpreadTrajectory {
    std::vector<double> times;
    std::vector<double> sigma_eta;
    std::vector<double> sigma_xi;
    std::vector<double> norm;
    std::vector<double> energy;
    double ballistic_velocity = 0.0;
    double r_squared = 0.0;
    bool reliable = false; // r_squared >= 0.99 over the fit window
};

struct PropagationOptions {
    double duration = 40.0;
    double max_step = 0.0;      // Chebyshev step; <= 0 means one step per sample
    int samples = 100;
    double boundary_tolerance = 1e-8;
    double norm_tolerance = 1e-6;
    int boundary_width = 2;
    double fit_begin = 0.3;     // fractions of the duration
    double fit_end = 0.9;
};

namespace detail {
inline double expectation(const Lattice2D& lattice, const StateVector& psi) {
    StateVector h;
    lattice.apply(psi, h);
    cplx e = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i)
        e += std::conj(psi[i]) * h[i];
    return e.real();
}

inline double spread(const std::vector<double>& coord, const StateVector& psi) {
    double n = 0, m1 = 0, m2 = 0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double p = std::norm(psi[i]);
        n += p;
        m1 += p * coord[i];
        m2 += p * coord[i] * coord[i];
    }
    m1 /= n;
    m2 /= n;
    return std::sqrt(std::max(0.0, m2 - m1 * m1));
}
} // namespace detail

/// Evolves `state` in place for opts.duration, sampling the spreads every
/// duration / samples. Throws NumericalError on norm drift or when the
/// packet reaches the patch boundary.
inline SpreadTrajectory propagate(WavepacketState& state, const Lattice2D& lattice,
                                  const PropagationOptions& opts = {}) {
    if (state.amplitudes.size() != lattice.size())
        throw ConfigError("state does not match the lattice");
    if (!(opts.duration > 0.0) || opts.samples < 1)
        throw ConfigError("propagation needs a positive duration and at least one sample");
    const double norm0 = state.norm();
    if (std::abs(norm0 - 1.0) > 1e-12)
        throw ConfigError("initial state is not normalised");

    const auto bounds = lattice.spectral_bounds();
    const auto apply = [&](const StateVector& in, StateVector& out) { lattice.apply(in, out); };
    const double interval = opts.duration / opts.samples;
    const int substeps = opts.max_step > 0.0 ? std::max(1, int(std::ceil(interval / opts.max_step))) : 1;

    SpreadTrajectory traj;
    const auto record = [&] {
        traj.times.push_back(state.time);
        traj.sigma_eta.push_back(detail::spread(lattice.eta(), state.amplitudes));
        traj.sigma_xi.push_back(detail::spread(lattice.xi(), state.amplitudes));
        traj.norm.push_back(state.norm());
        traj.energy.push_back(detail::expectation(lattice, state.amplitudes));
    };
    record();
    for (int s = 0; s < opts.samples; ++s) {
        for (int k = 0; k < substeps; ++k)
            chebyshev_step(apply, bounds, state.amplitudes, interval / substeps);
        state.time += interval;
        record();
        const double drift = std::abs(traj.norm.back() - norm0);
        if (drift > opts.norm_tolerance)
            throw NumericalError("norm drift " + std::to_string(drift) + " at t=" + std::to_string(state.time));
        const double edge = lattice.boundary_amplitude(state.amplitudes, opts.boundary_width);
        if (edge > opts.boundary_tolerance)
            throw NumericalError("wavepacket reached the patch boundary (amplitude "
                                 + std::to_string(edge) + ") at t=" + std::to_string(state.time));
    }

    std::vector<double> ft, fs;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double t = traj.times[i];
        if (t >= opts.fit_begin * opts.duration - 1e-12 && t <= opts.fit_end * opts.duration + 1e-12) {
            ft.push_back(t);
            fs.push_back(traj.sigma_eta[i]);
        }
    }
    if (ft.size() >= 2) {
        const auto fit = least_squares(ft, fs);
        traj.ballistic_velocity = fit.slope;
        traj.r_squared = fit.r_squared;
        traj.reliable = fit.r_squared >= 0.99;
    }
    return traj;
}

/// 2D state psi(n1, n2, s) = exp(-i kappa eta_cell) phi_s(j) for a chain
/// vector phi over j in [-J, J] (layout of ReducedHamiltonian). With this
/// phase convention the lattice Hamiltonian acts on phi exactly as the
/// reduced chain Hamiltonian at the same kappa.
inline StateVector embed_plane_wave(const Lattice2D& lattice, double kappa, const Eigen::VectorXcd& phi, int J) {
    StateVector psi(lattice.size(), cplx(0.0));
    for (int i1 = 0; i1 < lattice.extent1(); ++i1)
        for (int i2 = 0; i2 < lattice.extent2(); ++i2) {
            const int j = lattice.chain_index(i1, i2);
            if (j < -J || j > J)
                continue;
            const cplx phase = std::polar(1.0, -kappa * lattice.cell_eta(i1, i2));
            for (int s = 0; s < 2; ++s)
                psi[lattice.index(i1, i2, s)] = phase * phi[2 * (j + J) + s];
        }
    return psi;
}

/// True when every bond of the cell stays inside the patch.
inline bool interior_cell(const Lattice2D& lattice, int i1, int i2, int margin = 1) {
    return i1 >= margin && i2 >= margin && i1 < lattice.extent1() - margin && i2 < lattice.extent2() - margin;
}

/// max over interior sites of |(H_2D psi) - embed(H_chain phi)| for
/// psi = embed(phi), phi a fixed pseudo-random chain vector.
inline double plane_wave_residual(const Lattice2D& lattice, double kappa) {
    const auto& tilt = lattice.tilt();
    const int J = (std::abs(tilt.r) + std::abs(tilt.q)) * (std::max(lattice.extent1(), lattice.extent2()) / 2 + 2);
    const auto h = build_reduced_hamiltonian(lattice.lattice(), tilt, kappa, J);
    Eigen::VectorXcd phi(h.dimension());
    for (Eigen::Index i = 0; i < phi.size(); ++i)
        phi[i] = cplx(std::sin(1.3 * double(i) + 0.2), std::cos(0.7 * double(i) * double(i) + 1.1));
    const Eigen::VectorXcd hphi = h.matrix * phi;
    const auto psi = embed_plane_wave(lattice, kappa, phi, J);
    const auto expected = embed_plane_wave(lattice, kappa, hphi, J);
    StateVector hpsi;
    lattice.apply(psi, hpsi);
    double worst = 0.0;
    for (int i1 = 0; i1 < lattice.extent1(); ++i1)
        for (int i2 = 0; i2 < lattice.extent2(); ++i2) {
            if (!interior_cell(lattice, i1, i2))
                continue;
            for (int s = 0; s < 2; ++s) {
                const auto k = lattice.index(i1, i2, s);
                worst = std::max(worst, std::abs(hpsi[k] - expected[k]));
            }
        }
    return worst;
}

/// Evolves a plane wave built on the chain vector e_(0, A) for `steps`
/// Chebyshev steps of length duration / steps on the 2D patch, evolves the
/// same chain vector exactly under the reduced Hamiltonian, and returns the
/// largest amplitude mismatch over cells at least `margin` cells away from
/// the patch edges (outside that region the truncated plane wave feels the
/// boundary).
inline double plane_wave_evolution_residual(const Lattice2D& lattice, double kappa, double duration, int steps,
                                            int margin) {
    if (steps < 1 || !(duration > 0.0))
        throw ConfigError("evolution check needs steps >= 1 and a positive duration");
    const auto& tilt = lattice.tilt();
    const int J = (std::abs(tilt.r) + std::abs(tilt.q)) * (std::max(lattice.extent1(), lattice.extent2()) / 2 + 2);
    const auto h = build_reduced_hamiltonian(lattice.lattice(), tilt, kappa, J);
    Eigen::VectorXcd phi = Eigen::VectorXcd::Zero(h.dimension());
    phi[h.index(0, 0)] = 1.0;

    auto psi = embed_plane_wave(lattice, kappa, phi, J);
    const auto apply = [&](const StateVector& in, StateVector& out) { lattice.apply(in, out); };
    for (int s = 0; s < steps; ++s)
        chebyshev_step(apply, lattice.spectral_bounds(), psi, duration / steps);

    const auto eig = eigen_spectrum(h, true);
    const Eigen::VectorXcd coeff = eig.vectors.adjoint() * phi;
    Eigen::VectorXcd phase(coeff.size());
    for (Eigen::Index k = 0; k < coeff.size(); ++k)
        phase[k] = std::polar(1.0, -eig.values[k] * duration) * coeff[k];
    const Eigen::VectorXcd phi_t = eig.vectors * phase;
    const auto expected = embed_plane_wave(lattice, kappa, phi_t, J);

    double worst = 0.0;
    for (int i1 = 0; i1 < lattice.extent1(); ++i1)
        for (int i2 = 0; i2 < lattice.extent2(); ++i2) {
            if (!interior_cell(lattice, i1, i2, margin))
                continue;
            for (int s = 0; s < 2; ++s) {
                const auto k = lattice.index(i1, i2, s);
                worst = std::max(worst, std::abs(psi[k] - expected[k]));
            }
        }
    return worst;
}

} // namespace stark
