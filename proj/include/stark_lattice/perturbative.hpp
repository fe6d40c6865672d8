#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <cstdlib>
#include <numeric>
#include <string>
#include <vector>

#include "core_model.hpp"
#include "errors.hpp"
#include "exact_spectrum.hpp"
#include "fitting.hpp"
#include "special_fn.hpp"

namespace stark {

/// Flat Wannier-Stark ladder of the simple square lattice (t3 == t2):
/// E_p = F d g p / 2 with g = gcd(r + q, |r - q|). The factor g / 2 is the
/// ratio of periods between the tilted two-sublattice frame and the square
/// lattice frame rotated by pi/4.
inline double flat_ladder(const TiltSpec& tilt, int p) {
    const int g = std::gcd(tilt.r + tilt.q, std::abs(tilt.r - tilt.q));
    return tilt.stark_step() * g * p / 2.0;
}

inline double flat_ladder_spacing(const TiltSpec& tilt) { return flat_ladder(tilt, 1); }

enum class Parity { Even, Odd };

/// One resonant (n, m) pair of the first-order average <X>:
///   (r - q) m = -(r + q) (1 + n).
/// Its contribution, in units of (t3 - t2), is
///   amplitude_sign * J_|m|(z1) J_|n|(z2) * cos(K kappa d)    (odd n + m)
///   amplitude_sign * J_|m|(z1) J_|n|(z2) * i sin(K kappa d)  (even n + m)
/// where amplitude_sign folds the overall minus sign together with the
/// J_{-k} = (-1)^k J_k reductions.
struct PerturbTerm {
    int n = 0;
    int m = 0;
    int bessel_m_index = 0;
    int bessel_n_index = 0;
    int harmonic = 0; // K = (r^2 + q^2)(1 + n) / (r - q)
    Parity parity = Parity::Odd;
    int order = 0;    // |n| + |m|
    int amplitude_sign = 1;

    bool kappa_dependent() const { return harmonic != 0; }

    friend bool operator==(const PerturbTerm&, const PerturbTerm&) = default;
};

struct BesselArguments {
    double z1 = 0.0; // 8 t1 / (F d (r - q))
    double z2 = 0.0; // 4 (t2 + t3) / (F d (r + q))
};

inline void require_generic(const TiltSpec& tilt, const char* what) {
    if (classify_orientation(tilt) != OrientationClass::Generic)
        throw ConfigError(std::string(what) + ": needs a generic tilt (|r| != |q|), got ("
                          + std::to_string(tilt.r) + "," + std::to_string(tilt.q) + ")");
}

inline BesselArguments bessel_arguments(const LatticeSpec& lat, const TiltSpec& tilt) {
    require_generic(tilt, "bessel_arguments");
    const double fd = tilt.stark_step();
    if (!(fd > 0.0))
        throw ConfigError("F must be positive");
    return {8.0 * lat.t1 / (fd * (tilt.r - tilt.q)), 4.0 * (lat.t2 + lat.t3) / (fd * (tilt.r + tilt.q))};
}

inline std::vector<PerturbTerm> enumerate_terms(const TiltSpec& tilt, int max_order) {
    require_generic(tilt, "enumerate_terms");
    const int r = tilt.r, q = tilt.q;
    std::vector<PerturbTerm> out;
    for (int n = -max_order; n <= max_order; ++n) {
        const int rhs = -(r + q) * (1 + n);
        if (rhs % (r - q) != 0)
            continue;
        const int m = rhs / (r - q);
        PerturbTerm t;
        t.n = n;
        t.m = m;
        t.order = std::abs(n) + std::abs(m);
        if (t.order > max_order)
            continue;
        t.bessel_m_index = std::abs(m);
        t.bessel_n_index = std::abs(n);
        const int num = (r * r + q * q) * (1 + n);
        if (num % (r - q) != 0)
            throw NumericalError("non-integer harmonic in resonance enumeration");
        t.harmonic = num / (r - q);
        t.parity = ((n + m) % 2 == 0) ? Parity::Even : Parity::Odd;
        int sign = -1;
        if (m < 0 && (m & 1))
            sign = -sign;
        if (n < 0 && (n & 1))
            sign = -sign;
        t.amplitude_sign = sign;
        out.push_back(t);
    }
    std::sort(out.begin(), out.end(), [](const PerturbTerm& a, const PerturbTerm& b) {
        if (a.order != b.order)
            return a.order < b.order;
        if (std::abs(a.harmonic) != std::abs(b.harmonic))
            return std::abs(a.harmonic) < std::abs(b.harmonic);
        return a.n < b.n;
    });
    return out;
}

/// One quadruple of the second-order average <-i X' X*>:
///   nu_pm(n, m) = m (r - q) + (n +- 1)(r + q)
///   mu_pm(n, m) = (n +- 1)(r - q) - m (r + q)
/// First kind:  nu_+(n, m) == nu_-(n', m') != 0, weight -1.
/// Second kind: nu_+(n, m) == nu_+(n', m') != 0 and n + n' + m + m' odd, weight +1.
/// Contribution: weight (t3 - t2)^2 / (d nu) J_m(z1) J_n(z2) J_m'(z1) J_n'(z2)
///               cos(mu_difference kappa d / 2).
struct SecondOrderTerm {
    enum class Kind { Crossed, Parallel };

    int n = 0, m = 0, n2 = 0, m2 = 0;
    int nu_plus = 0;   // nu_+(n, m), the denominator
    int nu_minus = 0;  // nu_-(n', m') for Crossed, nu_+(n', m') for Parallel
    int mu_plus = 0;   // mu_+(n, m)
    int mu_minus = 0;  // mu_-(n', m') for Crossed, mu_+(n', m') for Parallel
    Kind kind = Kind::Crossed;

    int weight() const { return kind == Kind::Crossed ? -1 : 1; }
    int mu_difference() const { return mu_plus - mu_minus; }
};

namespace detail {
inline int nu_of(const TiltSpec& t, int n, int m, int s) { return m * (t.r - t.q) + (n + s) * (t.r + t.q); }
inline int mu_of(const TiltSpec& t, int n, int m, int s) { return (n + s) * (t.r - t.q) - m * (t.r + t.q); }
} // namespace detail

/// Quadruples with |n| + |m| + |n'| + |m'| <= max_order.
inline std::vector<SecondOrderTerm> enumerate_second_order(const TiltSpec& tilt, int max_order) {
    require_generic(tilt, "enumerate_second_order");
    std::vector<SecondOrderTerm> out;
    for (int n = -max_order; n <= max_order; ++n)
        for (int m = -max_order; m <= max_order; ++m) {
            const int o1 = std::abs(n) + std::abs(m);
            if (o1 > max_order)
                continue;
            const int nu = detail::nu_of(tilt, n, m, +1);
            if (nu == 0)
                continue;
            for (int n2 = -max_order; n2 <= max_order; ++n2)
                for (int m2 = -max_order; m2 <= max_order; ++m2) {
                    if (o1 + std::abs(n2) + std::abs(m2) > max_order)
                        continue;
                    if (detail::nu_of(tilt, n2, m2, -1) == nu) {
                        out.push_back({n, m, n2, m2, nu, nu, detail::mu_of(tilt, n, m, +1),
                                       detail::mu_of(tilt, n2, m2, -1), SecondOrderTerm::Kind::Crossed});
                    }
                    if (detail::nu_of(tilt, n2, m2, +1) == nu && ((n + n2 + m + m2) % 2 != 0)) {
                        out.push_back({n, m, n2, m2, nu, nu, detail::mu_of(tilt, n, m, +1),
                                       detail::mu_of(tilt, n2, m2, +1), SecondOrderTerm::Kind::Parallel});
                    }
                }
        }
    return out;
}

struct SeriesOptions {
    int max_order = 7;
    int term_limit = 0;       // keep only the first N first-order terms (0: all)
    bool second_order = true;
};

/// First- and second-order Bessel series for fixed lattice, tilt and force.
/// Bessel values are tabulated once; evaluation at a kappa is then cheap.
class BesselSeries {
public:
    BesselSeries(const LatticeSpec& lat, const TiltSpec& tilt, SeriesOptions opts = {})
        : lat_(lat), tilt_(tilt), opts_(opts), args_(bessel_arguments(lat, tilt)) {
        if (opts.max_order < 0)
            throw ConfigError("max_order must be non-negative");
        terms_ = enumerate_terms(tilt, opts.max_order);
        if (opts.term_limit > 0 && std::size_t(opts.term_limit) < terms_.size())
            terms_.resize(std::size_t(opts.term_limit));
        if (opts.second_order)
            second_ = enumerate_second_order(tilt, opts.max_order);
        j1_ = bessel_j_table(opts.max_order, args_.z1);
        j2_ = bessel_j_table(opts.max_order, args_.z2);
    }

    const std::vector<PerturbTerm>& terms() const { return terms_; }
    const std::vector<SecondOrderTerm>& second_order_terms() const { return second_; }
    const BesselArguments& arguments() const { return args_; }
    double epsilon() const { return 1.0 / tilt_.F; }

    /// <X>(kappa).
    cplx mean_x(double kappa) const {
        const double gamma = lat_.t3 - lat_.t2;
        const double kd = kappa * tilt_.d;
        cplx sum = 0.0;
        for (const auto& t : terms_) {
            const double amp = t.amplitude_sign * jz1(t.bessel_m_index) * jz2(t.bessel_n_index);
            if (t.parity == Parity::Odd)
                sum += amp * std::cos(t.harmonic * kd);
            else
                sum += cplx(0.0, amp * std::sin(t.harmonic * kd));
        }
        return gamma * sum;
    }

    /// <-i X' X*>(kappa); real by construction.
    double second_order(double kappa) const {
        const double gamma = lat_.t3 - lat_.t2;
        const double kd = kappa * tilt_.d;
        double sum = 0.0;
        for (const auto& s : second_) {
            const double b = jz1(s.m) * jz2(s.n) * jz1(s.m2) * jz2(s.n2);
            sum += s.weight() * b / (tilt_.d * s.nu_plus) * std::cos(s.mu_difference() * kd / 2.0);
        }
        return gamma * gamma * sum;
    }

    /// Correction lambda(kappa) to the flat ladder. For odd r + q every term
    /// has odd n + m, <X> is real and the band follows its signed value;
    /// otherwise the modulus form applies.
    double lambda(double kappa) const {
        const cplx x = mean_x(kappa);
        const double a = opts_.second_order ? epsilon() * second_order(kappa) : 0.0;
        const bool real_branch = ((tilt_.r + tilt_.q) % 2) != 0;
        if (real_branch) {
            const double s = x.real() < 0.0 ? -1.0 : 1.0;
            return s * std::sqrt(x.real() * x.real() + a * a);
        }
        return std::sqrt(std::norm(x) + a * a);
    }

private:
    double jz1(int k) const { return j1_[std::size_t(k + opts_.max_order)]; }
    double jz2(int k) const { return j2_[std::size_t(k + opts_.max_order)]; }

    LatticeSpec lat_;
    TiltSpec tilt_;
    SeriesOptions opts_;
    BesselArguments args_;
    std::vector<PerturbTerm> terms_;
    std::vector<SecondOrderTerm> second_;
    std::vector<double> j1_, j2_;
};

inline cplx mean_X(const LatticeSpec& lat, const TiltSpec& tilt, double kappa, int max_order = 7) {
    return BesselSeries(lat, tilt, {max_order, 0, false}).mean_x(kappa);
}

inline double second_order_mean(const LatticeSpec& lat, const TiltSpec& tilt, double kappa,
                                 int max_order = 7) {
    return BesselSeries(lat, tilt, {max_order, 0, true}).second_order(kappa);
}

enum class AnalyticBranch { Generic, DiagonalA2, AntiDiagonalA3 };

/// +-lambda(kappa) about the ladder reference energy.
struct AnalyticDispersion {
    std::vector<double> kappas;
    std::vector<double> e_plus;
    std::vector<double> e_minus;
    int order_used = 0;
    AnalyticBranch branch_kind = AnalyticBranch::Generic;
};

/// Closed form for (r, q) = (1, 1):
///   E = +-sqrt((t2 - t3)^2 J_1(z)^2 + 4 t1^2 cos^2(kappa d)),  z = 2 (t2 + t3) / (F d).
inline double diagonal_dispersion(const LatticeSpec& lat, const TiltSpec& tilt, double kappa) {
    const double z = 2.0 * (lat.t2 + lat.t3) / tilt.stark_step();
    const double j = bessel_j(1, z);
    const double c = std::cos(kappa * tilt.d);
    const double g = lat.t2 - lat.t3;
    return std::sqrt(g * g * j * j + 4.0 * lat.t1 * lat.t1 * c * c);
}

/// Closed form for (r, q) = (1, -1):
///   E = +-sqrt((t2 - t3)^2 J_0(z)^2 sin^2(kappa d) + (t2 + t3)^2 cos^2(kappa d)),  z = 4 t1 / (F d).
inline double anti_diagonal_dispersion(const LatticeSpec& lat, const TiltSpec& tilt, double kappa) {
    const double z = 4.0 * lat.t1 / tilt.stark_step();
    const double j = bessel_j(0, z);
    const double s = std::sin(kappa * tilt.d), c = std::cos(kappa * tilt.d);
    const double g = lat.t2 - lat.t3, h = lat.t2 + lat.t3;
    return std::sqrt(g * g * j * j * s * s + h * h * c * c);
}

inline AnalyticDispersion dispersion_analytic(const LatticeSpec& lat, const TiltSpec& tilt,
                                              const std::vector<double>& grid, SeriesOptions opts = {}) {
    AnalyticDispersion out;
    out.kappas = grid;
    out.e_plus.resize(grid.size());
    out.e_minus.resize(grid.size());
    switch (classify_orientation(tilt)) {
    case OrientationClass::Generic: {
        const BesselSeries series(lat, tilt, opts);
        for (std::size_t i = 0; i < grid.size(); ++i)
            out.e_plus[i] = series.lambda(grid[i]);
        out.order_used = opts.max_order;
        out.branch_kind = AnalyticBranch::Generic;
        break;
    }
    case OrientationClass::Diagonal:
        for (std::size_t i = 0; i < grid.size(); ++i)
            out.e_plus[i] = diagonal_dispersion(lat, tilt, grid[i]);
        out.order_used = 1;
        out.branch_kind = AnalyticBranch::DiagonalA2;
        break;
    case OrientationClass::AntiDiagonal:
        for (std::size_t i = 0; i < grid.size(); ++i)
            out.e_plus[i] = anti_diagonal_dispersion(lat, tilt, grid[i]);
        out.order_used = 1;
        out.branch_kind = AnalyticBranch::AntiDiagonalA3;
        break;
    }
    for (std::size_t i = 0; i < grid.size(); ++i)
        out.e_minus[i] = -out.e_plus[i];
    return out;
}

inline double width_analytic(const AnalyticDispersion& disp) {
    if (disp.e_plus.empty())
        return 0.0;
    const auto [mn, mx] = std::minmax_element(disp.e_plus.begin(), disp.e_plus.end());
    return *mx - *mn;
}

/// Max pointwise deviation between an analytic branch and a tracked band,
/// each centred on its kappa average; the better of the two branches.
inline double max_deviation(const AnalyticDispersion& disp, const DispersionCurve& band) {
    if (disp.e_plus.size() != band.energies.size())
        throw ConfigError("analytic and numeric curves sampled on different grids");
    const auto mean = [](const std::vector<double>& v) {
        return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
    };
    const double mb = band.mean();
    double best = std::numeric_limits<double>::infinity();
    for (const auto* branch : {&disp.e_plus, &disp.e_minus}) {
        const double ma = mean(*branch);
        double dev = 0.0;
        for (std::size_t i = 0; i < branch->size(); ++i)
            dev = std::max(dev, std::abs(((*branch)[i] - ma) - (band.energies[i] - mb)));
        best = std::min(best, dev);
    }
    return best;
}

/// Forces at which the first-order band collapses, largest F first.
///
/// For t3 == -t2, z2 vanishes and only the n = 0 resonance survives, so the
/// width is proportional to |J_|m*|(8 t1 / (F d (r - q)))| and the collapses
/// sit at its Bessel zeros. Otherwise the analytic width is scanned over F
/// and its near-zero local minima are refined numerically.
inline std::vector<double> collapse_predict(const LatticeSpec& lat, const TiltSpec& tilt, int k_max,
                                            int max_order = 7) {
    require_generic(tilt, "collapse_predict");
    if (k_max <= 0)
        return {};
    const double scale = std::abs(lat.t3 + lat.t2);
    if (scale <= 1e-12 * std::max(1.0, lat.hopping_sum())) {
        const auto terms = enumerate_terms(tilt, max_order);
        const auto it = std::find_if(terms.begin(), terms.end(),
                                     [](const PerturbTerm& t) { return t.n == 0 && t.kappa_dependent(); });
        if (it == terms.end())
            throw NumericalError("no kappa-dependent first-order term at order " + std::to_string(max_order));
        std::vector<double> out;
        for (int k = 1; k <= k_max; ++k) {
            const double root = bessel_root(it->bessel_m_index, k);
            out.push_back(8.0 * std::abs(lat.t1) / (root * tilt.d * std::abs(tilt.r - tilt.q)));
        }
        return out;
    }

    const auto grid = kappa_grid(tilt, 64);
    const auto width_at = [&](double F) {
        return width_analytic(dispersion_analytic(lat, with_force(tilt, F, lat), grid, {max_order, 0, true}));
    };
    const double t = std::max(lat.hopping_sum(), 1e-12);
    const int samples = 600;
    const double f_lo = 0.2 * t, f_hi = 60.0 * t;
    std::vector<double> fs(samples), ws(samples);
    for (int i = 0; i < samples; ++i) {
        fs[i] = f_lo * std::pow(f_hi / f_lo, double(i) / (samples - 1));
        ws[i] = width_at(fs[i]);
    }
    std::vector<double> out;
    for (int i = samples - 2; i >= 1 && int(out.size()) < k_max; --i) {
        if (!(ws[i] <= ws[i - 1] && ws[i] <= ws[i + 1]))
            continue;
        const auto best = golden_section_minimize(width_at, fs[i - 1], fs[i + 1], 1e-8 * fs[i + 1]);
        const double neighbour = std::max(*std::max_element(ws.begin(), ws.begin() + i),
                                          *std::max_element(ws.begin() + i, ws.end()));
        if (best.value <= 0.05 * neighbour)
            out.push_back(best.x);
    }
    return out;
}

} // namespace stark
