#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

#include "errors.hpp"

namespace stark {

namespace detail {

// Miller's backward recurrence, normalised with J_0 + 2 sum_k J_2k = 1.
// Returns J_0..J_nmax at x > 0. The start index keeps the neglected tail
// far below 1e-16.
inline std::vector<double> bessel_j_miller(int nmax, double x) {
    const double top = std::max(double(nmax), x);
    int start = int(top + 25.0 + 6.0 * std::cbrt(top) + 2.0 * std::sqrt(top));
    start += start & 1;

    constexpr double big = 1e250;
    std::vector<double> out(static_cast<std::size_t>(nmax + 1), 0.0);
    double next = 0.0;   // J_{k+1}
    double cur = 1e-300; // J_k
    double norm = 0.0;
    for (int k = start; k > 0; --k) {
        const double prev = (2.0 * k / x) * cur - next;
        next = cur;
        cur = prev; // J_{k-1}
        if (std::abs(cur) > big) {
            cur /= big;
            next /= big;
            norm /= big;
            for (auto& v : out)
                v /= big;
        }
        if (k - 1 <= nmax)
            out[static_cast<std::size_t>(k - 1)] = cur;
        if (((k - 1) & 1) == 0 && k - 1 > 0)
            norm += 2.0 * cur;
    }
    norm += cur;
    for (auto& v : out)
        v /= norm;
    return out;
}

} // namespace detail

/// Bessel function of the first kind, integer order.
inline double bessel_j(int n, double z) {
    if (!std::isfinite(z))
        throw ConfigError("bessel_j: non-finite argument");
    double sign = 1.0;
    if (n < 0) {
        n = -n;
        if (n & 1)
            sign = -sign;
    }
    if (z == 0.0)
        return n == 0 ? sign : 0.0;
    if (z < 0.0) {
        z = -z;
        if (n & 1)
            sign = -sign;
    }
    return sign * detail::bessel_j_miller(n, z).back();
}

/// J_k(z) for k = -kmax..kmax from a single recurrence; element i holds
/// J_{i - kmax}(z).
inline std::vector<double> bessel_j_table(int kmax, double z) {
    if (!std::isfinite(z))
        throw ConfigError("bessel_j_table: non-finite argument");
    std::vector<double> pos(static_cast<std::size_t>(kmax + 1), 0.0);
    if (z == 0.0) {
        pos[0] = 1.0;
    } else {
        pos = detail::bessel_j_miller(kmax, std::abs(z));
        if (z < 0.0)
            for (int k = 1; k <= kmax; k += 2)
                pos[static_cast<std::size_t>(k)] = -pos[static_cast<std::size_t>(k)];
    }
    std::vector<double> out(static_cast<std::size_t>(2 * kmax + 1));
    for (int k = 0; k <= kmax; ++k) {
        const double v = pos[static_cast<std::size_t>(k)];
        out[static_cast<std::size_t>(kmax + k)] = v;
        out[static_cast<std::size_t>(kmax - k)] = (k & 1) ? -v : v;
    }
    return out;
}

/// k-th positive zero of J_n. Bracketed on a pi/4 grid starting at x = n,
/// then bisected to ~1e-13.
inline double bessel_root(int n, int k) {
    if (n < 0 || k < 1)
        throw ConfigError("bessel_root: need n >= 0 and k >= 1");
    constexpr double step = std::numbers::pi / 4.0;
    double lo = std::max(double(n), step);
    double flo = bessel_j(n, lo);
    int found = 0;
    for (;;) {
        const double hi = lo + step;
        const double fhi = bessel_j(n, hi);
        if (flo == 0.0 || (flo < 0.0) != (fhi < 0.0)) {
            if (++found == k) {
                double a = lo, b = hi, fa = flo;
                if (fa == 0.0)
                    return a;
                while (b - a > 1e-13 * std::max(1.0, b)) {
                    const double m = 0.5 * (a + b);
                    const double fm = bessel_j(n, m);
                    if ((fm < 0.0) == (fa < 0.0)) {
                        a = m;
                        fa = fm;
                    } else {
                        b = m;
                    }
                }
                return 0.5 * (a + b);
            }
        }
        lo = hi;
        flo = fhi;
    }
}

} // namespace stark
