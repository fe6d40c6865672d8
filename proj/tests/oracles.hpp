#pragma once

// Reference implementations used only by the tests. They deliberately take
// different routes from the library code they check.

#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

/// J_n(z) from the ascending power series, accumulated in long double.
inline long double bessel_series(int n, long double z) {
    long double sign = 1.0L;
    if (n < 0) {
        n = -n;
        if (n & 1)
            sign = -sign;
    }
    const long double h = z / 2.0L;
    long double term = 1.0L;
    for (int k = 1; k <= n; ++k)
        term *= h / k;
    long double sum = term;
    for (int k = 1; k < 400; ++k) {
        term *= -h * h / (k * (long double)(k + n));
        sum += term;
        if (std::fabs(term) < 1e-30L * std::fabs(sum) && k > h)
            break;
    }
    return sign * sum;
}

/// k-th positive zero of J_n by scanning the series with step 0.01 and bisecting.
inline double bessel_root_series(int n, int k) {
    long double x = n > 0 ? n : 0.01L;
    long double fx = bessel_series(n, x);
    int found = 0;
    for (;;) {
        const long double y = x + 0.01L;
        const long double fy = bessel_series(n, y);
        if ((fx < 0) != (fy < 0) && ++found == k) {
            long double a = x, b = y, fa = fx;
            for (int it = 0; it < 200; ++it) {
                const long double m = (a + b) / 2;
                const long double fm = bessel_series(n, m);
                if ((fm < 0) == (fa < 0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            return double((a + b) / 2);
        }
        x = y;
        fx = fy;
    }
}

/// The four-term first-order average for the (2, 1) tilt written out by hand:
///   <X> = (t3 - t2) [ J0(z1) J1(z2) + J3(z1) J0(z2) cos(5 kd)
///                     - J3(z1) J2(z2) cos(5 kd) - J6(z1) J1(z2) cos(10 kd) ]
/// with d = sqrt(2/5) a, z1 = 8 t1 / (F d), z2 = 4 (t2 + t3) / (3 F d).
inline double mean_x_21(double t1, double t2, double t3, double F, double kappa, double a = 1.0) {
    const double d = std::sqrt(2.0 / 5.0) * a;
    const double z1 = 8.0 * t1 / (F * d), z2 = 4.0 * (t2 + t3) / (3.0 * F * d);
    const auto J = [](int n, double z) { return double(bessel_series(n, z)); };
    const double c5 = std::cos(5.0 * kappa * d), c10 = std::cos(10.0 * kappa * d);
    return (t3 - t2)
        * (J(0, z1) * J(1, z2) + J(3, z1) * J(0, z2) * c5 - J(3, z1) * J(2, z2) * c5 - J(6, z1) * J(1, z2) * c10);
}

} // namespace oracle
