#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "stark_lattice/special_fn.hpp"

using stark::bessel_j;
using stark::bessel_root;

TEST(BesselJ, ValuesAtZero) {
    EXPECT_EQ(bessel_j(0, 0.0), 1.0);
    for (int n : {-3, -1, 1, 2, 7})
        EXPECT_EQ(bessel_j(n, 0.0), 0.0);
}

TEST(BesselJ, MatchesSeriesOracle) {
    for (int n = 0; n <= 12; ++n)
        for (double z : {1e-3, 0.1, 0.5, 1.0, 2.404825557695773, 3.7, 5.5, 8.0, 12.0, 15.0}) {
            const double expected = double(oracle::bessel_series(n, z));
            EXPECT_NEAR(bessel_j(n, z), expected, 1e-12) << "n=" << n << " z=" << z;
        }
}

TEST(BesselJ, MatchesStandardLibraryAtLargeArgument) {
    // third route, for arguments where the series loses precision
    for (int n : {0, 1, 3, 6, 20})
        for (double z : {30.0, 75.5, 200.0, 1234.5}) {
            EXPECT_NEAR(bessel_j(n, z), std::cyl_bessel_j(double(n), z), 2e-12) << "n=" << n << " z=" << z;
        }
}

TEST(BesselJ, ParityInOrderAndArgument) {
    for (double z : {0.5, 1.0, 2.0}) {
        EXPECT_DOUBLE_EQ(bessel_j(-3, z), -bessel_j(3, z));
        EXPECT_DOUBLE_EQ(bessel_j(-2, z), bessel_j(2, z));
        EXPECT_DOUBLE_EQ(bessel_j(3, -z), -bessel_j(3, z));
    }
}

TEST(BesselJ, Normalization) {
    for (double z = 0.25; z <= 20.0; z += 0.75) {
        const int N = int(z) + 40;
        double s = bessel_j(0, z) * bessel_j(0, z);
        for (int n = 1; n <= N; ++n)
            s += 2.0 * bessel_j(n, z) * bessel_j(n, z);
        EXPECT_NEAR(s, 1.0, 1e-10) << "z=" << z;
    }
}

TEST(BesselJ, RecurrenceResidual) {
    for (double z = 0.1; z <= 50.0; z += 0.37)
        for (int n = 1; n <= 30; ++n) {
            const double res = bessel_j(n - 1, z) + bessel_j(n + 1, z) - (2.0 * n / z) * bessel_j(n, z);
            EXPECT_LE(std::abs(res), 1e-9) << "n=" << n << " z=" << z;
        }
}

TEST(BesselJ, SmallArgumentScaling) {
    const double z = 1e-4;
    double factorial = 1.0;
    for (int n = 0; n <= 6; ++n) {
        if (n > 0)
            factorial *= n;
        const double expected = 1.0 / (std::pow(2.0, n) * factorial);
        EXPECT_NEAR(bessel_j(n, z) / std::pow(z, n), expected, 1e-7 * expected) << "n=" << n;
    }
}

TEST(BesselJ, TableAgreesWithPointEvaluation) {
    const auto tab = stark::bessel_j_table(8, -3.3);
    for (int k = -8; k <= 8; ++k)
        EXPECT_NEAR(tab[std::size_t(k + 8)], bessel_j(k, -3.3), 1e-15);
}

TEST(BesselJ, RejectsNonFinite) {
    EXPECT_THROW(bessel_j(0, std::nan("")), stark::ConfigError);
    EXPECT_THROW(bessel_j(1, INFINITY), stark::ConfigError);
}

TEST(BesselRoot, AgreesWithSeriesBisection) {
    // frozen from oracle::bessel_root_series
    EXPECT_NEAR(bessel_root(0, 1), 2.404825557695773, 1e-9);
    EXPECT_NEAR(bessel_root(3, 1), 6.380161895923984, 1e-9);
    for (int n : {0, 1, 3, 6})
        for (int k : {1, 2, 3})
            EXPECT_NEAR(bessel_root(n, k), oracle::bessel_root_series(n, k), 1e-9) << n << "," << k;
}

TEST(BesselRoot, IncreasingInK) {
    for (int n = 0; n <= 6; ++n)
        for (int k = 1; k < 5; ++k)
            EXPECT_LT(bessel_root(n, k), bessel_root(n, k + 1));
}

TEST(BesselRoot, RejectsBadIndices) {
    EXPECT_THROW(bessel_root(-1, 1), stark::ConfigError);
    EXPECT_THROW(bessel_root(0, 0), stark::ConfigError);
}
