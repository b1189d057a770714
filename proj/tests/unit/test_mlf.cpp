#include "hilfer/error.hpp"
#include "hilfer/mlf.hpp"
#include "mlf_series_oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace hilfer;

TEST(Mlf, ExponentialCase) {
    EXPECT_NEAR(mlf(1.0, 1.0, -1.0), std::exp(-1.0), 1e-12);
    for (double z : {-0.3, -4.0, -12.0, -40.0, -300.0})
        EXPECT_NEAR(mlf(1.0, 1.0, z), std::exp(z), 1e-12) << z;
}

TEST(Mlf, TrigonometricCases) {
    EXPECT_NEAR(mlf(2.0, 1.0, -4.0), std::cos(2.0), 1e-12);
    EXPECT_NEAR(mlf(2.0, 2.0, -4.0), std::sin(2.0) / 2.0, 1e-12);
    for (double x : {0.1, 1.3, 3.9, 7.5, 20.0, 61.0}) {
        EXPECT_NEAR(mlf(2.0, 1.0, -x * x), std::cos(x), 1e-12) << x;
        EXPECT_NEAR(mlf(2.0, 2.0, -x * x), std::sin(x) / x, 1e-12) << x;
    }
}

TEST(Mlf, ExpMinusOneOverZ) {
    for (double z : {-0.5, -3.0, -9.0, -25.0, -500.0})
        EXPECT_NEAR(mlf(1.0, 2.0, z), std::expm1(z) / z, 1e-12) << z;
}

TEST(Mlf, ValueAtZeroIsReciprocalGamma) {
    for (double b : {0.25, 0.75, 1.0, 1.5, 2.0, 3.5})
        EXPECT_NEAR(mlf(1.5, b, 0.0), 1.0 / std::tgamma(b), 1e-14) << b;
    EXPECT_NEAR(mlf(1.5, 0.0, 0.0), 0.0, 1e-15);
    EXPECT_NEAR(mlf(1.5, -1.0, 0.0), 0.0, 1e-15);
}

TEST(Mlf, AgreesWithExtendedPrecisionSeries) {
    EXPECT_NEAR(mlf(1.5, 0.75, -2.0), oracle::mlf_series(1.5, 0.75, -2.0), 1e-12);
    for (double a : {1.1, 1.5, 1.9})
        for (double b : {0.5, 1.0, 1.75})
            for (double z : {-0.9, -4.0, -11.0, -17.0, -60.0, -900.0})
                EXPECT_NEAR(mlf(a, b, z), oracle::mlf_series(a, b, z), 1e-10) << a << " " << b << " " << z;
}

TEST(Mlf, SmallArgumentSeriesConsistency) {
    for (double z : {-1.0, -0.5, 0.3, 1.0}) {
        double sum = 0.0;
        for (int k = 0; k < 60; ++k)
            sum += std::pow(z, k) / std::tgamma(1.3 * k + 0.8);
        EXPECT_NEAR(mlf(1.3, 0.8, z), sum, 1e-12) << z;
    }
}

TEST(Mlf, NegativeBetaUsesPoleConvention) {
    EXPECT_NEAR(mlf(1.5, -0.5, -30.0), oracle::mlf_series(1.5, -0.5, -30.0), 1e-10);
    EXPECT_NEAR(mlf(1.5, -1.0, -30.0), oracle::mlf_series(1.5, -1.0, -30.0), 1e-10);
}

TEST(Mlf, RejectsInvalidInput) {
    EXPECT_THROW(mlf(0.0, 1.0, -1.0), ValidationError);
    EXPECT_THROW(mlf(1.5, 1.0, std::numeric_limits<double>::quiet_NaN()), ValidationError);
    EXPECT_THROW(mlf(1.5, 1.0, std::numeric_limits<double>::infinity()), ValidationError);
    EXPECT_THROW(mlf_eval({1.5, 1.0, 0.0}, -1.0), ValidationError);
    try {
        mlf_eval({1.5, 1.0, -1.0}, -1.0);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.field(), "tol");
    }
}

TEST(Mlf, Deterministic) {
    EXPECT_EQ(mlf(1.37, 0.61, -7.7), mlf(1.37, 0.61, -7.7));
}

TEST(Mlf, BoundCheck) {
    EXPECT_TRUE(mlf_bound_check({2.0, 1.0, 1e-12}, 0.0, 1.0));
    EXPECT_FALSE(mlf_bound_check({1.2, 1.0, 1e-12}, -50.0, 0.01));
    const double fitted = mlf_decay_fit(1.5, 1.5, -1e4).constant;
    EXPECT_TRUE(mlf_bound_check({1.5, 1.5, 1e-12}, -100.0, fitted));
    const double lhs = std::abs(oracle::mlf_series(1.2, 1.0, -50.0)) * 51.0;
    EXPECT_GT(lhs, 0.01);
}

TEST(Mlf, RecurrenceResidual) {
    EXPECT_LE(mlf_recurrence_residual(1.0, 1.0, -1.0, 1e-4), 1e-7);
    EXPECT_LE(mlf_recurrence_residual(2.0, 1.0, -4.0, 1e-4), 1e-6);
    const double coarse = mlf_recurrence_residual(1.5, 1.0, -2.0, 1e-2);
    const double fine = mlf_recurrence_residual(1.5, 1.0, -2.0, 5e-3);
    EXPECT_NEAR(coarse / fine, 4.0, 0.4);
}

TEST(Mlf, LaplaceTransform) {
    EXPECT_LE(mlf_laplace_check(1.0, 1.0, 1.0, 2.0, 60.0), 1e-8);
    EXPECT_LE(mlf_laplace_check(1.5, 1.5, 1.0, 1.5, 80.0), 1e-6);
    EXPECT_LE(mlf_laplace_check(2.0, 2.0, 4.0, 3.0, 60.0), 1e-8);
    EXPECT_LT(mlf_laplace_check(1.5, 1.5, 1.0, 1.5, 40.0), mlf_laplace_check(1.5, 1.5, 1.0, 1.5, 10.0));
}

TEST(Mlf, DerivativeIdentities) {
    const auto wave = mlf_derivative_identities(2.0, 1.0, 1.0);
    EXPECT_LE(wave.first_order, 1e-6);
    EXPECT_LE(wave.linear_weight, 1e-6);
    EXPECT_LE(wave.kernel_weight, 1e-6);
    EXPECT_LE(wave.antiderivative, 1e-6);
    const auto frac = mlf_derivative_identities(1.8, 3.0, 0.5);
    EXPECT_LE(frac.first_order, 1e-5);
    EXPECT_LE(frac.linear_weight, 1e-5);
    EXPECT_LE(frac.kernel_weight, 1e-5);
    EXPECT_LE(frac.antiderivative, 1e-5);
    EXPECT_THROW(mlf_derivative_identities(1.5, 1.0, 0.0), ValidationError);
}

TEST(Mlf, DerivativeMatchesDifferenceQuotient) {
    const MlfParams p{1.5, 1.2, 1e-12};
    for (double z : {0.0, -0.7, -6.0, -40.0}) {
        const double h = 1e-5;
        const double fd = (mlf_eval(p, z + h) - mlf_eval(p, z - h)) / (2 * h);
        EXPECT_NEAR(mlf_derivative(p, z), fd, 1e-6) << z;
    }
}

TEST(Mlf, DecayFitIsBounded) {
    for (double a : {1.2, 1.5, 1.8})
        for (double b : {0.5, 1.0, 1.5}) {
            const BoundFit fit = mlf_decay_fit(a, b);
            EXPECT_TRUE(fit.bounded()) << a << " " << b << " " << fit.constant << " " << fit.extended;
        }
}

TEST(Mlf, ScaledEstimatesAreBounded) {
    const std::vector<double> lambdas{1.0, 10.0, 100.0};
    EXPECT_TRUE(mlf_scaled_fit_nu(1.5, 1.5, 0.5, 0.5, lambdas, 1e-3, 10.0).bounded());
    EXPECT_TRUE(mlf_scaled_fit_gamma(1.5, 1.5, 0.5, lambdas, 1e-3, 10.0).bounded());
    EXPECT_THROW(mlf_scaled_fit_nu(1.5, 1.5, 1.5, 0.5, lambdas, 1e-3, 10.0), ValidationError);
    EXPECT_THROW(mlf_scaled_fit_gamma(1.5, 1.5, 0.5, {}, 1e-3, 10.0), ValidationError);
}
