#include "hilfer/error.hpp"
#include "hilfer/spectral.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace hilfer;

namespace {

constexpr double pi = std::numbers::pi;

Field random_field(std::shared_ptr<const SpectralBasis> basis, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Field f = Field::zero(basis);
    for (Eigen::Index i = 0; i < f.coefficients.size(); ++i)
        f.coefficients(i) = nd(rng);
    return f;
}

} // namespace

TEST(Spectral, DirichletEigenvalues) {
    EXPECT_NEAR(SpectralBasis::dirichlet(pi, 4)->eigenvalue(0), 1.0, 1e-15);
    EXPECT_NEAR(SpectralBasis::dirichlet(1.0, 4)->eigenvalue(2), 9.0 * pi * pi, 1e-12);
    const auto b = SpectralBasis::dirichlet(2.0, 3);
    EXPECT_NEAR(b->evaluate(1, 0.3), std::sqrt(1.0) * std::sin(2.0 * pi * 0.3 / 2.0), 1e-15);
}

TEST(Spectral, Orthonormality) {
    const auto b = SpectralBasis::dirichlet(1.0, 16);
    EXPECT_LE(orthonormality_defect(*b, SpaceGrid::trapezoid(1.0, 512)), 1e-10);
}

TEST(Spectral, FractionalPower) {
    const auto base = SpectralBasis::dirichlet(pi, 6);
    const auto same = spectral_fractional(*base, 1.0);
    for (std::size_t n = 0; n < 6; ++n) {
        EXPECT_EQ(same->eigenvalue(n), base->eigenvalue(n));
        EXPECT_EQ(same->evaluate(n, 0.7), base->evaluate(n, 0.7));
    }
    EXPECT_NEAR(spectral_fractional(*base, 0.5)->eigenvalue(3), 4.0, 1e-14);
    const auto frac = spectral_fractional(*base, 0.3);
    for (std::size_t n = 1; n < 6; ++n)
        EXPECT_GT(frac->eigenvalue(n), frac->eigenvalue(n - 1));
    EXPECT_THROW(spectral_fractional(*base, 0.0), ValidationError);
    EXPECT_THROW(spectral_fractional(*base, 1.5), ValidationError);
    EXPECT_NEAR(SpectralBasis::dirichlet(pi, 4, 0.5)->eigenvalue(3), 4.0, 1e-14);
}

TEST(Spectral, RejectsInvalidBases) {
    const auto phi = [](std::size_t, double) { return 0.0; };
    EXPECT_THROW(SpectralBasis({0.0, 1.0}, phi, 1.0), ValidationError);
    EXPECT_THROW(SpectralBasis({2.0, 1.0}, phi, 1.0), ValidationError);
    EXPECT_THROW(SpectralBasis({1.0}, phi, -1.0), ValidationError);
    EXPECT_NO_THROW(SpectralBasis({1.0, 1.0, 2.0}, phi, 1.0));
}

TEST(Spectral, ProjectAndSynthesize) {
    const double L = pi;
    const auto b = SpectralBasis::dirichlet(L, 12);
    const SpaceGrid grid = SpaceGrid::trapezoid(L, 801);
    const Field e2 = project(synthesize(Field::mode(b, 1), grid.nodes), b, grid);
    for (std::size_t n = 0; n < 12; ++n)
        EXPECT_NEAR(e2.coefficients(static_cast<Eigen::Index>(n)), n == 1 ? 1.0 : 0.0, 1e-10);

    const Field zero = project(std::vector<double>(grid.size(), 0.0), b, grid);
    EXPECT_EQ(zero.coefficients.norm(), 0.0);

    std::vector<double> parabola(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        parabola[i] = grid.nodes[i] * (L - grid.nodes[i]);
    const Field p = project(parabola, b, grid);
    for (std::size_t k = 1; k <= 12; ++k) {
        const double exact = k % 2 == 1 ? std::sqrt(2.0 / L) * 4.0 * L * L * L / std::pow(k * pi, 3) : 0.0;
        EXPECT_NEAR(p.coefficients(static_cast<Eigen::Index>(k - 1)), exact, 1e-5) << k;
    }

    const Field r = random_field(b, 4);
    const Field back = project(synthesize(r, grid.nodes), b, grid);
    EXPECT_LE((back.coefficients - r.coefficients).norm(), 1e-10);
    EXPECT_THROW(project(std::vector<double>(3, 0.0), b, grid), ValidationError);
}

TEST(Spectral, VGammaNorms) {
    const auto b = SpectralBasis::dirichlet(pi, 8);
    EXPECT_NEAR(v_gamma_norm(Field::mode(b, 0), 0.5), 1.0, 1e-15);
    EXPECT_NEAR(v_gamma_norm(Field::mode(b, 1), 1.0), 4.0, 1e-14);
    const Field r = random_field(b, 9);
    EXPECT_NEAR(v_gamma_norm(r, 0.0), r.coefficients.norm(), 1e-14);
}

TEST(Spectral, EmbeddingAndDuality) {
    const auto b = SpectralBasis::dirichlet(2.0, 10);
    const double l1 = b->eigenvalue(0);
    for (unsigned s = 0; s < 20; ++s) {
        const Field u = random_field(b, s);
        const Field v = random_field(b, 100 + s);
        for (double g : {0.5, 0.6667, 1.0})
            EXPECT_GE(v_gamma_norm(u, g), std::pow(l1, g - 0.5) * v_gamma_norm(u, 0.5) * (1 - 1e-14));
        EXPECT_LE(std::abs(u.coefficients.dot(v.coefficients)), v_gamma_norm(u, 0.7) * v_gamma_norm(v, -0.7) + 1e-12);
    }
}

TEST(Spectral, BilinearForm) {
    const auto b = SpectralBasis::dirichlet(pi, 6);
    EXPECT_NEAR(bilinear_form(Field::mode(b, 0), Field::mode(b, 0)), 1.0, 1e-15);
    EXPECT_EQ(bilinear_form(Field::mode(b, 0), Field::mode(b, 1)), 0.0);
    for (unsigned s = 0; s < 10; ++s) {
        const Field u = random_field(b, s);
        const Field v = random_field(b, 50 + s);
        EXPECT_NEAR(bilinear_form(u, v), bilinear_form(v, u), 1e-12);
        EXPECT_GE(bilinear_form(u, u), b->eigenvalue(0) * u.coefficients.squaredNorm() * (1 - 1e-14));
    }
    const auto same = SpectralBasis::dirichlet(pi, 6);
    EXPECT_NEAR(bilinear_form(Field::mode(b, 2), Field::mode(same, 2)), 9.0, 1e-14);
    const auto other = SpectralBasis::dirichlet(2.0, 6);
    EXPECT_THROW(bilinear_form(Field::mode(b, 0), Field::mode(other, 0)), ValidationError);
}

TEST(Spectral, SubdomainQuadrature) {
    const Subdomain omega({{0.0, 0.5}, {1.0, 1.5}}, 2.0);
    EXPECT_NEAR(omega.measure(), 1.0, 1e-15);
    EXPECT_TRUE(omega.contains(0.25));
    EXPECT_FALSE(omega.contains(0.75));
    const SpaceGrid q = omega.quadrature(8);
    double sum = 0.0;
    double cubic = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        sum += q.weights[i];
        cubic += q.weights[i] * std::pow(q.nodes[i], 3);
    }
    EXPECT_NEAR(sum, 1.0, 1e-14);
    EXPECT_NEAR(cubic, (std::pow(0.5, 4) + std::pow(1.5, 4) - 1.0) / 4.0, 1e-13);
    EXPECT_THROW(Subdomain({{0.5, 0.2}}, 1.0), ValidationError);
    EXPECT_THROW(Subdomain({{0.0, 0.6}, {0.5, 0.9}}, 1.0), ValidationError);
    EXPECT_THROW(Subdomain({{0.0, 1.2}}, 1.0), ValidationError);
    EXPECT_TRUE(Subdomain({}, 1.0).empty());
}

TEST(Spectral, OmegaGramOnFullDomainIsIdentity) {
    const auto b = SpectralBasis::dirichlet(1.0, 6);
    const Eigen::MatrixXd G = omega_gram(*b, Subdomain({{0.0, 1.0}}, 1.0).quadrature(64), 6, 6);
    EXPECT_LE((G - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-12);
}
