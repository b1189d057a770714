#include "hilfer/quadrature.hpp"

#include "hilfer/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace hilfer {

double rgamma(double x) {
    if (x <= 0.0 && x == std::floor(x))
        return 0.0;
    if (x > 171.0)
        return 0.0;
    if (x < -150.0) {
        // reflection keeps the value finite where tgamma underflows
        const double s = std::sin(std::numbers::pi * x);
        return s * std::exp(std::lgamma(1.0 - x) - std::log(std::numbers::pi));
    }
    return 1.0 / std::tgamma(x);
}

double beta_function(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw ValidationError("beta_function", "arguments must be positive");
    return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

QuadratureRule gauss_jacobi(std::size_t n, double a, double b) {
    if (n == 0)
        throw ValidationError("n", "quadrature size must be positive");
    if (!(a > -1.0) || !(b > -1.0))
        throw ValidationError("jacobi exponents", "must exceed -1");

    const double ab = a + b;
    Eigen::VectorXd diag(n);
    Eigen::VectorXd off(n > 1 ? n - 1 : 0);

    diag(0) = (b - a) / (ab + 2.0);
    for (std::size_t k = 1; k < n; ++k) {
        const double kk = static_cast<double>(k);
        const double s = 2.0 * kk + ab;
        diag(static_cast<Eigen::Index>(k)) = (b * b - a * a) / (s * (s + 2.0));
        double beta;
        if (k == 1)
            beta = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
        else
            beta = 4.0 * kk * (kk + a) * (kk + b) * (kk + ab) / (s * s * (s + 1.0) * (s - 1.0));
        off(static_cast<Eigen::Index>(k - 1)) = std::sqrt(beta);
    }

    const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                                std::lgamma(ab + 2.0));

    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    if (n == 1) {
        rule.nodes[0] = diag(0);
        rule.weights[0] = mu0;
        return rule;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success)
        throw NumericalError("gauss_jacobi: tridiagonal eigensolver failed");

    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        rule.nodes[i] = solver.eigenvalues()(ii);
        const double v = solver.eigenvectors()(0, ii);
        rule.weights[i] = mu0 * v * v;
    }
    return rule;
}

const QuadratureRule& gauss_legendre(std::size_t n) {
    static std::mutex mutex;
    static std::map<std::size_t, std::unique_ptr<QuadratureRule>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) {
        auto rule = gauss_jacobi(n, 0.0, 0.0);
        // symmetrize to remove eigensolver noise
        for (std::size_t i = 0; i < n / 2; ++i) {
            const std::size_t j = n - 1 - i;
            const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
            const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
            rule.nodes[i] = -x;
            rule.nodes[j] = x;
            rule.weights[i] = rule.weights[j] = w;
        }
        if (n % 2 == 1)
            rule.nodes[n / 2] = 0.0;
        slot = std::make_unique<QuadratureRule>(std::move(rule));
    }
    return *slot;
}

QuadratureRule gauss_legendre(std::size_t n, double lo, double hi) {
    const auto& ref = gauss_legendre(n);
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    for (std::size_t i = 0; i < n; ++i) {
        rule.nodes[i] = mid + half * ref.nodes[i];
        rule.weights[i] = half * ref.weights[i];
    }
    return rule;
}

QuadratureRule gauss_jacobi(std::size_t n, double a, double b, double lo, double hi) {
    if (!(hi > lo))
        throw ValidationError("interval", "requires lo < hi");
    auto rule = gauss_jacobi(n, b, a);
    const double half = 0.5 * (hi - lo);
    const double scale = std::pow(half, a + b + 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        rule.nodes[i] = lo + half * (1.0 + rule.nodes[i]);
        rule.weights[i] *= scale;
    }
    return rule;
}

} // namespace hilfer
