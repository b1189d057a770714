#pragma once

#include <cstddef>
#include <vector>

namespace hilfer {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Jacobi rule for the weight (1-x)^a (1+x)^b on [-1, 1], built by Golub-Welsch.
QuadratureRule gauss_jacobi(std::size_t n, double a, double b);

/// Gauss-Legendre rule on [-1, 1]. Rules are cached and safe to share between threads.
const QuadratureRule& gauss_legendre(std::size_t n);

/// Gauss-Legendre rule mapped to [lo, hi].
QuadratureRule gauss_legendre(std::size_t n, double lo, double hi);

/// Nodes and weights for integral_lo^hi (x - lo)^a (hi - x)^b g(x) dx ~ sum w_i g(x_i).
QuadratureRule gauss_jacobi(std::size_t n, double a, double b, double lo, double hi);

/// Reciprocal gamma function, zero at the non-positive integers.
double rgamma(double x);

/// Beta function B(a, b) for a, b > 0.
double beta_function(double a, double b);

} // namespace hilfer
