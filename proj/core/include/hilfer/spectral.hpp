#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

namespace hilfer {

/// Truncated eigenbasis of a positive self-adjoint operator on (0, L).
/// Eigenvalues are positive and nondecreasing; eigenfunctions are L2-orthonormal.
class SpectralBasis {
public:
    /// phi(n, x) evaluates the n-th eigenfunction (zero-based) at x.
    using Eigenfunction = std::function<double(std::size_t, double)>;

    SpectralBasis(std::vector<double> eigenvalues, Eigenfunction phi, double length);

    /// Dirichlet Laplacian on (0, L): lambda_n = (n pi / L)^2, phi_n = sqrt(2/L) sin(n pi x / L).
    /// With power s != 1 the eigenvalues are raised to s (spectral fractional Laplacian).
    static std::shared_ptr<const SpectralBasis> dirichlet(double length, std::size_t modes, double power = 1.0);

    std::size_t size() const noexcept { return eigenvalues_.size(); }
    double length() const noexcept { return length_; }
    double eigenvalue(std::size_t n) const { return eigenvalues_.at(n); }
    const std::vector<double>& eigenvalues() const noexcept { return eigenvalues_; }
    double evaluate(std::size_t n, double x) const { return phi_(n, x); }

private:
    std::vector<double> eigenvalues_;
    Eigenfunction phi_;
    double length_;
};

/// Same eigenfunctions with eigenvalues raised to s in (0, 1].
std::shared_ptr<const SpectralBasis> spectral_fractional(const SpectralBasis& base, double power);

/// Spatial quadrature nodes and weights.
struct SpaceGrid {
    std::vector<double> nodes;
    std::vector<double> weights;

    /// Composite trapezoid rule with `points` equally spaced nodes on [0, L].
    static SpaceGrid trapezoid(double length, std::size_t points);
    std::size_t size() const noexcept { return nodes.size(); }
};

/// Observation region: a finite union of disjoint open intervals inside (0, L).
class Subdomain {
public:
    Subdomain(std::vector<std::pair<double, double>> intervals, double length);

    const std::vector<std::pair<double, double>>& intervals() const noexcept { return intervals_; }
    double measure() const;
    bool contains(double x) const;
    bool empty() const noexcept { return intervals_.empty(); }

    /// Gauss-Legendre rule with `points_per_interval` nodes on each interval.
    SpaceGrid quadrature(std::size_t points_per_interval) const;

private:
    std::vector<std::pair<double, double>> intervals_;
};

/// Element of span{phi_1..phi_N} stored by its coefficients.
struct Field {
    std::shared_ptr<const SpectralBasis> basis;
    Eigen::VectorXd coefficients;

    static Field zero(std::shared_ptr<const SpectralBasis> basis);
    static Field mode(std::shared_ptr<const SpectralBasis> basis, std::size_t n, double amplitude = 1.0);
    double operator()(double x) const;
};

/// Coefficients of the L2 projection of nodal samples onto the basis.
Field project(const std::vector<double>& samples, std::shared_ptr<const SpectralBasis> basis, const SpaceGrid& grid);

/// Nodal values of a field.
std::vector<double> synthesize(const Field& field, const std::vector<double>& nodes);

/// ||u||_{V_gamma} = (sum_n lambda_n^{2 gamma} |u_n|^2)^{1/2}; gamma may be negative.
double v_gamma_norm(const Field& field, double gamma);
double v_gamma_norm(const Eigen::VectorXd& coefficients, const std::vector<double>& eigenvalues, double gamma);

/// E_A(u, v) = sum_n lambda_n u_n v_n. Both fields must live on the same basis.
double bilinear_form(const Field& u, const Field& v);

/// Matrix G_{nm} = int_omega phi_n phi_m dx for n < rows, m < cols.
Eigen::MatrixXd omega_gram(const SpectralBasis& basis, const SpaceGrid& omega, std::size_t rows, std::size_t cols);

/// max |<phi_i, phi_j> - delta_ij| measured with the given quadrature.
double orthonormality_defect(const SpectralBasis& basis, const SpaceGrid& grid);

} // namespace hilfer
