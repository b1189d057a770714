#pragma once

#include "hilfer/fit.hpp"
#include "hilfer/modal.hpp"
#include "hilfer/order.hpp"
#include "hilfer/parallel.hpp"
#include "hilfer/spectral.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

namespace hilfer {

/// Control f(x, t) = chi_omega(x) sum_m c_{j m} phi_m(x) for t in the j-th of J equal cells of [0, T].
class ControlField {
public:
    ControlField(Subdomain omega, double T, Eigen::MatrixXd coefficients);

    /// All coefficients zero except c_{cell, function} = 1.
    static ControlField unit(Subdomain omega, double T, std::size_t cells, std::size_t functions, std::size_t cell,
                             std::size_t function);

    const Subdomain& omega() const noexcept { return omega_; }
    double T() const noexcept { return T_; }
    std::size_t cells() const noexcept { return static_cast<std::size_t>(coefficients_.rows()); }
    std::size_t space_functions() const noexcept { return static_cast<std::size_t>(coefficients_.cols()); }
    const Eigen::MatrixXd& coefficients() const noexcept { return coefficients_; }

    /// Cell boundaries 0 = e_0 < ... < e_J = T.
    std::vector<double> edges() const;
    /// Cell containing t; t = T belongs to the last cell.
    std::size_t cell_of(double t) const;
    double operator()(const SpectralBasis& basis, double x, double t) const;

private:
    Subdomain omega_;
    double T_;
    Eigen::MatrixXd coefficients_;
};

/// Modal projection f_n(t) = (f(., t), phi_n) of a control, constant on each cell.
struct ModalSource {
    std::vector<double> edges;
    Eigen::MatrixXd values;  ///< modes x cells

    static ModalSource from_control(const SpectralBasis& basis, const ControlField& control);
};

/// ||f||_{L^p(0,T; L^2(Omega))}; p = infinity gives the max over cells.
double control_lp_norm(const SpectralBasis& basis, const ControlField& control, double p);

struct ForwardProblem {
    FractionalOrder order;
    std::shared_ptr<const SpectralBasis> basis;
    TimeGrid grid;
    Field u0;
    Field u1;
    std::optional<ControlField> control;
    GammaChoice gamma_choice = GammaChoice::InverseMu;
    double p = std::numeric_limits<double>::infinity();

    /// Throws ValidationError naming the offending field.
    void validate() const;
    double gamma() const noexcept { return order.gamma(gamma_choice); }
};

/// Spectral solution on the problem grid. The endpoint exponent is -(1-nu)(2-mu); node 0 is
/// flagged singular when that exponent is negative and some u0 coefficient is nonzero.
ModalField solve_forward(const ForwardProblem& problem, const SolveOptions& options = {});

/// Pointwise evaluation of mode n of the solution at t > 0.
double forward_mode_value(const ForwardProblem& problem, std::size_t mode, double t);

struct MemoryState {
    Field mem;       ///< I^{(1-nu)(2-mu)} u(., t)
    Field mem_rate;  ///< d/dt I^{(1-nu)(2-mu)} u(., t)

    /// Coefficients stacked as [mem; mem_rate].
    Eigen::VectorXd stacked() const;
    /// Inverse of stacked().
    static MemoryState from_stacked(std::shared_ptr<const SpectralBasis> basis, const Eigen::VectorXd& stacked);
};

/// Memory state at the final time of the grid, from exact per-mode formulas.
MemoryState memory_state(const ForwardProblem& problem);
/// Memory state at an arbitrary time 0 <= t <= T.
MemoryState memory_state(const ForwardProblem& problem, double t);

/// Solution built from the families S_mu and S_{mu-1}: fractional integrals of order nu(2-mu)
/// applied numerically to t^{mu-2} S_{mu-1}(t) u0 + t^{mu-1} S_mu(t) u1. Requires no control.
ModalField solve_forward_alt(const ForwardProblem& problem, const SolveOptions& options = {});

/// max over nodes t >= window_start * T of the discrete V_{-gamma} norm of D^{mu,nu} u + A u - f, with
/// the Hilfer derivative taken numerically from the solution traces. The last three nodes and nodes
/// within three steps of a control cell edge are skipped.
double forward_pde_residual(const ForwardProblem& problem, const ModalField& solution, double window_start = 0.1);

/// Diagnostics for S_mu(t) u = sum E_{mu,mu}(-lambda_n t^mu) u_n phi_n and
/// S_{mu-1}(t) u = sum E_{mu,mu-1}(-lambda_n t^mu) u_n phi_n on a random u.
struct FamilyDiagnostics {
    double bound = 0.0;          ///< ||S(t) u|| / ||u||
    double commutation = 0.0;    ///< ||A S(t) u - S(t) A u|| / ||A u||
    double commutativity = 0.0;  ///< ||S(t) S(tau) u - S(tau) S(t) u|| / ||u||
    double derivative = 0.0;     ///< t ||dS(t) u / dt|| / ||u|| by central differences
};

struct FamilyReport {
    FamilyDiagnostics s_mu;
    FamilyDiagnostics s_mu_minus_one;
};

FamilyReport family_properties(const SpectralBasis& basis, const FractionalOrder& order, double t, double tau,
                               unsigned seed = 1);

/// Fits of the constants C1 (boundedness) and C2 (derivative) of both families, as sups over
/// modes and over t in [t_min, t_max]; the extended sweep widens the range by 10^3 at both ends.
struct FamilyFit {
    BoundFit bound_mu;
    BoundFit bound_mu_minus_one;
    BoundFit derivative_mu;
    BoundFit derivative_mu_minus_one;
};

FamilyFit family_constant_fit(const FractionalOrder& order, const std::vector<double>& eigenvalues, double t_min,
                              double t_max);

/// Fit of ||u(t)||_{V_gamma} <= C (t^{-beta} ||u0||_{V_gamma} + t^{-beta} ||u1|| + t^{mu-1-1/p} ||f||_{L^p})
/// over t in [1e-4 T, T] (declared) and [1e-8 T, T] (extended).
BoundFit estimate_cds_check(const ForwardProblem& problem);

} // namespace hilfer
