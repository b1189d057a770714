#pragma once

#include "hilfer/fit.hpp"
#include "hilfer/modal.hpp"
#include "hilfer/order.hpp"
#include "hilfer/parallel.hpp"
#include "hilfer/spectral.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <vector>

namespace hilfer {

/// Backward system D_{t,T}^{mu,1-nu} v + A v = 0 with final data
/// (I_{t,T}^{nu(2-mu)} v)(T) = v0 and (D_{t,T}^{1-nu(2-mu)} v)(T) = v1.
struct AdjointProblem {
    FractionalOrder order;
    std::shared_ptr<const SpectralBasis> basis;
    TimeGrid grid;
    Field v0;
    Field v1;
    GammaChoice gamma_choice = GammaChoice::InverseMu;

    void validate() const;
    double gamma() const noexcept { return order.gamma(gamma_choice); }
};

/// Spectral solution. The endpoint exponent is nu(mu-2) at t = T; node T is flagged singular
/// when that exponent is negative and some v0 coefficient is nonzero.
ModalField solve_adjoint(const AdjointProblem& problem, const SolveOptions& options = {});

/// Pointwise evaluation of mode n of the solution at t < T.
double adjoint_mode_value(const AdjointProblem& problem, std::size_t mode, double t);

/// Closed forms of I_{t,T}^{nu(2-mu)} v and D_{t,T}^{1-nu(2-mu)} v on the grid.
struct AdjointFinalConditions {
    ModalField integral;
    ModalField derivative;

    /// Values at t = T, which must reproduce (v0, v1).
    Field integral_at_final() const { return integral.snapshot(integral.nodes() - 1); }
    Field derivative_at_final() const { return derivative.snapshot(derivative.nodes() - 1); }
};

AdjointFinalConditions adjoint_final_conditions(const AdjointProblem& problem, const SolveOptions& options = {});

/// Samples v(x, t) for x on a spatial node set (typically a quadrature of omega) and t on the grid.
/// Rows are time nodes, columns spatial nodes. `regular` holds the samples with the endpoint power removed.
struct OmegaSamples {
    std::vector<double> times;
    SpaceGrid space;
    Eigen::MatrixXd values;
    Eigen::MatrixXd regular;
    double endpoint_exponent = 0.0;
    bool right_end = true;
};

OmegaSamples restrict_to_omega(const ModalField& solution, const SpaceGrid& omega_nodes);

/// max over nodes t <= window_end * T of the discrete V_{-gamma} norm of D_{t,T}^{mu,1-nu} v + A v,
/// skipping the first three nodes.
double adjoint_pde_residual(const AdjointProblem& problem, const ModalField& solution, double window_end = 0.9);

/// Fits for ||v(t)||^2_{V_gamma} <= C (T-t)^{2nu(mu-2)} (||v0||^2_{V_gamma} + ||v1||^2) and
/// ||D_{t,T}^{1-nu(2-mu)} v(t)||^2 <= C (||v0||^2_{V_gamma} + ||v1||^2), with T - t swept over
/// [1e-4 T, T] (declared) and down to 1e-8 T (extended).
struct AdjointNormReport {
    BoundFit norm_v;
    BoundFit final_derivative;
};

AdjointNormReport adjoint_norm_checks(const AdjointProblem& problem);

} // namespace hilfer
