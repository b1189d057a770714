#pragma once

#include "hilfer/adjoint.hpp"
#include "hilfer/forward.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

namespace hilfer {

/// Shared setup for the control-to-memory-state map and its adjoint.
struct ControlTemplate {
    FractionalOrder order;
    std::shared_ptr<const SpectralBasis> basis;
    double T = 1.0;
    Subdomain omega;
    std::size_t cells = 16;            ///< J
    std::size_t space_functions = 8;   ///< M_ctrl
    GammaChoice gamma_choice = GammaChoice::InverseMu;
    std::size_t time_points = 12;      ///< Gauss points per control cell for the observation quadrature
    std::size_t space_points = 0;      ///< Gauss points per omega interval; 0 picks max(32, 4(N+M))

    void validate() const;
    double gamma() const noexcept { return order.gamma(gamma_choice); }
    std::size_t unknowns() const noexcept { return cells * space_functions; }
    std::size_t spatial_points() const;
    /// Unknown index j*M + m for cell j and spatial function m.
    ControlField control(const Eigen::VectorXd& coefficients) const;
};

/// Matrix F mapping control coefficients to the stacked memory state [mem; mem_rate] (2N x JM).
struct ControlMap {
    ControlTemplate setup;
    Eigen::MatrixXd matrix;
    Eigen::VectorXd weights;  ///< lambda_n^gamma on the mem block, 1 on the rate block

    Eigen::VectorXd apply(const Eigen::VectorXd& coefficients) const { return matrix * coefficients; }
    /// ||W (F c - target)||, the V_gamma x L2 distance.
    double residual(const Eigen::VectorXd& coefficients, const Eigen::VectorXd& target) const;
};

ControlMap assemble_control_map(const ControlTemplate& setup, const SolveOptions& options = {});

/// Matrix of (v0, v1) -> v restricted to omega x (0, T), sampled at quadrature nodes.
/// Row i*S + s holds time node i and spatial node s; columns are [v0 coefficients, v1 coefficients].
struct ObservationMap {
    ControlTemplate setup;
    std::vector<double> times;
    std::vector<double> time_weights;
    SpaceGrid space;
    Eigen::MatrixXd matrix;

    /// Square roots of the product weights, one per row.
    Eigen::VectorXd row_scaling() const;
    /// L2(omega x (0, T)) inner product of a control with the observation of `data`.
    double pairing(const Eigen::VectorXd& control_coefficients, const Eigen::VectorXd& data) const;
};

ObservationMap assemble_observation_map(const ControlTemplate& setup, const SolveOptions& options = {});

/// |sum_n [mem_rate_n v0_n + mem_n v1_n] - int_0^T int_omega f v dx dt| for zero initial data.
/// The space-time integral uses the grid merged with the control cell edges, a Gauss rule on omega
/// and product-weighted trapezoid sums in time against the regular part of v.
double duality_residual(const FractionalOrder& order, std::shared_ptr<const SpectralBasis> basis, const TimeGrid& grid,
                        const ControlField& f, const Field& v0, const Field& v1);

/// max over random probes of |<F c, (v0, v1)> - <f(c), F*(v0, v1)>|.
double duality_adjointness_residual(const ControlMap& cm, const ObservationMap& om, std::size_t probes = 10,
                                    unsigned seed = 7);

struct UcpReport {
    double sigma_min = 0.0;
    double sigma_max = 0.0;
    Eigen::VectorXd kernel;  ///< right singular vector of sigma_min, as [v0; v1]
    bool injective = false;  ///< sigma_min above the 1e-14 floor

    static constexpr double floor = 1e-14;
};

/// Smallest singular value of the quadrature-weighted observation matrix.
UcpReport ucp_smallest_singular_value(const ObservationMap& om);

/// Residues of the Laplace-transformed observation at eta = -lambda_l, one per distinct eigenvalue.
/// `measured` is the L2(omega) norm of the residue from trapezoid integration on a circle around
/// -lambda_l, `predicted` the norm of sum_k [v0_k (-lambda_l)^{(b+1)/mu} + v1_k (-lambda_l)^{b/mu}] phi_k
/// over the eigenspace, b = (1-nu)(mu-2). Powers use the branch cut along the negative imaginary axis,
/// which agrees with the principal value at arg = pi.
struct ResidueReport {
    std::vector<std::size_t> group_start;
    std::vector<double> measured;
    std::vector<double> predicted;

    double max_mismatch() const;
    bool vanishes(double tol) const;
};

ResidueReport residue_diagnostic(const ControlTemplate& setup, const Field& v0, const Field& v1,
                                 std::size_t circle_points = 64);

struct SynthesisOptions {
    double tol = 1e-10;             ///< relative tolerance on the normal-equation residual
    std::size_t max_iterations = 0; ///< 0 picks 10 * JM
};

struct ControlSynthesis {
    Eigen::VectorXd coefficients;
    double residual = 0.0;      ///< ||W (F c - target)||
    double control_norm = 0.0;  ///< ||c||
    std::size_t iterations = 0;
};

/// argmin ||W (F c - target)||^2 + eps ||c||^2 by conjugate gradients on the normal equations
/// (CGLS). `start` warm-starts the iteration. Throws NumericalError when the budget is exhausted.
ControlSynthesis synthesize_control(const ControlMap& cm, const MemoryState& target, double eps,
                                    const SynthesisOptions& options = {}, const Eigen::VectorXd* start = nullptr);

struct ControlRecord {
    std::size_t target_id = 0;
    double eps = 0.0;
    double residual = 0.0;
    double control_norm = 0.0;
    std::size_t cg_iters = 0;
    double seconds = 0.0;
};

/// Runs synthesize_control along the eps path for every target, warm-starting each step.
std::vector<ControlRecord> controllability_report(const ControlMap& cm, const std::vector<MemoryState>& targets,
                                                  const std::vector<double>& eps_path,
                                                  const SynthesisOptions& options = {});

/// The default eps path 1e-1, 1e-2, ..., 1e-8.
std::vector<double> default_eps_path();

} // namespace hilfer
