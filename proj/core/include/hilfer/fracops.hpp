#pragma once

#include "hilfer/order.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace hilfer {

/// Strictly increasing time nodes 0 = t_0 < ... < t_M = T.
class TimeGrid {
public:
    static TimeGrid uniform(double T, std::size_t intervals);
    /// Nodes T (j/M)^r clustered at t = 0 for r > 1.
    static TimeGrid graded(double T, std::size_t intervals, double exponent);
    /// Nodes T - T (1 - j/M)^r clustered at t = T for r > 1.
    static TimeGrid graded_right(double T, std::size_t intervals, double exponent);
    static TimeGrid from_nodes(std::vector<double> nodes);

    double T() const noexcept { return nodes_.back(); }
    std::size_t size() const noexcept { return nodes_.size(); }
    std::size_t intervals() const noexcept { return nodes_.size() - 1; }
    double operator[](std::size_t j) const { return nodes_[j]; }
    const std::vector<double>& nodes() const noexcept { return nodes_; }
    double max_step() const;

    /// The same grid seen from t = T: node j maps to T - t_{M-j}.
    TimeGrid mirrored() const;

private:
    explicit TimeGrid(std::vector<double> nodes);
    std::vector<double> nodes_;
};

/// Node values of a function on a time grid, read as its piecewise-linear interpolant.
struct GridFunction {
    TimeGrid grid;
    std::vector<double> values;

    static GridFunction sample(const TimeGrid& grid, const std::function<double(double)>& f);
    double operator()(double t) const;
    std::size_t size() const noexcept { return values.size(); }
};

/// Left Riemann-Liouville integral (1/Gamma(alpha)) int_0^t (t-s)^{alpha-1} s^a g(s) ds at every node.
/// g is taken piecewise linear; the kernel and the optional weight s^a are integrated exactly or by
/// Gauss-Jacobi rules. alpha = 0 returns s^a g.
GridFunction frac_integral_left(double alpha, const GridFunction& g, double weight_exponent = 0.0);

/// Right integral (1/Gamma(alpha)) int_t^T (s-t)^{alpha-1} (T-s)^a g(s) ds at every node.
GridFunction frac_integral_right(double alpha, const GridFunction& g, double weight_exponent = 0.0);

/// Nodal derivative: 5-point stencils, one-sided near the ends.
GridFunction differentiate(const GridFunction& g);

/// Nodal second derivative: 5-point stencils, 6-point one-sided near the ends.
GridFunction differentiate2(const GridFunction& g);

/// Left Hilfer derivative I^{nu(2-mu)} d^2/dt^2 I^{(1-nu)(2-mu)} g.
GridFunction hilfer_derivative_left(const FractionalOrder& order, const GridFunction& g, double weight_exponent = 0.0);

/// Right Hilfer derivative I_{t,T}^{nu(2-mu)} d^2/dt^2 I_{t,T}^{(1-nu)(2-mu)} g.
GridFunction hilfer_derivative_right(const FractionalOrder& order, const GridFunction& g, double weight_exponent = 0.0);

/// Right Riemann-Liouville derivative -d/dt I_{t,T}^{1-alpha} g for 0 < alpha <= 1.
GridFunction rl_derivative_right(double alpha, const GridFunction& g, double weight_exponent = 0.0);

/// (f * g)(t) = int_0^t f(t-s) g(s) ds by the trapezoid rule with f interpolated linearly.
GridFunction convolution(const GridFunction& f, const GridFunction& g);

/// Trapezoid rule for int_0^T g dt.
double integrate(const GridFunction& g);

/// Pointwise product of two functions on the same grid.
GridFunction multiply(const GridFunction& f, const GridFunction& g);

/// max_j |I^alpha t^p - Gamma(p+1)/Gamma(p+1+alpha) t^{p+alpha}|.
double power_law_residual(double alpha, double p, const TimeGrid& grid);

/// max_j |I^a I^b g - I^{a+b} g|.
double semigroup_residual(double a, double b, const GridFunction& g);

/// max_j |I^alpha (f * g) - (I^alpha f) * g|.
double convolution_commute_residual(double alpha, const GridFunction& f, const GridFunction& g);

/// |int_0^T phi I^alpha psi dt - int_0^T psi I_{t,T}^alpha phi dt|.
double ipf_residual(double alpha, const GridFunction& phi, const GridFunction& psi);

struct IbpReport {
    double lhs = 0.0;       ///< int_0^T v D^{mu,nu} u dt
    double interior = 0.0;  ///< int_0^T u D_{t,T}^{mu,1-nu} v dt
    double boundary = 0.0;  ///< [I^beta u D_{t,T}^{1-nu(2-mu)} v + (I^beta u)' I_{t,T}^{nu(2-mu)} v]_0^T
    double residual = 0.0;  ///< |lhs - interior - boundary|
};

/// Integration by parts for the Hilfer pair, with u and v sampled on the same grid.
IbpReport ibp_residual(const FractionalOrder& order, const GridFunction& u, const GridFunction& v);

/// Residuals of the calculus identities at M intervals on [0, T] for fixed smooth test data.
/// The integral identities run on the graded mesh T (j/M)^2: power law I^{1/2} t^2, semigroup
/// I^{0.4} I^{0.7} against I^{1.1} of sin 2t + 1, convolution commutation for I^{0.7} with sin t and
/// 1 + t^2, and integration by parts of I^{1/2} against I_{t,T}^{1/2} with (T - t) e^{-t} and cos t.
/// The Hilfer integration by parts runs on the uniform mesh with u = t^3, v = (T - t)^3 (1 + t/T).
struct IdentityResiduals {
    double power_law = 0.0;
    double semigroup = 0.0;
    double convolution = 0.0;
    double ipf = 0.0;
    double ibp = 0.0;
};

IdentityResiduals identity_residuals(const FractionalOrder& order, double T, std::size_t intervals);

/// Least-squares slope of log(residual) against log(h) over a refinement sequence.
double empirical_order(const std::vector<double>& steps, const std::vector<double>& residuals);

} // namespace hilfer
