#pragma once

#include "hilfer/fit.hpp"

#include <vector>

namespace hilfer {

/// Parameters of the two-parameter Mittag-Leffler function E_{alpha,beta}.
struct MlfParams {
    double alpha = 1.0;
    double beta = 1.0;
    double tol = 1e-12;

    void validate() const;
};

/// Which evaluation path produced a value. Exposed for diagnostics and benchmarks.
enum class MlfRegime { Zero, Taylor, Asymptotic, Contour };

struct MlfResult {
    double value = 0.0;
    MlfRegime regime = MlfRegime::Zero;
};

/// E_{alpha,beta}(z) for real z with absolute error close to params.tol.
/// Throws NumericalError naming (alpha, beta, z) if no path converges.
double mlf_eval(const MlfParams& params, double z);

MlfResult mlf_eval_detailed(const MlfParams& params, double z);

/// Shorthand with the default tolerance.
double mlf(double alpha, double beta, double z);

/// d/dz E_{alpha,beta}(z), using the shift identity away from zero and the series at zero.
double mlf_derivative(const MlfParams& params, double z);

/// True when |E_{alpha,beta}(z)| <= c / (1 + |z|).
bool mlf_bound_check(const MlfParams& params, double z, double c);

/// |E_{a,b}(z) - b E_{a,b+1}(z) - a z E'_{a,b+1}(z)| with E' taken by central differences of step h.
double mlf_recurrence_residual(double alpha, double beta, double z, double h);

/// |int_0^tmax e^{-lambda t} t^{beta-1} E_{alpha,beta}(-gamma t^alpha) dt - lambda^{alpha-beta}/(lambda^alpha+gamma)|.
double mlf_laplace_check(double alpha, double beta, double gamma, double lambda, double t_max);

struct DerivativeIdentityResiduals {
    double first_order = 0.0;        ///< d/dt E_{a,1}(-l t^a) + l t^{a-1} E_{a,a}(-l t^a)
    double linear_weight = 0.0;      ///< d/dt [t E_{a,2}(-l t^a)] - E_{a,1}(-l t^a)
    double kernel_weight = 0.0;      ///< d/dt [t^{a-1} E_{a,a}(-l t^a)] - t^{a-2} E_{a,a-1}(-l t^a)
    double antiderivative = 0.0;     ///< int_0^t E_{a,1}(-l s^a) ds - t E_{a,2}(-l t^a)
};

DerivativeIdentityResiduals mlf_derivative_identities(double alpha, double lambda, double t);

/// Fit of |E_{alpha,beta}(z)| <= C / (1 + |z|) over z in [z_min, 0]; the extended sweep reaches 100 z_min.
BoundFit mlf_decay_fit(double alpha, double beta, double z_min = -1e6);

/// Fit of |lambda^nu t^gamma E_{alpha,beta}(-lambda t^alpha)| <= C t^{gamma - alpha nu} over the given
/// lambdas and t in [t_min, t_max]; the extended sweep widens the t range by 10^4 at both ends.
BoundFit mlf_scaled_fit_nu(double alpha, double beta, double nu, double gamma, const std::vector<double>& lambdas,
                           double t_min, double t_max);

/// Fit of |lambda^{1-gamma} t^{alpha-2} E_{alpha,beta}(-lambda t^alpha)| <= C t^{alpha gamma - 2}, same sweeps.
BoundFit mlf_scaled_fit_gamma(double alpha, double beta, double gamma, const std::vector<double>& lambdas,
                              double t_min, double t_max);

} // namespace hilfer
