#include "hilfer/adjoint.hpp"

#include "hilfer/error.hpp"
#include "hilfer/fracops.hpp"
#include "hilfer/mlf.hpp"
#include "hilfer/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hilfer {

namespace {

double coefficient(const Field& f, std::size_t n) { return f.coefficients(static_cast<Eigen::Index>(n)); }

/// (T-t)^{-nu(mu-2)} v_n(t) as a function of s = T - t > 0.
double regular_value(const AdjointProblem& problem, std::size_t n, double s) {
    const double mu = problem.order.mu();
    const double gap = problem.order.nu_gap();
    const double x = -problem.basis->eigenvalue(n) * std::pow(s, mu);
    return coefficient(problem.v0, n) * mlf(mu, 1.0 - gap, x) + coefficient(problem.v1, n) * s * mlf(mu, 2.0 - gap, x);
}

ModalField empty_field(const AdjointProblem& problem, double exponent) {
    const auto N = static_cast<Eigen::Index>(problem.basis->size());
    const auto P = static_cast<Eigen::Index>(problem.grid.size());
    return ModalField{problem.basis, problem.grid, Eigen::MatrixXd::Zero(N, P), Eigen::MatrixXd::Zero(N, P),
                      exponent, true, false};
}

} // namespace

void AdjointProblem::validate() const {
    if (!basis)
        throw ValidationError("basis", "is missing");
    const auto N = static_cast<Eigen::Index>(basis->size());
    if (v0.coefficients.size() != N)
        throw ValidationError("v0", "coefficient count must equal the number of modes");
    if (v1.coefficients.size() != N)
        throw ValidationError("v1", "coefficient count must equal the number of modes");
    if (!v0.coefficients.allFinite())
        throw ValidationError("v0", "coefficients must be finite");
    if (!v1.coefficients.allFinite())
        throw ValidationError("v1", "coefficients must be finite");
}

double adjoint_mode_value(const AdjointProblem& problem, std::size_t mode, double t) {
    const double s = problem.grid.T() - t;
    if (!(s > 0.0))
        throw ValidationError("t", "pointwise evaluation needs t < T");
    return std::pow(s, -problem.order.nu_gap()) * regular_value(problem, mode, s);
}

ModalField solve_adjoint(const AdjointProblem& problem, const SolveOptions& options) {
    problem.validate();
    const double gap = problem.order.nu_gap();
    ModalField out = empty_field(problem, -gap);
    const auto& t = problem.grid.nodes();
    const double T = problem.grid.T();
    const std::size_t last = t.size() - 1;
    const auto col_last = static_cast<Eigen::Index>(last);
    for (std::size_t n = 0; n < problem.basis->size(); ++n) {
        const auto row = static_cast<Eigen::Index>(n);
        const double v0 = coefficient(problem.v0, n);
        out.regular(row, col_last) = v0 * rgamma(1.0 - gap);
        if (gap > 0.0 && v0 != 0.0) {
            out.values(row, col_last) = std::numeric_limits<double>::quiet_NaN();
            out.singular = true;
        } else {
            out.values(row, col_last) = gap > 0.0 ? 0.0 : out.regular(row, col_last);
        }
    }
    parallel_for(problem.basis->size(), options.threads, [&](std::size_t n) {
        const auto row = static_cast<Eigen::Index>(n);
        for (std::size_t j = 0; j < last; ++j) {
            const double s = T - t[j];
            const double r = regular_value(problem, n, s);
            out.regular(row, static_cast<Eigen::Index>(j)) = r;
            out.values(row, static_cast<Eigen::Index>(j)) = std::pow(s, -gap) * r;
        }
    });
    return out;
}

AdjointFinalConditions adjoint_final_conditions(const AdjointProblem& problem, const SolveOptions& options) {
    problem.validate();
    const double mu = problem.order.mu();
    AdjointFinalConditions out{empty_field(problem, 0.0), empty_field(problem, 0.0)};
    const auto& t = problem.grid.nodes();
    const double T = problem.grid.T();
    parallel_for(problem.basis->size(), options.threads, [&](std::size_t n) {
        const auto row = static_cast<Eigen::Index>(n);
        const double lambda = problem.basis->eigenvalue(n);
        const double v0 = coefficient(problem.v0, n);
        const double v1 = coefficient(problem.v1, n);
        for (std::size_t j = 0; j < t.size(); ++j) {
            const auto col = static_cast<Eigen::Index>(j);
            const double s = j + 1 == t.size() ? 0.0 : T - t[j];
            const double x = -lambda * std::pow(s, mu);
            const double e1 = mlf(mu, 1.0, x);
            const double integral = v0 * e1 + v1 * s * mlf(mu, 2.0, x);
            const double derivative = -v0 * lambda * std::pow(s, mu - 1.0) * mlf(mu, mu, x) + v1 * e1;
            out.integral.values(row, col) = integral;
            out.integral.regular(row, col) = integral;
            out.derivative.values(row, col) = derivative;
            out.derivative.regular(row, col) = derivative;
        }
    });
    return out;
}

OmegaSamples restrict_to_omega(const ModalField& solution, const SpaceGrid& omega_nodes) {
    if (!solution.basis)
        throw ValidationError("basis", "is missing");
    const auto P = static_cast<Eigen::Index>(solution.nodes());
    const auto S = static_cast<Eigen::Index>(omega_nodes.size());
    const auto N = static_cast<Eigen::Index>(solution.modes());
    Eigen::MatrixXd phi(N, S);
    for (Eigen::Index n = 0; n < N; ++n)
        for (Eigen::Index s = 0; s < S; ++s)
            phi(n, s) = solution.basis->evaluate(static_cast<std::size_t>(n), omega_nodes.nodes[static_cast<std::size_t>(s)]);
    OmegaSamples out;
    out.times = solution.grid.nodes();
    out.space = omega_nodes;
    out.endpoint_exponent = solution.endpoint_exponent;
    out.right_end = solution.right_end;
    out.values.resize(P, S);
    out.regular = solution.regular.transpose() * phi;
    for (Eigen::Index j = 0; j < P; ++j) {
        bool finite = true;
        for (Eigen::Index n = 0; n < N; ++n)
            finite = finite && std::isfinite(solution.values(n, j));
        if (finite) {
            out.values.row(j) = solution.values.col(j).transpose() * phi;
        } else {
            out.values.row(j).setConstant(std::numeric_limits<double>::quiet_NaN());
        }
    }
    return out;
}

double adjoint_pde_residual(const AdjointProblem& problem, const ModalField& solution, double window_end) {
    constexpr std::size_t margin = 3;
    const auto& t = solution.grid.nodes();
    const double t_end = window_end * solution.grid.T();
    problem.validate();
    const FractionalOrder dual(problem.order.mu(), 1.0 - problem.order.nu());
    const double gamma = problem.gamma();
    const std::size_t P = solution.nodes();
    std::vector<double> norm2(P, 0.0);
    for (std::size_t n = 0; n < solution.modes(); ++n) {
        const double lambda = problem.basis->eigenvalue(n);
        const GridFunction d =
            hilfer_derivative_right(dual, solution.regular_trace(n), -problem.order.nu_gap());
        for (std::size_t j = margin; j < P && t[j] <= t_end; ++j) {
            const double r = d.values[j] + lambda * solution.values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(j));
            norm2[j] += std::pow(lambda, -2.0 * gamma) * r * r;
        }
    }
    double worst = 0.0;
    for (std::size_t j = margin; j < P && t[j] <= t_end; ++j)
        worst = std::max(worst, std::sqrt(norm2[j]));
    return worst;
}

AdjointNormReport adjoint_norm_checks(const AdjointProblem& problem) {
    problem.validate();
    const double mu = problem.order.mu();
    const double gap = problem.order.nu_gap();
    const double gamma = problem.gamma();
    const double T = problem.grid.T();
    const auto& lambda = problem.basis->eigenvalues();
    const double data = std::pow(v_gamma_norm(problem.v0, gamma), 2) + problem.v1.coefficients.squaredNorm();
    AdjointNormReport report;
    if (!(data > 0.0))
        return report;
    const auto accumulate = [&](double s, bool extended) {
        double v2 = 0.0;
        double d2 = 0.0;
        for (std::size_t n = 0; n < problem.basis->size(); ++n) {
            const double x = -lambda[n] * std::pow(s, mu);
            const double v0 = coefficient(problem.v0, n);
            const double v1 = coefficient(problem.v1, n);
            const double reg = v0 * mlf(mu, 1.0 - gap, x) + v1 * s * mlf(mu, 2.0 - gap, x);
            v2 += std::pow(lambda[n], 2.0 * gamma) * reg * reg;
            const double d = -v0 * lambda[n] * std::pow(s, mu - 1.0) * mlf(mu, mu, x) + v1 * mlf(mu, 1.0, x);
            d2 += d * d;
        }
        for (auto [fit, value] : {std::pair{&report.norm_v, v2 / data}, std::pair{&report.final_derivative, d2 / data}}) {
            double& slot = extended ? fit->extended : fit->constant;
            slot = std::max(slot, value);
            ++fit->samples;
        }
    };
    for (const double s : log_sweep(1e-4 * T, T, 200))
        accumulate(s, false);
    report.norm_v.extended = report.norm_v.constant;
    report.final_derivative.extended = report.final_derivative.constant;
    for (const double s : log_sweep(1e-8 * T, 1e-4 * T, 100))
        accumulate(s, true);
    return report;
}

} // namespace hilfer
