#include "hilfer/forward.hpp"

#include "hilfer/error.hpp"
#include "hilfer/mlf.hpp"
#include "hilfer/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hilfer {

namespace {

constexpr double kEdgeTolerance = 1e-12;

std::size_t gram_points(std::size_t modes, std::size_t functions) {
    return std::max<std::size_t>(32, 4 * (modes + functions));
}

/// s^p E_{mu,p+1}(-lambda s^mu), the antiderivative of s^{p-1} E_{mu,p}(-lambda s^mu); zero for s <= 0.
double ml_antiderivative(double mu, double p, double lambda, double s) {
    if (s <= 0.0)
        return 0.0;
    return std::pow(s, p) * mlf(mu, p + 1.0, -lambda * std::pow(s, mu));
}

/// int_0^t k(t - tau) f_n(tau) dtau for piecewise-constant f_n, where k has antiderivative of exponent p.
double duhamel(double mu, double p, double lambda, const ModalSource& source, std::size_t mode, double t) {
    const auto row = static_cast<Eigen::Index>(mode);
    const std::size_t J = static_cast<std::size_t>(source.values.cols());
    double acc = 0.0;
    for (std::size_t e = 0; e <= J; ++e) {
        if (source.edges[e] >= t)
            break;
        const double after = e < J ? source.values(row, static_cast<Eigen::Index>(e)) : 0.0;
        const double before = e > 0 ? source.values(row, static_cast<Eigen::Index>(e - 1)) : 0.0;
        if (after != before)
            acc += (after - before) * ml_antiderivative(mu, p, lambda, t - source.edges[e]);
    }
    return acc;
}

std::optional<ModalSource> modal_source(const ForwardProblem& problem) {
    if (!problem.control)
        return std::nullopt;
    return ModalSource::from_control(*problem.basis, *problem.control);
}

double coefficient(const Field& f, std::size_t n) { return f.coefficients(static_cast<Eigen::Index>(n)); }

/// t^beta u_n(t) for t > 0.
double regular_value(const ForwardProblem& problem, const std::optional<ModalSource>& source, std::size_t n,
                     double t) {
    const double mu = problem.order.mu();
    const double beta = problem.order.beta();
    const double lambda = problem.basis->eigenvalue(n);
    const double x = -lambda * std::pow(t, mu);
    double r = coefficient(problem.u0, n) * mlf(mu, 1.0 - beta, x) + coefficient(problem.u1, n) * t * mlf(mu, 2.0 - beta, x);
    if (source)
        r += std::pow(t, beta) * duhamel(mu, mu, lambda, *source, n, t);
    return r;
}

ModalField empty_field(const ForwardProblem& problem) {
    const auto N = static_cast<Eigen::Index>(problem.basis->size());
    const auto P = static_cast<Eigen::Index>(problem.grid.size());
    ModalField out{problem.basis, problem.grid, Eigen::MatrixXd::Zero(N, P), Eigen::MatrixXd::Zero(N, P),
                   -problem.order.beta(), false, false};
    return out;
}

/// Values at t = 0: the limit when it exists, NaN for modes that blow up like t^{-beta}.
void fill_initial_node(const ForwardProblem& problem, ModalField& out) {
    const double beta = problem.order.beta();
    for (std::size_t n = 0; n < problem.basis->size(); ++n) {
        const auto row = static_cast<Eigen::Index>(n);
        const double u0 = coefficient(problem.u0, n);
        out.regular(row, 0) = u0 * rgamma(1.0 - beta);
        if (beta > 0.0 && u0 != 0.0) {
            out.values(row, 0) = std::numeric_limits<double>::quiet_NaN();
            out.singular = true;
        } else {
            out.values(row, 0) = beta > 0.0 ? 0.0 : out.regular(row, 0);
        }
    }
}

} // namespace

ControlField::ControlField(Subdomain omega, double T, Eigen::MatrixXd coefficients)
    : omega_(std::move(omega)), T_(T), coefficients_(std::move(coefficients)) {
    if (!(T_ > 0.0) || !std::isfinite(T_))
        throw ValidationError("T", "final time must be positive");
    if (coefficients_.rows() == 0 || coefficients_.cols() == 0)
        throw ValidationError("control", "needs at least one cell and one spatial function");
    if (!coefficients_.allFinite())
        throw ValidationError("control", "coefficients must be finite");
}

ControlField ControlField::unit(Subdomain omega, double T, std::size_t cells, std::size_t functions, std::size_t cell,
                                std::size_t function) {
    if (cell >= cells || function >= functions)
        throw ValidationError("control", "unit index out of range");
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cells), static_cast<Eigen::Index>(functions));
    c(static_cast<Eigen::Index>(cell), static_cast<Eigen::Index>(function)) = 1.0;
    return ControlField(std::move(omega), T, std::move(c));
}

std::vector<double> ControlField::edges() const {
    const std::size_t J = cells();
    std::vector<double> e(J + 1);
    for (std::size_t j = 0; j <= J; ++j)
        e[j] = T_ * static_cast<double>(j) / static_cast<double>(J);
    e.back() = T_;
    return e;
}

std::size_t ControlField::cell_of(double t) const {
    const std::size_t J = cells();
    const double pos = t / T_ * static_cast<double>(J);
    if (!(pos >= 0.0))
        return 0;
    return std::min(static_cast<std::size_t>(pos), J - 1);
}

double ControlField::operator()(const SpectralBasis& basis, double x, double t) const {
    if (t < 0.0 || t > T_ || !omega_.contains(x))
        return 0.0;
    const auto j = static_cast<Eigen::Index>(cell_of(t));
    double acc = 0.0;
    for (std::size_t m = 0; m < space_functions(); ++m)
        acc += coefficients_(j, static_cast<Eigen::Index>(m)) * basis.evaluate(m, x);
    return acc;
}

ModalSource ModalSource::from_control(const SpectralBasis& basis, const ControlField& control) {
    const std::size_t N = basis.size();
    const std::size_t M = control.space_functions();
    if (M > N)
        throw ValidationError("M_ctrl", "cannot exceed the number of modes");
    const SpaceGrid q = control.omega().quadrature(gram_points(N, M));
    const Eigen::MatrixXd gram = omega_gram(basis, q, N, M);
    return ModalSource{control.edges(), gram * control.coefficients().transpose()};
}

double control_lp_norm(const SpectralBasis& basis, const ControlField& control, double p) {
    if (!(p >= 1.0))
        throw ValidationError("p", "must be at least 1");
    const std::size_t M = control.space_functions();
    if (M > basis.size())
        throw ValidationError("M_ctrl", "cannot exceed the number of modes");
    const SpaceGrid q = control.omega().quadrature(gram_points(basis.size(), M));
    const Eigen::MatrixXd gram = omega_gram(basis, q, M, M);
    const double width = control.T() / static_cast<double>(control.cells());
    double acc = 0.0;
    for (std::size_t j = 0; j < control.cells(); ++j) {
        const Eigen::VectorXd c = control.coefficients().row(static_cast<Eigen::Index>(j)).transpose();
        const double norm = std::sqrt(std::max(0.0, c.dot(gram * c)));
        acc = std::isinf(p) ? std::max(acc, norm) : acc + width * std::pow(norm, p);
    }
    return std::isinf(p) ? acc : std::pow(acc, 1.0 / p);
}

void ForwardProblem::validate() const {
    if (!basis)
        throw ValidationError("basis", "is missing");
    const auto N = static_cast<Eigen::Index>(basis->size());
    if (u0.coefficients.size() != N)
        throw ValidationError("u0", "coefficient count must equal the number of modes");
    if (u1.coefficients.size() != N)
        throw ValidationError("u1", "coefficient count must equal the number of modes");
    if (!u0.coefficients.allFinite())
        throw ValidationError("u0", "coefficients must be finite");
    if (!u1.coefficients.allFinite())
        throw ValidationError("u1", "coefficients must be finite");
    const double mu = order.mu();
    if (!(p >= 1.0))
        throw ValidationError("p", "must be at least 1");
    if (gamma_choice == GammaChoice::InverseMu && !(p > 1.0 / (mu - 1.0)))
        throw ValidationError("p", "must exceed 1/(mu-1) when gamma = 1/mu");
    if (gamma_choice == GammaChoice::Half && !(p > 2.0 / mu))
        throw ValidationError("p", "must exceed 2/mu when gamma = 1/2");
    if (control) {
        if (std::abs(control->T() - grid.T()) > kEdgeTolerance * grid.T())
            throw ValidationError("control", "final time differs from the time grid");
        if (control->space_functions() > basis->size())
            throw ValidationError("M_ctrl", "cannot exceed the number of modes");
        for (const auto& [a, b] : control->omega().intervals())
            if (b > basis->length())
                throw ValidationError("omega", "extends beyond the spatial domain");
    }
}

double forward_mode_value(const ForwardProblem& problem, std::size_t mode, double t) {
    if (!(t > 0.0))
        throw ValidationError("t", "pointwise evaluation needs t > 0");
    const auto source = modal_source(problem);
    return std::pow(t, -problem.order.beta()) * regular_value(problem, source, mode, t);
}

ModalField solve_forward(const ForwardProblem& problem, const SolveOptions& options) {
    problem.validate();
    const auto source = modal_source(problem);
    ModalField out = empty_field(problem);
    fill_initial_node(problem, out);
    const double beta = problem.order.beta();
    const auto& t = problem.grid.nodes();
    parallel_for(problem.basis->size(), options.threads, [&](std::size_t n) {
        const auto row = static_cast<Eigen::Index>(n);
        for (std::size_t j = 1; j < t.size(); ++j) {
            const double r = regular_value(problem, source, n, t[j]);
            out.regular(row, static_cast<Eigen::Index>(j)) = r;
            out.values(row, static_cast<Eigen::Index>(j)) = std::pow(t[j], -beta) * r;
        }
    });
    return out;
}

Eigen::VectorXd MemoryState::stacked() const {
    Eigen::VectorXd out(mem.coefficients.size() + mem_rate.coefficients.size());
    out << mem.coefficients, mem_rate.coefficients;
    return out;
}

MemoryState MemoryState::from_stacked(std::shared_ptr<const SpectralBasis> basis, const Eigen::VectorXd& stacked) {
    const auto N = static_cast<Eigen::Index>(basis->size());
    if (stacked.size() != 2 * N)
        throw ValidationError("target", "stacked memory state must have 2N entries");
    return MemoryState{Field{basis, stacked.head(N)}, Field{basis, stacked.tail(N)}};
}

MemoryState memory_state(const ForwardProblem& problem) { return memory_state(problem, problem.grid.T()); }

MemoryState memory_state(const ForwardProblem& problem, double t) {
    problem.validate();
    if (!(t >= 0.0) || t > problem.grid.T() * (1.0 + kEdgeTolerance))
        throw ValidationError("t", "must lie in [0, T]");
    const auto source = modal_source(problem);
    const double mu = problem.order.mu();
    const double gap = problem.order.nu_gap();
    MemoryState out{Field::zero(problem.basis), Field::zero(problem.basis)};
    for (std::size_t n = 0; n < problem.basis->size(); ++n) {
        const auto row = static_cast<Eigen::Index>(n);
        const double lambda = problem.basis->eigenvalue(n);
        const double u0 = coefficient(problem.u0, n);
        const double u1 = coefficient(problem.u1, n);
        double mem = u0;
        double rate = u1;
        if (t > 0.0) {
            const double x = -lambda * std::pow(t, mu);
            const double e1 = mlf(mu, 1.0, x);
            mem = u0 * e1 + u1 * t * mlf(mu, 2.0, x);
            rate = -u0 * lambda * std::pow(t, mu - 1.0) * mlf(mu, mu, x) + u1 * e1;
            if (source) {
                mem += duhamel(mu, 2.0 - gap, lambda, *source, n, t);
                rate += duhamel(mu, 1.0 - gap, lambda, *source, n, t);
            }
        }
        out.mem.coefficients(row) = mem;
        out.mem_rate.coefficients(row) = rate;
    }
    return out;
}

ModalField solve_forward_alt(const ForwardProblem& problem, const SolveOptions& options) {
    problem.validate();
    if (problem.control)
        throw ValidationError("control", "the alternate representation covers the unforced problem only");
    ModalField out = empty_field(problem);
    fill_initial_node(problem, out);
    const double mu = problem.order.mu();
    const double beta = problem.order.beta();
    const double gap = problem.order.nu_gap();
    const TimeGrid& grid = problem.grid;
    parallel_for(problem.basis->size(), options.threads, [&](std::size_t n) {
        const auto row = static_cast<Eigen::Index>(n);
        const double lambda = problem.basis->eigenvalue(n);
        const auto kernel = [&](double b) {
            return GridFunction::sample(grid, [&](double s) { return mlf(mu, b, -lambda * std::pow(s, mu)); });
        };
        const GridFunction from_u0 = frac_integral_left(gap, kernel(mu - 1.0), mu - 2.0);
        const GridFunction from_u1 = frac_integral_left(gap, kernel(mu), mu - 1.0);
        const double u0 = coefficient(problem.u0, n);
        const double u1 = coefficient(problem.u1, n);
        for (std::size_t j = 1; j < grid.size(); ++j) {
            const double v = u0 * from_u0.values[j] + u1 * from_u1.values[j];
            out.values(row, static_cast<Eigen::Index>(j)) = v;
            out.regular(row, static_cast<Eigen::Index>(j)) = std::pow(grid[j], beta) * v;
        }
    });
    return out;
}

double forward_pde_residual(const ForwardProblem& problem, const ModalField& solution, double window_start) {
    constexpr std::size_t margin = 3;
    problem.validate();
    const auto source = modal_source(problem);
    const std::size_t P = solution.nodes();
    const double gamma = problem.gamma();
    std::vector<bool> skip(P, false);
    const auto& t = solution.grid.nodes();
    for (std::size_t j = 0; j < P; ++j)
        skip[j] = t[j] < window_start * solution.grid.T() || j + margin >= P;
    if (source) {
        for (const double e : source->edges) {
            const auto it = std::lower_bound(t.begin(), t.end(), e);
            const auto k = static_cast<std::ptrdiff_t>(it - t.begin());
            for (std::ptrdiff_t j = k - static_cast<std::ptrdiff_t>(margin); j <= k + static_cast<std::ptrdiff_t>(margin); ++j)
                if (j >= 0 && j < static_cast<std::ptrdiff_t>(P))
                    skip[static_cast<std::size_t>(j)] = true;
        }
    }
    std::vector<double> norm2(P, 0.0);
    for (std::size_t n = 0; n < solution.modes(); ++n) {
        const auto row = static_cast<Eigen::Index>(n);
        const double lambda = problem.basis->eigenvalue(n);
        const GridFunction d = hilfer_derivative_left(problem.order, solution.regular_trace(n), -problem.order.beta());
        for (std::size_t j = 0; j < P; ++j) {
            if (skip[j])
                continue;
            double f = 0.0;
            if (source)
                f = source->values(row, static_cast<Eigen::Index>(problem.control->cell_of(t[j])));
            const double r = d.values[j] + lambda * solution.values(row, static_cast<Eigen::Index>(j)) - f;
            norm2[j] += std::pow(lambda, -2.0 * gamma) * r * r;
        }
    }
    double worst = 0.0;
    for (std::size_t j = 0; j < P; ++j)
        if (!skip[j])
            worst = std::max(worst, std::sqrt(norm2[j]));
    return worst;
}

namespace {

struct FamilyKernel {
    double mu;
    double b;
    double operator()(double lambda, double t) const { return mlf(mu, b, -lambda * std::pow(t, mu)); }
    double t_derivative(double lambda, double t) const {
        const double h = 1e-5 * t;
        return ((*this)(lambda, t + h) - (*this)(lambda, t - h)) / (2.0 * h);
    }
};

FamilyDiagnostics family_diagnostics(const FamilyKernel& k, const std::vector<double>& lambda,
                                     const Eigen::VectorXd& u, double t, double tau) {
    const auto N = static_cast<Eigen::Index>(lambda.size());
    Eigen::VectorXd st(N), stau(N), a(N), dst(N);
    for (Eigen::Index n = 0; n < N; ++n) {
        const double l = lambda[static_cast<std::size_t>(n)];
        st(n) = k(l, t);
        stau(n) = k(l, tau);
        a(n) = l;
        dst(n) = k.t_derivative(l, t);
    }
    const double un = u.norm();
    const Eigen::VectorXd au = a.cwiseProduct(u);
    FamilyDiagnostics d;
    d.bound = st.cwiseProduct(u).norm() / un;
    d.commutation = (a.cwiseProduct(st.cwiseProduct(u)) - st.cwiseProduct(au)).norm() / au.norm();
    d.commutativity = (st.cwiseProduct(stau.cwiseProduct(u)) - stau.cwiseProduct(st.cwiseProduct(u))).norm() / un;
    d.derivative = t * dst.cwiseProduct(u).norm() / un;
    return d;
}

} // namespace

FamilyReport family_properties(const SpectralBasis& basis, const FractionalOrder& order, double t, double tau,
                               unsigned seed) {
    if (!(t > 0.0) || !(tau >= 0.0))
        throw ValidationError("t", "needs t > 0 and tau >= 0");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::VectorXd u(static_cast<Eigen::Index>(basis.size()));
    for (Eigen::Index n = 0; n < u.size(); ++n)
        u(n) = normal(rng);
    const double mu = order.mu();
    return FamilyReport{family_diagnostics(FamilyKernel{mu, mu}, basis.eigenvalues(), u, t, tau),
                        family_diagnostics(FamilyKernel{mu, mu - 1.0}, basis.eigenvalues(), u, t, tau)};
}

FamilyFit family_constant_fit(const FractionalOrder& order, const std::vector<double>& eigenvalues, double t_min,
                              double t_max) {
    if (eigenvalues.empty())
        throw ValidationError("eigenvalues", "needs at least one value");
    const double mu = order.mu();
    const FamilyKernel s_mu{mu, mu};
    const FamilyKernel s_mu1{mu, mu - 1.0};
    FamilyFit fit;
    const auto sweep = [&](double lo, double hi, bool extended) {
        for (const double t : log_sweep(lo, hi, 400)) {
            for (const double l : eigenvalues) {
                const auto update = [&](BoundFit& f, double v) {
                    double& slot = extended ? f.extended : f.constant;
                    slot = std::max(slot, v);
                    ++f.samples;
                };
                update(fit.bound_mu, std::abs(s_mu(l, t)));
                update(fit.bound_mu_minus_one, std::abs(s_mu1(l, t)));
                update(fit.derivative_mu, t * std::abs(s_mu.t_derivative(l, t)));
                update(fit.derivative_mu_minus_one, t * std::abs(s_mu1.t_derivative(l, t)));
            }
        }
    };
    sweep(t_min, t_max, false);
    sweep(t_min * 1e-3, t_max * 1e3, true);
    return fit;
}

BoundFit estimate_cds_check(const ForwardProblem& problem) {
    problem.validate();
    const auto source = modal_source(problem);
    const double gamma = problem.gamma();
    const double beta = problem.order.beta();
    const double mu = problem.order.mu();
    const double T = problem.grid.T();
    const double u0n = v_gamma_norm(problem.u0, gamma);
    const double u1n = problem.u1.coefficients.norm();
    const double fn = problem.control ? control_lp_norm(*problem.basis, *problem.control, problem.p) : 0.0;
    const double inv_p = std::isinf(problem.p) ? 0.0 : 1.0 / problem.p;
    const auto ratio = [&](double t) {
        Eigen::VectorXd u(static_cast<Eigen::Index>(problem.basis->size()));
        for (std::size_t n = 0; n < problem.basis->size(); ++n)
            u(static_cast<Eigen::Index>(n)) = std::pow(t, -beta) * regular_value(problem, source, n, t);
        const double lhs = v_gamma_norm(u, problem.basis->eigenvalues(), gamma);
        const double rhs = std::pow(t, -beta) * (u0n + u1n) + std::pow(t, mu - 1.0 - inv_p) * fn;
        return rhs > 0.0 ? lhs / rhs : 0.0;
    };
    BoundFit fit;
    for (const double t : log_sweep(1e-4 * T, T, 200)) {
        fit.constant = std::max(fit.constant, ratio(t));
        ++fit.samples;
    }
    for (const double t : problem.grid.nodes())
        if (t > 0.0)
            fit.constant = std::max(fit.constant, ratio(t));
    fit.extended = fit.constant;
    for (const double t : log_sweep(1e-8 * T, 1e-4 * T, 100)) {
        fit.extended = std::max(fit.extended, ratio(t));
        ++fit.samples;
    }
    return fit;
}

} // namespace hilfer
