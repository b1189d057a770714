#include "hilfer/mlf.hpp"

#include "hilfer/error.hpp"
#include "hilfer/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

namespace hilfer {

namespace {

using cplx = std::complex<double>;

constexpr double kTaylorRadius = 5.0;
constexpr double kAsymptoticRadius = 15.0;
constexpr double kMachineEps = std::numeric_limits<double>::epsilon();

[[noreturn]] void fail(const char* path, double alpha, double beta, double z) {
    std::ostringstream os;
    os.precision(17);
    os << "mittag-leffler evaluation failed (" << path << ") at alpha=" << alpha << " beta=" << beta << " z=" << z;
    throw NumericalError(os.str());
}

double taylor_radius(double alpha) {
    return std::pow(kTaylorRadius, std::min(alpha, 1.0));
}

bool taylor_sum(double alpha, double beta, double z, double& out) {
    double sum = 0.0;
    double zk = 1.0;
    const int kmax = 20000;
    for (int k = 0; k < kmax; ++k) {
        const double arg = alpha * k + beta;
        const double term = zk * rgamma(arg);
        sum += term;
        if (arg > 2.0 && std::abs(z) < arg && std::abs(term) <= 0.5 * kMachineEps * std::max(1.0, std::abs(sum))) {
            out = sum;
            return true;
        }
        zk *= z;
        if (!std::isfinite(zk))
            return false;
    }
    return false;
}

struct Pole {
    cplx s;
    double phi;
};

std::vector<Pole> principal_poles(double alpha, double z) {
    std::vector<Pole> poles;
    const double r = std::pow(std::abs(z), 1.0 / alpha);
    const double base = z < 0.0 ? std::numbers::pi : 0.0;
    for (int j = -2; j <= 2; ++j) {
        const double theta = (base + 2.0 * std::numbers::pi * j) / alpha;
        // a pole lying on the branch cut only feeds an exponentially small term
        if (std::abs(theta) >= std::numbers::pi * (1.0 - 1e-12))
            continue;
        const cplx s = std::polar(r, theta);
        poles.push_back({s, 0.5 * (s.real() + std::abs(s))});
    }
    return poles;
}

cplx residue(double alpha, double beta, cplx s) {
    return std::exp((1.0 - beta) * std::log(s) + s) / alpha;
}

// Exponentially growing or oscillating part: residues at poles on the principal sheet.
double pole_sum(double alpha, double beta, const std::vector<Pole>& poles, double phi_min) {
    double total = 0.0;
    for (const auto& p : poles)
        if (p.phi > phi_min)
            total += residue(alpha, beta, p.s).real();
    return total;
}

bool asymptotic_sum(double alpha, double beta, double z, double tol, double& out) {
    const double x = -z;
    const double target = 1e-3 * tol;
    const double logx = std::log(x);
    double alg = 0.0;
    double prev_bound = std::numeric_limits<double>::infinity();
    bool converged = false;
    for (int k = 1; k <= 200; ++k) {
        const double arg = beta - alpha * k;
        const double zk = std::exp(-k * logx) * ((k % 2 == 0) ? 1.0 : -1.0);
        alg -= zk * rgamma(arg);
        // magnitude envelope from the reflection formula
        const double refl = 1.0 - arg;
        double bound = std::numeric_limits<double>::infinity();
        if (refl > 0.0)
            bound = std::exp(std::lgamma(refl) - k * logx) / std::numbers::pi;
        if (bound < target) {
            converged = true;
            break;
        }
        if (k > 2 && bound > prev_bound)
            return false;
        prev_bound = bound;
    }
    if (!converged)
        return false;
    const auto poles = principal_poles(alpha, z);
    out = alg + pole_sum(alpha, beta, poles, -1.0);
    return true;
}

struct ContourPlan {
    double mu = 0.0;
    double h = 0.0;
    int n = 0;
};

double contour_integrand_scale(double alpha, double beta, double z, double mu) {
    const cplx s(mu, 0.0);
    const cplx ls = std::log(s);
    const cplx f = std::exp((alpha - beta) * ls) / (std::exp(alpha * ls) - z);
    return std::exp(mu) * 2.0 * mu * std::abs(f);
}

bool plan_contour(double alpha, double beta, double z, double tol, const std::vector<Pole>& poles,
                  ContourPlan& plan) {
    const double L = std::log(1e3 / tol);
    double best_cost = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 80; ++i) {
        const double mu = 0.02 * std::pow(10.0, i * (3.5 / 80.0));
        double d_plus_cap = 0.9;
        double d_minus_cap = std::numeric_limits<double>::infinity();
        for (const auto& p : poles) {
            const double y = 1.0 - std::sqrt(p.phi / mu);
            if (y > 0.0)
                d_plus_cap = std::min(d_plus_cap, 0.8 * y);
            else
                d_minus_cap = std::min(d_minus_cap, 0.8 * (-y));
        }
        if (d_plus_cap < 1e-3 || d_minus_cap < 1e-3)
            continue;
        const double dp = d_plus_cap;
        const double h_plus = 2.0 * std::numbers::pi * dp / (L + mu * (1.0 - dp) * (1.0 - dp));
        const double dm = std::min(std::sqrt(1.0 + L / mu), d_minus_cap);
        const double h_minus = 2.0 * std::numbers::pi * dm / (L + mu * (1.0 + dm) * (1.0 + dm));
        const double h = std::min(h_plus, h_minus);
        const double span = std::sqrt(1.0 + L / mu);
        const double n = std::ceil(span / h);
        const double rounding = kMachineEps * contour_integrand_scale(alpha, beta, z, mu) * h * std::sqrt(n + 1.0);
        if (!(rounding < 0.1 * tol))
            continue;
        if (n < best_cost) {
            best_cost = n;
            plan.mu = mu;
            plan.h = h;
            plan.n = static_cast<int>(n);
        }
    }
    return std::isfinite(best_cost);
}

bool contour_sum(double alpha, double beta, double z, double tol, double& out) {
    const auto poles = principal_poles(alpha, z);
    ContourPlan plan;
    if (!plan_contour(alpha, beta, z, tol, poles, plan))
        return false;
    const double mu = plan.mu;
    const double h = plan.h;

    auto integrand = [&](double u) {
        const cplx w(1.0, u);
        const cplx s = mu * w * w;
        const cplx ds = 2.0 * mu * cplx(0.0, 1.0) * w;
        const cplx ls = std::log(s);
        const cplx f = std::exp((alpha - beta) * ls + s) / (std::exp(alpha * ls) - z);
        return f * ds;
    };

    // the integrand is odd under conjugation, so only the imaginary parts of one half survive
    double acc = integrand(0.0).imag();
    for (int k = 1; k <= plan.n; ++k)
        acc += 2.0 * integrand(k * h).imag();
    out = acc * h / (2.0 * std::numbers::pi) + pole_sum(alpha, beta, poles, mu);
    return std::isfinite(out);
}

} // namespace

void MlfParams::validate() const {
    if (!std::isfinite(alpha) || !(alpha > 0.0) || alpha > 2.0)
        throw ValidationError("alpha", "must lie in (0, 2]");
    if (!std::isfinite(beta))
        throw ValidationError("beta", "must be finite");
    if (!std::isfinite(tol) || !(tol > 0.0))
        throw ValidationError("tol", "must be positive");
}

MlfResult mlf_eval_detailed(const MlfParams& params, double z) {
    params.validate();
    const double alpha = params.alpha;
    const double beta = params.beta;
    if (!std::isfinite(z))
        throw ValidationError("z", "must be finite");

    if (z == 0.0)
        return {rgamma(beta), MlfRegime::Zero};

    double value = 0.0;
    if (std::abs(z) <= taylor_radius(alpha)) {
        if (taylor_sum(alpha, beta, z, value))
            return {value, MlfRegime::Taylor};
        fail("taylor", alpha, beta, z);
    }
    if (z < 0.0 && -z >= kAsymptoticRadius && asymptotic_sum(alpha, beta, z, params.tol, value))
        return {value, MlfRegime::Asymptotic};
    if (contour_sum(alpha, beta, z, params.tol, value))
        return {value, MlfRegime::Contour};
    fail("contour", alpha, beta, z);
}

double mlf_eval(const MlfParams& params, double z) {
    return mlf_eval_detailed(params, z).value;
}

double mlf(double alpha, double beta, double z) {
    return mlf_eval(MlfParams{alpha, beta, 1e-12}, z);
}

double mlf_derivative(const MlfParams& params, double z) {
    params.validate();
    if (std::abs(z) <= 0.5) {
        double sum = 0.0;
        double zk = 1.0;
        for (int k = 1; k < 2000; ++k) {
            const double term = k * zk * rgamma(params.alpha * k + params.beta);
            sum += term;
            if (params.alpha * k + params.beta > 2.0 && std::abs(term) <= 0.5 * kMachineEps * std::max(1.0, std::abs(sum)))
                return sum;
            zk *= z;
        }
        fail("derivative series", params.alpha, params.beta, z);
    }
    MlfParams shifted = params;
    shifted.beta = params.beta - 1.0;
    return (mlf_eval(shifted, z) - (params.beta - 1.0) * mlf_eval(params, z)) / (params.alpha * z);
}

bool mlf_bound_check(const MlfParams& params, double z, double c) {
    return std::abs(mlf_eval(params, z)) <= c / (1.0 + std::abs(z));
}

double mlf_recurrence_residual(double alpha, double beta, double z, double h) {
    if (!(h > 0.0))
        throw ValidationError("h", "must be positive");
    const MlfParams p{alpha, beta, 1e-12};
    const MlfParams p1{alpha, beta + 1.0, 1e-12};
    const double deriv = (mlf_eval(p1, z + h) - mlf_eval(p1, z - h)) / (2.0 * h);
    return std::abs(mlf_eval(p, z) - beta * mlf_eval(p1, z) - alpha * z * deriv);
}

double mlf_laplace_check(double alpha, double beta, double gamma, double lambda, double t_max) {
    if (!(lambda > 0.0) || !(t_max > 0.0) || !(beta > 0.0))
        throw ValidationError("laplace_check", "requires lambda > 0, t_max > 0, beta > 0");
    const MlfParams p{alpha, beta, 1e-12};
    auto f = [&](double t) {
        if (t <= 0.0)
            return 0.0;
        return std::exp(-lambda * t) * std::pow(t, beta - 1.0) * mlf_eval(p, -gamma * std::pow(t, alpha));
    };
    const double split = std::min(1.0, t_max);
    boost::math::quadrature::tanh_sinh<double> ts;
    double integral = ts.integrate(f, 0.0, split, 1e-13);
    if (t_max > split)
        integral += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, split, t_max, 20, 1e-13);
    const double exact = std::pow(lambda, alpha - beta) / (std::pow(lambda, alpha) + gamma);
    return std::abs(integral - exact);
}

DerivativeIdentityResiduals mlf_derivative_identities(double alpha, double lambda, double t) {
    if (!(t > 0.0))
        throw ValidationError("t", "must be positive");
    auto E = [alpha](double b, double z) { return mlf_eval(MlfParams{alpha, b, 1e-12}, z); };
    auto arg = [&](double s) { return -lambda * std::pow(s, alpha); };
    const double h = 1e-5 * t;
    auto ddt = [&](auto&& g) { return (g(t + h) - g(t - h)) / (2.0 * h); };

    DerivativeIdentityResiduals r;
    r.first_order = std::abs(ddt([&](double s) { return E(1.0, arg(s)); }) +
                             lambda * std::pow(t, alpha - 1.0) * E(alpha, arg(t)));
    r.linear_weight = std::abs(ddt([&](double s) { return s * E(2.0, arg(s)); }) - E(1.0, arg(t)));
    r.kernel_weight = std::abs(ddt([&](double s) { return std::pow(s, alpha - 1.0) * E(alpha, arg(s)); }) -
                               std::pow(t, alpha - 2.0) * E(alpha - 1.0, arg(t)));
    boost::math::quadrature::tanh_sinh<double> ts;
    const double integral = ts.integrate([&](double s) { return s <= 0.0 ? 1.0 : E(1.0, arg(s)); }, 0.0, t, 1e-13);
    r.antiderivative = std::abs(integral - t * E(2.0, arg(t)));
    return r;
}

namespace {

template <class Ratio>
BoundFit scaled_fit(const Ratio& ratio, const std::vector<double>& lambdas, double t_min, double t_max) {
    if (lambdas.empty())
        throw ValidationError("lambda", "needs at least one value");
    for (const double l : lambdas)
        if (!(l > 0.0))
            throw ValidationError("lambda", "must be positive");
    BoundFit fit;
    for (const double l : lambdas) {
        for (const double t : log_sweep(t_min, t_max, 300)) {
            fit.constant = std::max(fit.constant, ratio(l, t));
            ++fit.samples;
        }
    }
    fit.extended = fit.constant;
    for (const double l : lambdas) {
        for (const double t : log_sweep(t_min * 1e-4, t_max * 1e4, 600)) {
            fit.extended = std::max(fit.extended, ratio(l, t));
            ++fit.samples;
        }
    }
    return fit;
}

} // namespace

BoundFit mlf_decay_fit(double alpha, double beta, double z_min) {
    const MlfParams params{alpha, beta, 1e-12};
    params.validate();
    if (!(z_min < 0.0))
        throw ValidationError("z_min", "must be negative");
    const auto ratio = [&](double x) { return std::abs(mlf_eval(params, -x)) * (1.0 + x); };
    BoundFit fit;
    fit.constant = ratio(0.0);
    for (const double x : log_sweep(1e-6, -z_min, 600)) {
        fit.constant = std::max(fit.constant, ratio(x));
        ++fit.samples;
    }
    fit.extended = fit.constant;
    for (const double x : log_sweep(-z_min, -100.0 * z_min, 200)) {
        fit.extended = std::max(fit.extended, ratio(x));
        ++fit.samples;
    }
    return fit;
}

BoundFit mlf_scaled_fit_nu(double alpha, double beta, double nu, double gamma, const std::vector<double>& lambdas,
                           double t_min, double t_max) {
    MlfParams{alpha, beta, 1e-12}.validate();
    if (nu < 0.0 || nu > 1.0)
        throw ValidationError("nu", "must lie in [0, 1]");
    if (!(gamma > 0.0) || !(gamma < alpha))
        throw ValidationError("gamma", "must lie in (0, alpha)");
    const auto ratio = [&](double l, double t) {
        const double lhs = std::abs(std::pow(l, nu) * std::pow(t, gamma) * mlf(alpha, beta, -l * std::pow(t, alpha)));
        return lhs / std::pow(t, gamma - alpha * nu);
    };
    return scaled_fit(ratio, lambdas, t_min, t_max);
}

BoundFit mlf_scaled_fit_gamma(double alpha, double beta, double gamma, const std::vector<double>& lambdas,
                              double t_min, double t_max) {
    MlfParams{alpha, beta, 1e-12}.validate();
    if (gamma < 0.0 || gamma > 1.0)
        throw ValidationError("gamma", "must lie in [0, 1]");
    const auto ratio = [&](double l, double t) {
        const double lhs =
            std::abs(std::pow(l, 1.0 - gamma) * std::pow(t, alpha - 2.0) * mlf(alpha, beta, -l * std::pow(t, alpha)));
        return lhs / std::pow(t, alpha * gamma - 2.0);
    };
    return scaled_fit(ratio, lambdas, t_min, t_max);
}

} // namespace hilfer
