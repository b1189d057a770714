#include "hilfer/fracops.hpp"

#include "hilfer/error.hpp"
#include "hilfer/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hilfer {

namespace {

constexpr std::size_t kJacobiPoints = 12;

// m0 = int_0^1 (A + h x)^{alpha-1} dx and m1 = int_0^1 (A + h x)^{alpha-1} x dx.
void kernel_moments(double alpha, double A, double h, double& m0, double& m1) {
    if (A == 0.0) {
        const double p = std::pow(h, alpha - 1.0);
        m0 = p / alpha;
        m1 = p / (alpha + 1.0);
        return;
    }
    if (A > 4.0 * h) {
        // binomial series in h/A avoids cancellation far from the kernel singularity
        const double eps = h / A;
        double c = 1.0;
        double s0 = 0.0;
        double s1 = 0.0;
        for (int n = 0; n < 200; ++n) {
            s0 += c / (n + 1.0);
            s1 += c / (n + 2.0);
            c *= (alpha - 1.0 - n) / (n + 1.0) * eps;
            if (std::abs(c) < 1e-18)
                break;
        }
        const double p = std::pow(A, alpha - 1.0);
        m0 = p * s0;
        m1 = p * s1;
        return;
    }
    const double B = A + h;
    const double da = std::pow(B, alpha) - std::pow(A, alpha);
    const double da1 = std::pow(B, alpha + 1.0) - std::pow(A, alpha + 1.0);
    m0 = da / (alpha * h);
    m1 = (da1 / (alpha + 1.0) - A * da / alpha) / (h * h);
}

GridFunction weighted_left(double alpha, const GridFunction& g, double a) {
    const auto& t = g.grid.nodes();
    const std::size_t M = g.grid.intervals();
    const QuadratureRule plain = gauss_jacobi(kJacobiPoints, 0.0, 0.0);
    const QuadratureRule at_origin = gauss_jacobi(kJacobiPoints, 0.0, a);
    const QuadratureRule at_kernel = gauss_jacobi(kJacobiPoints, alpha - 1.0, 0.0);
    const QuadratureRule both = gauss_jacobi(kJacobiPoints, alpha - 1.0, a);

    GridFunction out{g.grid, std::vector<double>(M + 1, 0.0)};
    const double scale = rgamma(alpha);
    for (std::size_t j = 1; j <= M; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < j; ++k) {
            const double lo = t[k];
            const double hi = t[k + 1];
            const double half = 0.5 * (hi - lo);
            const bool first = k == 0;
            const bool last = k + 1 == j;
            const QuadratureRule& rule = first ? (last ? both : at_origin) : (last ? at_kernel : plain);
            const double ea = first ? a : 0.0;
            const double eb = last ? alpha - 1.0 : 0.0;
            const double map = std::pow(half, ea + eb + 1.0);
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                const double s = lo + half * (1.0 + rule.nodes[i]);
                double f = rule.weights[i] * map;
                if (!first)
                    f *= std::pow(s, a);
                if (!last)
                    f *= std::pow(t[j] - s, alpha - 1.0);
                const double x = (s - lo) / (hi - lo);
                acc += f * ((1.0 - x) * g.values[k] + x * g.values[k + 1]);
            }
        }
        out.values[j] = acc * scale;
    }
    const double order_at_origin = a + alpha;
    if (std::abs(order_at_origin) <= 1e-14)
        out.values[0] = g.values[0] * std::tgamma(1.0 + a);
    else if (order_at_origin < 0.0)
        out.values[0] = std::numeric_limits<double>::quiet_NaN();
    return out;
}

GridFunction reversed(const GridFunction& g) {
    GridFunction out{g.grid.mirrored(), g.values};
    std::reverse(out.values.begin(), out.values.end());
    return out;
}

void check_same_grid(const GridFunction& f, const GridFunction& g) {
    if (f.grid.nodes() != g.grid.nodes())
        throw ValidationError("grid", "functions must share one time grid");
}

// Finite-difference weights for derivatives 0..m at x0 over nodes xs.
std::vector<std::vector<double>> fd_weights(double x0, const std::vector<double>& xs, int m) {
    const std::size_t n = xs.size();
    std::vector<std::vector<double>> c(static_cast<std::size_t>(m) + 1, std::vector<double>(n, 0.0));
    double c1 = 1.0;
    double c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        const int mn = std::min<int>(static_cast<int>(i), m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = xs[i] - x0;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = xs[i] - xs[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    return c;
}

// Centered stencils of `width` nodes in the interior and one-sided stencils of `end_width` nodes
// where the centered stencil does not fit.
GridFunction stencil_derivative(const GridFunction& g, int order, std::size_t width, std::size_t end_width) {
    const auto& t = g.grid.nodes();
    const std::size_t n = t.size();
    if (n < end_width)
        throw ValidationError("grid", "too few nodes for the difference stencil");
    GridFunction out{g.grid, std::vector<double>(n, 0.0)};
    const std::size_t half = width / 2;
    std::vector<double> xs;
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t first = j - half;
        std::size_t count = width;
        if (j < half) {
            first = 0;
            count = end_width;
        } else if (j + half >= n) {
            first = n - end_width;
            count = end_width;
        }
        xs.assign(t.begin() + static_cast<std::ptrdiff_t>(first), t.begin() + static_cast<std::ptrdiff_t>(first + count));
        const auto w = fd_weights(t[j], xs, order);
        double acc = 0.0;
        for (std::size_t i = 0; i < count; ++i)
            acc += w[static_cast<std::size_t>(order)][i] * g.values[first + i];
        out.values[j] = acc;
    }
    return out;
}

} // namespace

FractionalOrder::FractionalOrder(double mu, double nu) : mu_(mu), nu_(nu) {
    if (!std::isfinite(mu) || !(mu > 1.0) || mu > 2.0)
        throw ValidationError("mu", "must lie in (1, 2]");
    if (!std::isfinite(nu) || nu < 0.0 || nu > 1.0)
        throw ValidationError("nu", "must lie in [0, 1]");
}

TimeGrid::TimeGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.size() < 2)
        throw ValidationError("grid", "needs at least one interval");
    if (nodes_.front() != 0.0)
        throw ValidationError("grid", "must start at t = 0");
    for (std::size_t j = 1; j < nodes_.size(); ++j)
        if (!(nodes_[j] > nodes_[j - 1]) || !std::isfinite(nodes_[j]))
            throw ValidationError("grid", "nodes must be finite and strictly increasing");
}

TimeGrid TimeGrid::uniform(double T, std::size_t intervals) {
    return graded(T, intervals, 1.0);
}

TimeGrid TimeGrid::graded(double T, std::size_t intervals, double exponent) {
    if (!(T > 0.0) || !std::isfinite(T))
        throw ValidationError("T", "must be positive");
    if (intervals == 0)
        throw ValidationError("M", "must be positive");
    if (!(exponent >= 1.0))
        throw ValidationError("grading", "must be at least 1");
    std::vector<double> t(intervals + 1);
    for (std::size_t j = 0; j <= intervals; ++j)
        t[j] = T * std::pow(static_cast<double>(j) / static_cast<double>(intervals), exponent);
    t.back() = T;
    return TimeGrid(std::move(t));
}

TimeGrid TimeGrid::graded_right(double T, std::size_t intervals, double exponent) {
    return graded(T, intervals, exponent).mirrored();
}

TimeGrid TimeGrid::from_nodes(std::vector<double> nodes) {
    return TimeGrid(std::move(nodes));
}

double TimeGrid::max_step() const {
    double h = 0.0;
    for (std::size_t j = 1; j < nodes_.size(); ++j)
        h = std::max(h, nodes_[j] - nodes_[j - 1]);
    return h;
}

TimeGrid TimeGrid::mirrored() const {
    const double T = nodes_.back();
    std::vector<double> t(nodes_.size());
    for (std::size_t j = 0; j < t.size(); ++j)
        t[j] = T - nodes_[nodes_.size() - 1 - j];
    t.front() = 0.0;
    t.back() = T;
    return TimeGrid(std::move(t));
}

GridFunction GridFunction::sample(const TimeGrid& grid, const std::function<double(double)>& f) {
    GridFunction g{grid, std::vector<double>(grid.size())};
    for (std::size_t j = 0; j < grid.size(); ++j)
        g.values[j] = f(grid[j]);
    return g;
}

double GridFunction::operator()(double t) const {
    const auto& x = grid.nodes();
    if (t <= x.front())
        return values.front();
    if (t >= x.back())
        return values.back();
    const auto it = std::upper_bound(x.begin(), x.end(), t);
    const auto k = static_cast<std::size_t>(it - x.begin()) - 1;
    const double w = (t - x[k]) / (x[k + 1] - x[k]);
    return (1.0 - w) * values[k] + w * values[k + 1];
}

GridFunction frac_integral_left(double alpha, const GridFunction& g, double weight_exponent) {
    if (!std::isfinite(alpha) || alpha < 0.0)
        throw ValidationError("alpha", "integral order must be non-negative");
    if (!(weight_exponent > -1.0))
        throw ValidationError("weight_exponent", "must exceed -1");
    if (g.values.size() != g.grid.size())
        throw ValidationError("values", "size does not match the grid");

    if (alpha == 0.0) {
        GridFunction out = g;
        if (weight_exponent != 0.0)
            for (std::size_t j = 0; j < out.size(); ++j)
                out.values[j] *= std::pow(g.grid[j], weight_exponent);
        return out;
    }
    if (weight_exponent != 0.0)
        return weighted_left(alpha, g, weight_exponent);

    const auto& t = g.grid.nodes();
    const std::size_t M = g.grid.intervals();
    GridFunction out{g.grid, std::vector<double>(M + 1, 0.0)};
    const double scale = rgamma(alpha);
    for (std::size_t j = 1; j <= M; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < j; ++k) {
            const double h = t[k + 1] - t[k];
            double m0 = 0.0;
            double m1 = 0.0;
            kernel_moments(alpha, t[j] - t[k + 1], h, m0, m1);
            acc += h * (m1 * g.values[k] + (m0 - m1) * g.values[k + 1]);
        }
        out.values[j] = acc * scale;
    }
    return out;
}

GridFunction frac_integral_right(double alpha, const GridFunction& g, double weight_exponent) {
    GridFunction out = reversed(frac_integral_left(alpha, reversed(g), weight_exponent));
    out.grid = g.grid;
    return out;
}

GridFunction differentiate(const GridFunction& g) {
    return stencil_derivative(g, 1, 5, 5);
}

GridFunction differentiate2(const GridFunction& g) {
    return stencil_derivative(g, 2, 5, 6);
}

GridFunction hilfer_derivative_left(const FractionalOrder& order, const GridFunction& g, double weight_exponent) {
    const GridFunction inner = frac_integral_left(order.beta(), g, weight_exponent);
    return frac_integral_left(order.nu_gap(), differentiate2(inner));
}

GridFunction hilfer_derivative_right(const FractionalOrder& order, const GridFunction& g, double weight_exponent) {
    const GridFunction inner = frac_integral_right(order.beta(), g, weight_exponent);
    return frac_integral_right(order.nu_gap(), differentiate2(inner));
}

GridFunction rl_derivative_right(double alpha, const GridFunction& g, double weight_exponent) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw ValidationError("alpha", "derivative order must lie in (0, 1]");
    GridFunction d = differentiate(frac_integral_right(1.0 - alpha, g, weight_exponent));
    for (auto& x : d.values)
        x = -x;
    return d;
}

GridFunction convolution(const GridFunction& f, const GridFunction& g) {
    check_same_grid(f, g);
    const auto& t = g.grid.nodes();
    GridFunction out{g.grid, std::vector<double>(t.size(), 0.0)};
    for (std::size_t j = 1; j < t.size(); ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < j; ++k) {
            const double h = t[k + 1] - t[k];
            acc += 0.5 * h * (f(t[j] - t[k]) * g.values[k] + f(t[j] - t[k + 1]) * g.values[k + 1]);
        }
        out.values[j] = acc;
    }
    return out;
}

double integrate(const GridFunction& g) {
    const auto& t = g.grid.nodes();
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < t.size(); ++k)
        acc += 0.5 * (t[k + 1] - t[k]) * (g.values[k] + g.values[k + 1]);
    return acc;
}

GridFunction multiply(const GridFunction& f, const GridFunction& g) {
    check_same_grid(f, g);
    GridFunction out = f;
    for (std::size_t j = 0; j < out.size(); ++j)
        out.values[j] *= g.values[j];
    return out;
}

double power_law_residual(double alpha, double p, const TimeGrid& grid) {
    if (!(p > -1.0))
        throw ValidationError("p", "power must exceed -1");
    const double c = std::exp(std::lgamma(p + 1.0) - std::lgamma(p + 1.0 + alpha));
    // negative powers are carried by the weight so the interpolated data stays smooth
    const GridFunction one = GridFunction::sample(grid, [](double) { return 1.0; });
    const GridFunction result = frac_integral_left(alpha, one, p);
    double worst = 0.0;
    for (std::size_t j = 1; j < grid.size(); ++j)
        worst = std::max(worst, std::abs(result.values[j] - c * std::pow(grid[j], p + alpha)));
    return worst;
}

double semigroup_residual(double a, double b, const GridFunction& g) {
    const GridFunction lhs = frac_integral_left(a, frac_integral_left(b, g));
    const GridFunction rhs = frac_integral_left(a + b, g);
    double worst = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j)
        worst = std::max(worst, std::abs(lhs.values[j] - rhs.values[j]));
    return worst;
}

double convolution_commute_residual(double alpha, const GridFunction& f, const GridFunction& g) {
    const GridFunction lhs = frac_integral_left(alpha, convolution(f, g));
    const GridFunction rhs = convolution(frac_integral_left(alpha, f), g);
    double worst = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j)
        worst = std::max(worst, std::abs(lhs.values[j] - rhs.values[j]));
    return worst;
}

double ipf_residual(double alpha, const GridFunction& phi, const GridFunction& psi) {
    check_same_grid(phi, psi);
    const double lhs = integrate(multiply(phi, frac_integral_left(alpha, psi)));
    const double rhs = integrate(multiply(psi, frac_integral_right(alpha, phi)));
    return std::abs(lhs - rhs);
}

IbpReport ibp_residual(const FractionalOrder& order, const GridFunction& u, const GridFunction& v) {
    check_same_grid(u, v);
    const FractionalOrder dual(order.mu(), 1.0 - order.nu());
    const double gap = order.nu_gap();

    IbpReport r;
    r.lhs = integrate(multiply(v, hilfer_derivative_left(order, u)));
    r.interior = integrate(multiply(u, hilfer_derivative_right(dual, v)));

    const GridFunction J = frac_integral_left(order.beta(), u);
    const GridFunction dJ = differentiate(J);
    const GridFunction W = frac_integral_right(gap, v);
    const GridFunction DW = rl_derivative_right(1.0 - gap, v);
    const std::size_t last = u.size() - 1;
    auto bracket = [&](std::size_t j) { return J.values[j] * DW.values[j] + dJ.values[j] * W.values[j]; };
    r.boundary = bracket(last) - bracket(0);
    r.residual = std::abs(r.lhs - r.interior - r.boundary);
    return r;
}

IdentityResiduals identity_residuals(const FractionalOrder& order, double T, std::size_t intervals) {
    const TimeGrid graded = TimeGrid::graded(T, intervals, 2.0);
    const TimeGrid uniform = TimeGrid::uniform(T, intervals);
    const auto on = [T](const TimeGrid& grid, double (*f)(double, double)) {
        return GridFunction::sample(grid, [&](double t) { return f(t, T); });
    };

    IdentityResiduals r;
    const double alpha = 0.5;
    const double c = 2.0 * rgamma(3.0 + alpha);
    const GridFunction power = frac_integral_left(alpha, on(graded, [](double t, double) { return t * t; }));
    for (std::size_t j = 0; j < graded.size(); ++j)
        r.power_law = std::max(r.power_law, std::abs(power.values[j] - c * std::pow(graded[j], 2.0 + alpha)));
    r.semigroup = semigroup_residual(0.4, 0.7, on(graded, [](double t, double) { return std::sin(2.0 * t) + 1.0; }));
    r.convolution = convolution_commute_residual(0.7, on(graded, [](double t, double) { return std::sin(t); }),
                                                 on(graded, [](double t, double) { return 1.0 + t * t; }));
    r.ipf = ipf_residual(alpha, on(graded, [](double t, double T) { return (T - t) * std::exp(-t); }),
                         on(graded, [](double t, double) { return std::cos(t); }));
    r.ibp = ibp_residual(order, on(uniform, [](double t, double) { return t * t * t; }),
                         on(uniform, [](double t, double T) { return std::pow(T - t, 3.0) * (1.0 + t / T); }))
                .residual;
    return r;
}

double empirical_order(const std::vector<double>& steps, const std::vector<double>& residuals) {
    if (steps.size() != residuals.size() || steps.size() < 2)
        throw ValidationError("refinement", "needs at least two matching levels");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(steps.size());
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const double x = std::log(steps[i]);
        const double y = std::log(residuals[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace hilfer
