#include "hilfer/spectral.hpp"

#include "hilfer/error.hpp"
#include "hilfer/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hilfer {

SpectralBasis::SpectralBasis(std::vector<double> eigenvalues, Eigenfunction phi, double length)
    : eigenvalues_(std::move(eigenvalues)), phi_(std::move(phi)), length_(length) {
    if (eigenvalues_.empty())
        throw ValidationError("basis", "needs at least one mode");
    if (!(length_ > 0.0) || !std::isfinite(length_))
        throw ValidationError("L", "domain length must be positive");
    if (!phi_)
        throw ValidationError("basis", "eigenfunction callback is empty");
    if (!(eigenvalues_.front() > 0.0))
        throw ValidationError("eigenvalues", "must be positive");
    for (std::size_t n = 1; n < eigenvalues_.size(); ++n)
        if (!(eigenvalues_[n] >= eigenvalues_[n - 1]) || !std::isfinite(eigenvalues_[n]))
            throw ValidationError("eigenvalues", "must be finite and nondecreasing");
}

std::shared_ptr<const SpectralBasis> SpectralBasis::dirichlet(double length, std::size_t modes, double power) {
    if (!(length > 0.0))
        throw ValidationError("L", "domain length must be positive");
    if (modes == 0)
        throw ValidationError("N", "needs at least one mode");
    if (!(power > 0.0))
        throw ValidationError("s", "operator power must be positive");
    std::vector<double> lambda(modes);
    for (std::size_t n = 0; n < modes; ++n)
        lambda[n] = std::pow(std::pow((n + 1) * std::numbers::pi / length, 2.0), power);
    const double scale = std::sqrt(2.0 / length);
    auto phi = [length, scale](std::size_t n, double x) {
        return scale * std::sin((n + 1) * std::numbers::pi * x / length);
    };
    return std::make_shared<const SpectralBasis>(std::move(lambda), phi, length);
}

std::shared_ptr<const SpectralBasis> spectral_fractional(const SpectralBasis& base, double power) {
    if (!(power > 0.0) || power > 1.0)
        throw ValidationError("s", "fractional power must lie in (0, 1]");
    std::vector<double> lambda(base.eigenvalues());
    for (auto& l : lambda)
        l = std::pow(l, power);
    auto phi = [base](std::size_t n, double x) { return base.evaluate(n, x); };
    return std::make_shared<const SpectralBasis>(std::move(lambda), phi, base.length());
}

SpaceGrid SpaceGrid::trapezoid(double length, std::size_t points) {
    if (points < 2)
        throw ValidationError("P", "needs at least two nodes");
    SpaceGrid g;
    g.nodes.resize(points);
    g.weights.resize(points);
    const double h = length / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
        g.nodes[i] = h * static_cast<double>(i);
        g.weights[i] = (i == 0 || i + 1 == points) ? 0.5 * h : h;
    }
    g.nodes.back() = length;
    return g;
}

Subdomain::Subdomain(std::vector<std::pair<double, double>> intervals, double length)
    : intervals_(std::move(intervals)) {
    std::sort(intervals_.begin(), intervals_.end());
    for (std::size_t i = 0; i < intervals_.size(); ++i) {
        const auto [a, b] = intervals_[i];
        if (!(a < b) || a < 0.0 || b > length)
            throw ValidationError("omega", "intervals must satisfy 0 <= a < b <= L");
        if (i > 0 && a < intervals_[i - 1].second)
            throw ValidationError("omega", "intervals must be disjoint");
    }
}

double Subdomain::measure() const {
    double m = 0.0;
    for (const auto& [a, b] : intervals_)
        m += b - a;
    return m;
}

bool Subdomain::contains(double x) const {
    return std::any_of(intervals_.begin(), intervals_.end(), [x](const auto& iv) { return x > iv.first && x < iv.second; });
}

SpaceGrid Subdomain::quadrature(std::size_t points_per_interval) const {
    SpaceGrid g;
    for (const auto& [a, b] : intervals_) {
        const auto rule = gauss_legendre(points_per_interval, a, b);
        g.nodes.insert(g.nodes.end(), rule.nodes.begin(), rule.nodes.end());
        g.weights.insert(g.weights.end(), rule.weights.begin(), rule.weights.end());
    }
    return g;
}

Field Field::zero(std::shared_ptr<const SpectralBasis> basis) {
    const auto n = static_cast<Eigen::Index>(basis->size());
    return Field{std::move(basis), Eigen::VectorXd::Zero(n)};
}

Field Field::mode(std::shared_ptr<const SpectralBasis> basis, std::size_t n, double amplitude) {
    if (n >= basis->size())
        throw ValidationError("mode", "index exceeds the basis size");
    Field f = zero(std::move(basis));
    f.coefficients(static_cast<Eigen::Index>(n)) = amplitude;
    return f;
}

double Field::operator()(double x) const {
    double acc = 0.0;
    for (std::size_t n = 0; n < basis->size(); ++n)
        acc += coefficients(static_cast<Eigen::Index>(n)) * basis->evaluate(n, x);
    return acc;
}

Field project(const std::vector<double>& samples, std::shared_ptr<const SpectralBasis> basis, const SpaceGrid& grid) {
    if (samples.size() != grid.size())
        throw ValidationError("samples", "size does not match the spatial grid");
    Field f = Field::zero(basis);
    for (std::size_t n = 0; n < basis->size(); ++n) {
        double acc = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i)
            acc += grid.weights[i] * samples[i] * basis->evaluate(n, grid.nodes[i]);
        f.coefficients(static_cast<Eigen::Index>(n)) = acc;
    }
    return f;
}

std::vector<double> synthesize(const Field& field, const std::vector<double>& nodes) {
    std::vector<double> out(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i)
        out[i] = field(nodes[i]);
    return out;
}

double v_gamma_norm(const Eigen::VectorXd& coefficients, const std::vector<double>& eigenvalues, double gamma) {
    if (static_cast<std::size_t>(coefficients.size()) > eigenvalues.size())
        throw ValidationError("coefficients", "more coefficients than eigenvalues");
    double acc = 0.0;
    for (Eigen::Index n = 0; n < coefficients.size(); ++n) {
        const double w = std::pow(eigenvalues[static_cast<std::size_t>(n)], gamma);
        acc += w * w * coefficients(n) * coefficients(n);
    }
    return std::sqrt(acc);
}

double v_gamma_norm(const Field& field, double gamma) {
    return v_gamma_norm(field.coefficients, field.basis->eigenvalues(), gamma);
}

double bilinear_form(const Field& u, const Field& v) {
    if (u.basis != v.basis && u.basis->eigenvalues() != v.basis->eigenvalues())
        throw ValidationError("basis", "fields live on different bases");
    if (u.coefficients.size() != v.coefficients.size())
        throw ValidationError("coefficients", "fields have different lengths");
    double acc = 0.0;
    for (Eigen::Index n = 0; n < u.coefficients.size(); ++n)
        acc += u.basis->eigenvalue(static_cast<std::size_t>(n)) * u.coefficients(n) * v.coefficients(n);
    return acc;
}

Eigen::MatrixXd omega_gram(const SpectralBasis& basis, const SpaceGrid& omega, std::size_t rows, std::size_t cols) {
    const std::size_t k = std::max(rows, cols);
    if (k > basis.size())
        throw ValidationError("gram", "requested more functions than the basis holds");
    Eigen::MatrixXd phi(static_cast<Eigen::Index>(omega.size()), static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < omega.size(); ++i)
        for (std::size_t n = 0; n < k; ++n)
            phi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n)) =
                std::sqrt(omega.weights[i]) * basis.evaluate(n, omega.nodes[i]);
    const Eigen::MatrixXd full = phi.transpose() * phi;
    return full.topLeftCorner(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

double orthonormality_defect(const SpectralBasis& basis, const SpaceGrid& grid) {
    const Eigen::MatrixXd g = omega_gram(basis, grid, basis.size(), basis.size());
    return (g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

} // namespace hilfer
