#include "hilfer/controllability.hpp"

#include "hilfer/error.hpp"
#include "hilfer/quadrature.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace hilfer {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

std::size_t default_space_points(std::size_t modes, std::size_t functions) {
    return std::max<std::size_t>(32, 4 * (modes + functions));
}

/// Samples phi_m(x_s) for m < count as a count x S matrix.
Eigen::MatrixXd basis_samples(const SpectralBasis& basis, const SpaceGrid& space, std::size_t count) {
    Eigen::MatrixXd phi(idx(count), idx(space.size()));
    for (std::size_t m = 0; m < count; ++m)
        for (std::size_t s = 0; s < space.size(); ++s)
            phi(idx(m), idx(s)) = basis.evaluate(m, space.nodes[s]);
    return phi;
}

/// Merges two sorted node lists, dropping points closer than tol to an earlier one.
std::vector<double> merge_nodes(const std::vector<double>& a, const std::vector<double>& b, double tol) {
    std::vector<double> all(a);
    all.insert(all.end(), b.begin(), b.end());
    std::sort(all.begin(), all.end());
    std::vector<double> out;
    for (const double t : all)
        if (out.empty() || t - out.back() > tol)
            out.push_back(t);
    return out;
}

/// z^p with the branch cut along the negative imaginary axis, arg z in (-pi/2, 3pi/2].
std::complex<double> shifted_power(std::complex<double> z, double p) {
    double arg = std::arg(z);
    if (arg <= -0.5 * std::numbers::pi)
        arg += 2.0 * std::numbers::pi;
    return std::polar(std::pow(std::abs(z), p), p * arg);
}

} // namespace

void ControlTemplate::validate() const {
    if (!basis)
        throw ValidationError("basis", "is missing");
    if (!(T > 0.0) || !std::isfinite(T))
        throw ValidationError("T", "final time must be positive");
    if (cells == 0)
        throw ValidationError("J", "needs at least one control cell");
    if (space_functions == 0)
        throw ValidationError("M_ctrl", "needs at least one spatial function");
    if (space_functions > basis->size())
        throw ValidationError("M_ctrl", "cannot exceed the number of modes");
    if (time_points == 0)
        throw ValidationError("time_points", "must be positive");
    for (const auto& [a, b] : omega.intervals())
        if (b > basis->length())
            throw ValidationError("omega", "extends beyond the spatial domain");
}

std::size_t ControlTemplate::spatial_points() const {
    return space_points > 0 ? space_points : default_space_points(basis->size(), space_functions);
}

ControlField ControlTemplate::control(const Eigen::VectorXd& coefficients) const {
    if (coefficients.size() != idx(unknowns()))
        throw ValidationError("control", "coefficient count must equal J * M_ctrl");
    Eigen::MatrixXd c(idx(cells), idx(space_functions));
    for (std::size_t j = 0; j < cells; ++j)
        for (std::size_t m = 0; m < space_functions; ++m)
            c(idx(j), idx(m)) = coefficients(idx(j * space_functions + m));
    return ControlField(omega, T, std::move(c));
}

double ControlMap::residual(const Eigen::VectorXd& coefficients, const Eigen::VectorXd& target) const {
    return weights.cwiseProduct(apply(coefficients) - target).norm();
}

ControlMap assemble_control_map(const ControlTemplate& setup, const SolveOptions& options) {
    setup.validate();
    const std::size_t N = setup.basis->size();
    const std::size_t K = setup.unknowns();
    ControlMap cm{setup, Eigen::MatrixXd::Zero(idx(2 * N), idx(K)), Eigen::VectorXd::Ones(idx(2 * N))};
    for (std::size_t n = 0; n < N; ++n)
        cm.weights(idx(n)) = std::pow(setup.basis->eigenvalue(n), setup.gamma());
    const TimeGrid grid = TimeGrid::uniform(setup.T, setup.cells);
    parallel_for(K, options.threads, [&](std::size_t k) {
        ForwardProblem problem{setup.order,
                               setup.basis,
                               grid,
                               Field::zero(setup.basis),
                               Field::zero(setup.basis),
                               ControlField::unit(setup.omega, setup.T, setup.cells, setup.space_functions,
                                                  k / setup.space_functions, k % setup.space_functions),
                               setup.gamma_choice};
        cm.matrix.col(idx(k)) = memory_state(problem).stacked();
    });
    return cm;
}

Eigen::VectorXd ObservationMap::row_scaling() const {
    const std::size_t S = space.size();
    Eigen::VectorXd w(idx(times.size() * S));
    for (std::size_t i = 0; i < times.size(); ++i)
        for (std::size_t s = 0; s < S; ++s)
            w(idx(i * S + s)) = std::sqrt(time_weights[i] * space.weights[s]);
    return w;
}

double ObservationMap::pairing(const Eigen::VectorXd& control_coefficients, const Eigen::VectorXd& data) const {
    const ControlField f = setup.control(control_coefficients);
    const Eigen::VectorXd obs = matrix * data;
    const Eigen::MatrixXd phi = basis_samples(*setup.basis, space, setup.space_functions);
    const std::size_t S = space.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const Eigen::VectorXd c = f.coefficients().row(idx(f.cell_of(times[i]))).transpose();
        const Eigen::VectorXd fx = phi.transpose() * c;
        double inner = 0.0;
        for (std::size_t s = 0; s < S; ++s)
            inner += space.weights[s] * fx(idx(s)) * obs(idx(i * S + s));
        acc += time_weights[i] * inner;
    }
    return acc;
}

ObservationMap assemble_observation_map(const ControlTemplate& setup, const SolveOptions& options) {
    setup.validate();
    const std::size_t N = setup.basis->size();
    const double gap = setup.order.nu_gap();
    ObservationMap om{setup, {}, {}, setup.omega.quadrature(setup.spatial_points()), {}};
    const double width = setup.T / static_cast<double>(setup.cells);
    for (std::size_t j = 0; j < setup.cells; ++j) {
        const double a = width * static_cast<double>(j);
        const double b = j + 1 == setup.cells ? setup.T : width * static_cast<double>(j + 1);
        if (j + 1 == setup.cells && gap > 0.0) {
            const QuadratureRule rule = gauss_jacobi(setup.time_points, 0.0, -gap, a, b);
            for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
                om.times.push_back(rule.nodes[q]);
                om.time_weights.push_back(rule.weights[q] * std::pow(setup.T - rule.nodes[q], gap));
            }
        } else {
            const QuadratureRule rule = gauss_legendre(setup.time_points, a, b);
            om.times.insert(om.times.end(), rule.nodes.begin(), rule.nodes.end());
            om.time_weights.insert(om.time_weights.end(), rule.weights.begin(), rule.weights.end());
        }
    }
    std::vector<double> nodes{0.0};
    nodes.insert(nodes.end(), om.times.begin(), om.times.end());
    nodes.push_back(setup.T);
    const TimeGrid grid = TimeGrid::from_nodes(nodes);

    const std::size_t S = om.space.size();
    const std::size_t P = om.times.size();
    om.matrix = Eigen::MatrixXd::Zero(idx(P * S), idx(2 * N));
    parallel_for(2 * N, options.threads, [&](std::size_t col) {
        Field v0 = Field::zero(setup.basis);
        Field v1 = Field::zero(setup.basis);
        (col < N ? v0 : v1).coefficients(idx(col % N)) = 1.0;
        const AdjointProblem problem{setup.order, setup.basis, grid, v0, v1, setup.gamma_choice};
        const OmegaSamples samples = restrict_to_omega(solve_adjoint(problem), om.space);
        for (std::size_t i = 0; i < P; ++i)
            for (std::size_t s = 0; s < S; ++s)
                om.matrix(idx(i * S + s), idx(col)) = samples.values(idx(i + 1), idx(s));
    });
    return om;
}

double duality_residual(const FractionalOrder& order, std::shared_ptr<const SpectralBasis> basis, const TimeGrid& grid,
                        const ControlField& f, const Field& v0, const Field& v1) {
    const ForwardProblem forward{order, basis, grid, Field::zero(basis), Field::zero(basis), f};
    const MemoryState ms = memory_state(forward);
    const double lhs = ms.mem_rate.coefficients.dot(v0.coefficients) + ms.mem.coefficients.dot(v1.coefficients);

    const double T = grid.T();
    const TimeGrid merged = TimeGrid::from_nodes(merge_nodes(grid.nodes(), f.edges(), 1e-12 * T));
    const AdjointProblem adjoint{order, basis, merged, v0, v1};
    const SpaceGrid space = f.omega().quadrature(default_space_points(basis->size(), f.space_functions()));
    const OmegaSamples samples = restrict_to_omega(solve_adjoint(adjoint), space);
    const Eigen::MatrixXd phi = basis_samples(*basis, space, f.space_functions());
    Eigen::VectorXd w(idx(space.size()));
    for (std::size_t s = 0; s < space.size(); ++s)
        w(idx(s)) = space.weights[s];

    const double a = -order.nu_gap();
    const auto& t = merged.nodes();
    double rhs = 0.0;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        const std::size_t cell = f.cell_of(0.5 * (t[i] + t[i + 1]));
        const Eigen::VectorXd fx = phi.transpose() * f.coefficients().row(idx(cell)).transpose();
        const Eigen::VectorXd wf = w.cwiseProduct(fx);
        const double r0 = samples.regular.row(idx(i)).dot(wf);
        const double r1 = samples.regular.row(idx(i + 1)).dot(wf);
        const double s0 = T - t[i];
        const double s1 = T - t[i + 1];
        const double h = t[i + 1] - t[i];
        const double m0 = (std::pow(s0, a + 1.0) - std::pow(s1, a + 1.0)) / (a + 1.0);
        const double m1 = (s0 * m0 - (std::pow(s0, a + 2.0) - std::pow(s1, a + 2.0)) / (a + 2.0)) / h;
        rhs += r0 * (m0 - m1) + r1 * m1;
    }
    return std::abs(lhs - rhs);
}

double duality_adjointness_residual(const ControlMap& cm, const ObservationMap& om, std::size_t probes, unsigned seed) {
    const auto N = cm.matrix.rows() / 2;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    double worst = 0.0;
    for (std::size_t p = 0; p < probes; ++p) {
        Eigen::VectorXd c(cm.matrix.cols());
        Eigen::VectorXd data(2 * N);
        for (Eigen::Index k = 0; k < c.size(); ++k)
            c(k) = normal(rng);
        for (Eigen::Index k = 0; k < data.size(); ++k)
            data(k) = normal(rng);
        const Eigen::VectorXd state = cm.apply(c);
        const double lhs = state.tail(N).dot(data.head(N)) + state.head(N).dot(data.tail(N));
        worst = std::max(worst, std::abs(lhs - om.pairing(c, data)));
    }
    return worst;
}

UcpReport ucp_smallest_singular_value(const ObservationMap& om) {
    const Eigen::Index cols = om.matrix.cols();
    UcpReport report;
    report.kernel = Eigen::VectorXd::Zero(cols);
    if (om.matrix.rows() == 0) {
        if (cols > 0)
            report.kernel(0) = 1.0;
        return report;
    }
    const Eigen::MatrixXd weighted = om.row_scaling().asDiagonal() * om.matrix;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(weighted, Eigen::ComputeThinV);
    const Eigen::VectorXd& sigma = svd.singularValues();
    report.sigma_max = sigma(0);
    if (sigma.size() < cols) {
        report.sigma_min = 0.0;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(weighted);
        report.kernel = lu.kernel().col(0).normalized();
    } else {
        report.sigma_min = sigma(cols - 1);
        report.kernel = svd.matrixV().col(cols - 1);
    }
    report.injective = report.sigma_min > UcpReport::floor;
    return report;
}

double ResidueReport::max_mismatch() const {
    double worst = 0.0;
    for (std::size_t g = 0; g < measured.size(); ++g)
        worst = std::max(worst, std::abs(measured[g] - predicted[g]));
    return worst;
}

bool ResidueReport::vanishes(double tol) const {
    return std::all_of(measured.begin(), measured.end(), [tol](double r) { return r <= tol; });
}

ResidueReport residue_diagnostic(const ControlTemplate& setup, const Field& v0, const Field& v1,
                                 std::size_t circle_points) {
    setup.validate();
    if (circle_points < 8)
        throw ValidationError("circle_points", "needs at least 8 points");
    const SpectralBasis& basis = *setup.basis;
    const std::size_t N = basis.size();
    if (v0.coefficients.size() != idx(N) || v1.coefficients.size() != idx(N))
        throw ValidationError("v0", "coefficient count must equal the number of modes");
    const double mu = setup.order.mu();
    const double b = (1.0 - setup.order.nu()) * (mu - 2.0);
    const double p1 = (b + 1.0) / mu;
    const double p0 = b / mu;
    const SpaceGrid space = setup.omega.quadrature(setup.spatial_points());
    const std::size_t S = space.size();
    const Eigen::MatrixXd phi = basis_samples(basis, space, N);
    const auto& lambda = basis.eigenvalues();

    const auto l2_omega = [&](const Eigen::VectorXcd& g) {
        double acc = 0.0;
        for (std::size_t s = 0; s < S; ++s)
            acc += space.weights[s] * std::norm(g(idx(s)));
        return std::sqrt(acc);
    };

    ResidueReport report;
    std::size_t start = 0;
    while (start < N) {
        std::size_t end = start + 1;
        while (end < N && std::abs(lambda[end] - lambda[start]) <= 1e-12 * lambda[start])
            ++end;
        const double l = lambda[start];
        double radius = 0.5 * l;
        if (start > 0)
            radius = std::min(radius, 0.5 * (l - lambda[start - 1]));
        if (end < N)
            radius = std::min(radius, 0.5 * (lambda[end] - l));

        Eigen::VectorXcd measured = Eigen::VectorXcd::Zero(idx(S));
        for (std::size_t q = 0; q < circle_points; ++q) {
            const std::complex<double> dir = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(q) /
                                                                 static_cast<double>(circle_points));
            const std::complex<double> eta = -l + radius * dir;
            const std::complex<double> e1 = shifted_power(eta, p1);
            const std::complex<double> e0 = shifted_power(eta, p0);
            Eigen::VectorXcd modal(idx(N));
            for (std::size_t k = 0; k < N; ++k)
                modal(idx(k)) = (v0.coefficients(idx(k)) * e1 + v1.coefficients(idx(k)) * e0) / (eta + lambda[k]);
            measured += (radius * dir / static_cast<double>(circle_points)) * (phi.transpose().cast<std::complex<double>>() * modal);
        }

        const std::complex<double> c1 = std::polar(std::pow(l, p1), std::numbers::pi * p1);
        const std::complex<double> c0 = std::polar(std::pow(l, p0), std::numbers::pi * p0);
        Eigen::VectorXcd predicted = Eigen::VectorXcd::Zero(idx(S));
        for (std::size_t k = start; k < end; ++k)
            predicted += (v0.coefficients(idx(k)) * c1 + v1.coefficients(idx(k)) * c0) *
                         phi.row(idx(k)).transpose().cast<std::complex<double>>();

        report.group_start.push_back(start);
        report.measured.push_back(l2_omega(measured));
        report.predicted.push_back(l2_omega(predicted));
        start = end;
    }
    return report;
}

ControlSynthesis synthesize_control(const ControlMap& cm, const MemoryState& target, double eps,
                                    const SynthesisOptions& options, const Eigen::VectorXd* start) {
    if (!(eps > 0.0) || !std::isfinite(eps))
        throw ValidationError("eps", "regularization must be positive");
    const Eigen::VectorXd y = target.stacked();
    if (y.size() != cm.matrix.rows())
        throw ValidationError("target", "memory state size does not match the control map");
    const Eigen::Index K = cm.matrix.cols();
    const Eigen::MatrixXd A = cm.weights.asDiagonal() * cm.matrix;
    const Eigen::VectorXd yw = cm.weights.cwiseProduct(y);
    const std::size_t budget = options.max_iterations > 0 ? options.max_iterations : 10 * static_cast<std::size_t>(K);

    Eigen::VectorXd x = Eigen::VectorXd::Zero(K);
    if (start) {
        if (start->size() != K)
            throw ValidationError("start", "warm start has the wrong size");
        x = *start;
    }
    const double scale = (A.transpose() * yw).norm();
    Eigen::VectorXd r = yw - A * x;
    Eigen::VectorXd s = A.transpose() * r - eps * x;
    Eigen::VectorXd p = s;
    double gamma = s.squaredNorm();
    std::size_t it = 0;
    const double stop = options.tol * scale;
    while (std::sqrt(gamma) > stop) {
        if (it == budget) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "conjugate gradients did not converge in " << budget << " iterations (eps=" << eps
                << ", residual=" << r.norm() << ", normal-equation residual=" << std::sqrt(gamma) << ")";
            throw NumericalError(msg.str());
        }
        const Eigen::VectorXd q = A * p;
        const double delta = q.squaredNorm() + eps * p.squaredNorm();
        const double alpha = gamma / delta;
        x += alpha * p;
        r -= alpha * q;
        s = A.transpose() * r - eps * x;
        const double next = s.squaredNorm();
        p = s + (next / gamma) * p;
        gamma = next;
        ++it;
    }
    ControlSynthesis out;
    out.coefficients = x;
    out.residual = cm.residual(x, y);
    out.control_norm = x.norm();
    out.iterations = it;
    return out;
}

std::vector<ControlRecord> controllability_report(const ControlMap& cm, const std::vector<MemoryState>& targets,
                                                  const std::vector<double>& eps_path,
                                                  const SynthesisOptions& options) {
    std::vector<ControlRecord> out;
    for (std::size_t id = 0; id < targets.size(); ++id) {
        Eigen::VectorXd warm = Eigen::VectorXd::Zero(cm.matrix.cols());
        for (const double eps : eps_path) {
            const auto t0 = std::chrono::steady_clock::now();
            const ControlSynthesis result = synthesize_control(cm, targets[id], eps, options, &warm);
            const auto t1 = std::chrono::steady_clock::now();
            warm = result.coefficients;
            out.push_back(ControlRecord{id, eps, result.residual, result.control_norm, result.iterations,
                                        std::chrono::duration<double>(t1 - t0).count()});
        }
    }
    return out;
}

std::vector<double> default_eps_path() {
    std::vector<double> path;
    for (int k = 1; k <= 8; ++k)
        path.push_back(std::pow(10.0, -k));
    return path;
}

} // namespace hilfer
