#include "hilfer/cli.hpp"

#include "hilfer/adjoint.hpp"
#include "hilfer/controllability.hpp"
#include "hilfer/error.hpp"
#include "hilfer/forward.hpp"
#include "hilfer/fracops.hpp"
#include "hilfer/mlf.hpp"
#include "hilfer/spectral.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

namespace hilfer::cli {

namespace {

using json = nlohmann::json;

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

std::string fmt(double x) {
    if (std::isnan(x))
        return "nan";
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

/// Read-only view of the configuration document with dotted-path lookups.
class Config {
public:
    Config() : root_(json::object()) {}
    explicit Config(json root) : root_(std::move(root)) {
        if (!root_.is_object())
            throw ValidationError("config", "top level must be a JSON object");
    }

    const json* find(const std::string& path) const {
        const json* node = &root_;
        std::size_t start = 0;
        while (start <= path.size()) {
            const std::size_t dot = path.find('.', start);
            const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
            if (node->is_array()) {
                if (key.empty() || key.find_first_not_of("0123456789") != std::string::npos)
                    return nullptr;
                const std::size_t i = std::stoul(key);
                if (i >= node->size())
                    return nullptr;
                node = &(*node)[i];
            } else if (node->is_object()) {
                const auto it = node->find(key);
                if (it == node->end())
                    return nullptr;
                node = &*it;
            } else {
                return nullptr;
            }
            if (dot == std::string::npos)
                break;
            start = dot + 1;
        }
        return node;
    }

    double number(const std::string& path, std::optional<double> fallback = std::nullopt) const {
        const json* v = find(path);
        if (!v) {
            if (fallback)
                return *fallback;
            throw ValidationError(path, "is required");
        }
        if (!v->is_number())
            throw ValidationError(path, "must be a number");
        const double x = v->get<double>();
        if (!std::isfinite(x))
            throw ValidationError(path, "must be finite");
        return x;
    }

    std::size_t count(const std::string& path, std::size_t fallback) const {
        const json* v = find(path);
        if (!v)
            return fallback;
        if (!v->is_number_integer() || v->get<long long>() < 0)
            throw ValidationError(path, "must be a non-negative integer");
        return static_cast<std::size_t>(v->get<long long>());
    }

    std::string text(const std::string& path, const std::string& fallback) const {
        const json* v = find(path);
        if (!v)
            return fallback;
        if (!v->is_string())
            throw ValidationError(path, "must be a string");
        return v->get<std::string>();
    }

private:
    json root_;
};

Config load_config(const std::string& path) {
    if (path.empty())
        return Config();
    std::ifstream in(path);
    if (!in)
        throw ValidationError("config", "cannot open " + path);
    try {
        return Config(json::parse(in));
    } catch (const json::parse_error& e) {
        throw ValidationError("config", std::string("invalid JSON: ") + e.what());
    }
}

FractionalOrder read_order(const Config& c) {
    try {
        return FractionalOrder(c.number("order.mu"), c.number("order.nu"));
    } catch (const ValidationError& e) {
        if (e.field().rfind("order.", 0) == 0)
            throw;
        const std::string what = e.what();
        throw ValidationError("order." + e.field(), what.substr(e.field().size() + 2));
    }
}

std::shared_ptr<const SpectralBasis> read_basis(const Config& c) {
    const std::string type = c.text("basis.type", "dirichlet");
    if (type != "dirichlet")
        throw ValidationError("basis.type", "unknown basis '" + type + "'");
    return SpectralBasis::dirichlet(c.number("basis.L", std::numbers::pi), c.count("basis.N", 8), c.number("basis.s", 1.0));
}

GammaChoice read_gamma(const Config& c) {
    const std::string g = c.text("run.gamma", "inverse_mu");
    if (g == "inverse_mu")
        return GammaChoice::InverseMu;
    if (g == "half")
        return GammaChoice::Half;
    throw ValidationError("run.gamma", "must be 'inverse_mu' or 'half'");
}

/// Uniform grid, or graded toward the singular end when grid.grading > 1.
TimeGrid read_grid(const Config& c, bool right_end) {
    const double T = c.number("grid.T", 1.0);
    const std::size_t M = c.count("grid.M", 64);
    const double r = c.number("grid.grading", 1.0);
    if (r == 1.0)
        return TimeGrid::uniform(T, M);
    return right_end ? TimeGrid::graded_right(T, M, r) : TimeGrid::graded(T, M, r);
}

std::vector<std::size_t> read_ladder(const Config& c) {
    const json* v = c.find("grid.refinement");
    if (!v)
        return {64, 128, 256, 512};
    if (!v->is_array() || v->size() < 2)
        throw ValidationError("grid.refinement", "must list at least two interval counts");
    std::vector<std::size_t> out;
    for (const auto& x : *v) {
        if (!x.is_number_integer() || x.get<long long>() < 1)
            throw ValidationError("grid.refinement", "entries must be positive integers");
        out.push_back(static_cast<std::size_t>(x.get<long long>()));
    }
    return out;
}

Eigen::VectorXd random_vector(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::VectorXd v(idx(n));
    for (std::size_t i = 0; i < n; ++i)
        v(idx(i)) = normal(rng);
    return v;
}

/// Coefficient vector from a list of numbers (zero-padded) or a preset: "zero", "mode<k>" (1-based), "random".
Eigen::VectorXd read_coefficients(const Config& c, const std::string& path, std::size_t n, std::uint64_t seed,
                                  const std::string& fallback) {
    const json* v = c.find(path);
    json value = v ? *v : json(fallback);
    if (value.is_array()) {
        if (value.size() > n)
            throw ValidationError(path, "more coefficients than modes");
        Eigen::VectorXd out = Eigen::VectorXd::Zero(idx(n));
        for (std::size_t i = 0; i < value.size(); ++i) {
            if (!value[i].is_number())
                throw ValidationError(path, "coefficients must be numbers");
            out(idx(i)) = value[i].get<double>();
        }
        return out;
    }
    if (!value.is_string())
        throw ValidationError(path, "must be a coefficient list or a preset name");
    const std::string name = value.get<std::string>();
    if (name == "zero")
        return Eigen::VectorXd::Zero(idx(n));
    if (name == "random")
        return random_vector(n, seed);
    if (name.rfind("mode", 0) == 0) {
        std::size_t k = 0;
        try {
            k = static_cast<std::size_t>(std::stoul(name.substr(4)));
        } catch (const std::exception&) {
            throw ValidationError(path, "unknown preset '" + name + "'");
        }
        if (k < 1 || k > n)
            throw ValidationError(path, "mode index out of range");
        Eigen::VectorXd out = Eigen::VectorXd::Zero(idx(n));
        out(idx(k - 1)) = 1.0;
        return out;
    }
    throw ValidationError(path, "unknown preset '" + name + "'");
}

Field read_field(const Config& c, const std::string& path, std::shared_ptr<const SpectralBasis> basis,
                 std::uint64_t seed, const std::string& fallback = "zero") {
    return Field{basis, read_coefficients(c, path, basis->size(), seed, fallback)};
}

Subdomain read_omega(const Config& c, double L) {
    const json* v = c.find("control.omega");
    if (!v)
        return Subdomain({{0.2 * L, 0.6 * L}}, L);
    if (!v->is_array())
        throw ValidationError("control.omega", "must be a list of [a, b] intervals");
    std::vector<std::pair<double, double>> intervals;
    for (const auto& iv : *v) {
        if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number())
            throw ValidationError("control.omega", "each interval must be [a, b]");
        intervals.emplace_back(iv[0].get<double>(), iv[1].get<double>());
    }
    try {
        return Subdomain(std::move(intervals), L);
    } catch (const ValidationError& e) {
        throw ValidationError("control.omega", e.what());
    }
}

ControlTemplate read_template(const Config& c) {
    const auto basis = read_basis(c);
    ControlTemplate t{read_order(c), basis, c.number("grid.T", 1.0), read_omega(c, basis->length()),
                      c.count("control.J", 16), c.count("control.M_ctrl", std::min<std::size_t>(8, basis->size())),
                      read_gamma(c), c.count("control.time_points", 12), c.count("control.space_points", 0)};
    t.validate();
    return t;
}

/// J x M control coefficients from a nested list or "random".
ControlField read_control(const Config& c, const ControlTemplate& t) {
    const json* v = c.find("control.coefficients");
    const std::uint64_t seed = c.count("control.seed", 11);
    if (!v || (v->is_string() && v->get<std::string>() == "random"))
        return t.control(random_vector(t.unknowns(), seed));
    if (!v->is_array() || v->size() != t.cells)
        throw ValidationError("control.coefficients", "must hold J rows");
    Eigen::VectorXd flat(idx(t.unknowns()));
    for (std::size_t j = 0; j < t.cells; ++j) {
        const json& row = (*v)[j];
        if (!row.is_array() || row.size() != t.space_functions)
            throw ValidationError("control.coefficients", "each row must hold M_ctrl numbers");
        for (std::size_t m = 0; m < t.space_functions; ++m) {
            if (!row[m].is_number())
                throw ValidationError("control.coefficients", "entries must be numbers");
            flat(idx(j * t.space_functions + m)) = row[m].get<double>();
        }
    }
    return t.control(flat);
}

struct Context {
    Config config;
    std::ostream* csv = nullptr;
    std::ostream* summary = nullptr;
    SolveOptions options;
};

using Handler = std::function<void(Context&)>;

void run_mlf_table(Context& ctx, double alpha, double beta, double zmin, double zmax, std::size_t steps) {
    if (steps < 1)
        throw ValidationError("steps", "must be at least 1");
    if (!(zmin <= zmax))
        throw ValidationError("zmin", "must not exceed zmax");
    const MlfParams params{alpha, beta, ctx.config.number("run.tol", 1e-12)};
    params.validate();
    std::ostream& out = *ctx.csv;
    out << "z,value\n";
    for (std::size_t i = 0; i <= steps; ++i) {
        const double z = i == steps ? zmax : zmin + (zmax - zmin) * static_cast<double>(i) / static_cast<double>(steps);
        out << fmt(z) << ',' << fmt(mlf_eval(params, z)) << '\n';
    }
    *ctx.summary << "mlf-table: alpha=" << fmt(alpha) << " beta=" << fmt(beta) << " rows=" << steps + 1 << '\n';
}

void run_solve_forward(Context& ctx) {
    const Config& c = ctx.config;
    const auto basis = read_basis(c);
    ForwardProblem p{read_order(c),
                     basis,
                     read_grid(c, false),
                     read_field(c, "data.u0", basis, c.count("data.seed", 1)),
                     read_field(c, "data.u1", basis, c.count("data.seed", 1) + 1),
                     std::nullopt,
                     read_gamma(c),
                     c.number("run.p", std::numeric_limits<double>::infinity())};
    if (c.find("control")) {
        ControlTemplate t = read_template(c);
        if (t.T != p.grid.T())
            throw ValidationError("grid.T", "control horizon differs from the grid");
        p.control = read_control(c, t);
    }
    const ModalField u = solve_forward(p, ctx.options);
    const MemoryState ms = memory_state(p);
    std::ostream& out = *ctx.csv;
    out << "t,mode,value\n";
    for (std::size_t n = 0; n < u.modes(); ++n)
        for (std::size_t j = 0; j < u.nodes(); ++j)
            out << fmt(p.grid[j]) << ',' << n + 1 << ',' << fmt(u.values(idx(n), idx(j))) << '\n';
    *ctx.summary << "solve-forward: modes=" << u.modes() << " nodes=" << u.nodes()
                 << " singular_start=" << (u.singular ? "yes" : "no")
                 << " mem_norm=" << fmt(v_gamma_norm(ms.mem, p.gamma()))
                 << " mem_rate_norm=" << fmt(ms.mem_rate.coefficients.norm()) << '\n';
}

void run_solve_adjoint(Context& ctx) {
    const Config& c = ctx.config;
    const auto basis = read_basis(c);
    const AdjointProblem p{read_order(c), basis, read_grid(c, true),
                           read_field(c, "data.v0", basis, c.count("data.seed", 1) + 2),
                           read_field(c, "data.v1", basis, c.count("data.seed", 1) + 3), read_gamma(c)};
    const ModalField v = solve_adjoint(p, ctx.options);
    const AdjointFinalConditions fc = adjoint_final_conditions(p, ctx.options);
    std::ostream& out = *ctx.csv;
    out << "t,mode,value,integral,derivative\n";
    for (std::size_t n = 0; n < v.modes(); ++n)
        for (std::size_t j = 0; j < v.nodes(); ++j)
            out << fmt(p.grid[j]) << ',' << n + 1 << ',' << fmt(v.values(idx(n), idx(j))) << ','
                << fmt(fc.integral.values(idx(n), idx(j))) << ',' << fmt(fc.derivative.values(idx(n), idx(j))) << '\n';
    const double recovery =
        std::max((fc.integral_at_final().coefficients - p.v0.coefficients).cwiseAbs().maxCoeff(),
                 (fc.derivative_at_final().coefficients - p.v1.coefficients).cwiseAbs().maxCoeff());
    *ctx.summary << "solve-adjoint: modes=" << v.modes() << " nodes=" << v.nodes()
                 << " singular_end=" << (v.singular ? "yes" : "no") << " final_condition_error=" << fmt(recovery)
                 << '\n';
}

void run_verify_duality(Context& ctx) {
    const Config& c = ctx.config;
    const ControlTemplate t = read_template(c);
    const ControlField f = read_control(c, t);
    const std::uint64_t seed = c.count("data.seed", 1);
    const Field v0 = read_field(c, "data.v0", t.basis, seed + 2, "random");
    const Field v1 = read_field(c, "data.v1", t.basis, seed + 3, "random");
    const double r = c.number("grid.grading", 1.0);
    std::ostream& out = *ctx.csv;
    out << "M,h,residual\n";
    std::vector<double> res;
    for (const std::size_t M : read_ladder(c)) {
        const TimeGrid grid = r == 1.0 ? TimeGrid::uniform(t.T, M) : TimeGrid::graded_right(t.T, M, r);
        const double value = duality_residual(t.order, t.basis, grid, f, v0, v1);
        if (!std::isfinite(value))
            throw NumericalError("duality residual is not finite at M = " + std::to_string(M));
        res.push_back(value);
        out << M << ',' << fmt(grid.max_step()) << ',' << fmt(value) << '\n';
    }
    bool monotone = true;
    for (std::size_t i = 1; i < res.size(); ++i)
        monotone = monotone && res[i] < res[i - 1];
    *ctx.summary << "verify-duality: levels=" << res.size() << " finest_residual=" << fmt(res.back())
                 << " monotone=" << (monotone ? "yes" : "no") << '\n';
}

void run_verify_identities(Context& ctx) {
    const Config& c = ctx.config;
    const FractionalOrder order = read_order(c);
    const double T = c.number("grid.T", 1.0);
    const std::vector<std::size_t> ladder = read_ladder(c);
    std::map<std::string, std::vector<double>> table;
    std::vector<double> steps;
    std::ostream& out = *ctx.csv;
    out << "identity,M,residual\n";
    for (const std::size_t M : ladder) {
        const IdentityResiduals r = identity_residuals(order, T, M);
        steps.push_back(T / static_cast<double>(M));
        const std::pair<const char*, double> rows[] = {{"power_law", r.power_law},
                                                       {"semigroup", r.semigroup},
                                                       {"convolution", r.convolution},
                                                       {"ipf", r.ipf},
                                                       {"ibp", r.ibp}};
        for (const auto& [name, value] : rows) {
            if (!std::isfinite(value))
                throw NumericalError(std::string(name) + " residual is not finite");
            table[name].push_back(value);
            out << name << ',' << M << ',' << fmt(value) << '\n';
        }
    }
    *ctx.summary << "verify-identities:";
    for (const auto& [name, values] : table) {
        std::ostringstream order_text;
        order_text << std::fixed << std::setprecision(2) << empirical_order(steps, values);
        *ctx.summary << ' ' << name << "_order=" << order_text.str();
    }
    *ctx.summary << '\n';
}

void run_ucp_svd(Context& ctx) {
    const ControlTemplate t = read_template(ctx.config);
    const UcpReport r = ucp_smallest_singular_value(assemble_observation_map(t, ctx.options));
    std::ostream& out = *ctx.csv;
    out << "N,omega_measure,sigma_min,sigma_max,injective\n";
    out << t.basis->size() << ',' << fmt(t.omega.measure()) << ',' << fmt(r.sigma_min) << ',' << fmt(r.sigma_max)
        << ',' << (r.injective ? 1 : 0) << '\n';
    *ctx.summary << "ucp-svd: N=" << t.basis->size() << " sigma_min=" << fmt(r.sigma_min)
                 << " injective=" << (r.injective ? "yes" : "no") << '\n';
}

MemoryState read_target(const Config& c, const std::string& path, const ControlMap& cm) {
    const auto basis = cm.setup.basis;
    const json* entry = c.find(path);
    if (entry->is_object() && entry->contains("planted")) {
        const json& seed = (*entry)["planted"];
        if (!seed.is_number_integer())
            throw ValidationError(path + ".planted", "must be an integer seed");
        const Eigen::VectorXd planted = random_vector(cm.setup.unknowns(), seed.get<std::uint64_t>());
        return MemoryState::from_stacked(basis, cm.apply(planted));
    }
    if (!entry->is_object())
        throw ValidationError(path, "must be an object with mem/mem_rate or planted");
    return MemoryState{read_field(c, path + ".mem", basis, 0), read_field(c, path + ".mem_rate", basis, 0)};
}

void run_control(Context& ctx) {
    const Config& c = ctx.config;
    const ControlTemplate t = read_template(c);
    const ControlMap cm = assemble_control_map(t, ctx.options);

    std::vector<MemoryState> targets;
    if (const json* list = c.find("run.targets")) {
        if (!list->is_array() || list->empty())
            throw ValidationError("run.targets", "must be a non-empty list");
        for (std::size_t i = 0; i < list->size(); ++i)
            targets.push_back(read_target(c, "run.targets." + std::to_string(i), cm));
    } else {
        targets.push_back(MemoryState{Field::mode(t.basis, 0), Field::zero(t.basis)});
        targets.push_back(MemoryState{Field::zero(t.basis), Field::mode(t.basis, std::min<std::size_t>(1, t.basis->size() - 1))});
    }

    std::vector<double> eps = default_eps_path();
    if (const json* path = c.find("run.eps_path")) {
        if (!path->is_array() || path->empty())
            throw ValidationError("run.eps_path", "must be a non-empty list");
        eps.clear();
        for (const auto& e : *path) {
            if (!e.is_number() || !(e.get<double>() > 0.0))
                throw ValidationError("run.eps_path", "entries must be positive numbers");
            eps.push_back(e.get<double>());
        }
    }
    SynthesisOptions so;
    so.tol = c.number("run.tol", 1e-10);
    so.max_iterations = c.count("run.max_iterations", 0);
    if (!(so.tol > 0.0))
        throw ValidationError("run.tol", "must be positive");

    const auto report = controllability_report(cm, targets, eps, so);
    std::ostream& out = *ctx.csv;
    out << "target_id,eps,residual,control_norm,cg_iters\n";
    for (const auto& r : report)
        out << r.target_id << ',' << fmt(r.eps) << ',' << fmt(r.residual) << ',' << fmt(r.control_norm) << ','
            << r.cg_iters << '\n';
    double worst = 0.0;
    for (std::size_t k = 0; k < targets.size(); ++k)
        worst = std::max(worst, report[(k + 1) * eps.size() - 1].residual);
    *ctx.summary << "control: targets=" << targets.size() << " eps_steps=" << eps.size()
                 << " worst_final_residual=" << fmt(worst) << '\n';
}

struct Command {
    const char* name;
    const char* help;
};

constexpr Command kCommands[] = {
    {"mlf-table", "tabulate E_{alpha,beta}(z) on a uniform z grid"},
    {"solve-forward", "per-mode traces of the forward solution"},
    {"solve-adjoint", "per-mode traces of the adjoint solution and its final-condition quantities"},
    {"verify-duality", "duality residual along a refinement ladder"},
    {"verify-identities", "fractional calculus identity residuals along a refinement ladder"},
    {"ucp-svd", "smallest singular value of the observation map"},
    {"control", "Tikhonov control synthesis along an eps path"},
};

} // namespace

std::string usage() {
    std::ostringstream os;
    os << "usage: hilferctl <subcommand> [--config FILE] [--out FILE] [--threads N]\n\nsubcommands:\n";
    for (const auto& cmd : kCommands)
        os << "  " << std::left << std::setw(19) << cmd.name << cmd.help << '\n';
    os << "\nmlf-table also accepts --alpha --beta --zmin --zmax --steps.\n";
    return os.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    if (args.size() < 2) {
        err << usage();
        return exit_usage;
    }
    const std::string sub = args[1];
    bool known = false;
    for (const auto& cmd : kCommands)
        known = known || sub == cmd.name;
    if (!known) {
        err << "unknown subcommand '" << sub << "'\n" << usage();
        return exit_usage;
    }

    CLI::App app{"hilferctl " + sub, "hilferctl " + sub};
    std::string config_path;
    std::string out_path;
    std::optional<unsigned> threads;
    std::optional<double> alpha, beta, zmin, zmax;
    std::optional<std::size_t> steps;
    app.add_option("--config", config_path, "JSON configuration document");
    app.add_option("--out", out_path, "CSV output path");
    app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    if (sub == "mlf-table") {
        app.add_option("--alpha", alpha, "order alpha");
        app.add_option("--beta", beta, "parameter beta");
        app.add_option("--zmin", zmin, "first z");
        app.add_option("--zmax", zmax, "last z");
        app.add_option("--steps", steps, "number of z intervals");
    }
    std::vector<std::string> rest(args.rbegin(), args.rend() - 2);
    try {
        app.parse(rest);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    }

    try {
        Context ctx;
        ctx.config = load_config(config_path);
        if (out_path.empty())
            out_path = ctx.config.text("run.output", "");
        ctx.options.threads = threads ? *threads : static_cast<unsigned>(ctx.config.count("run.threads", 1));

        std::ostringstream buffer;
        ctx.csv = &buffer;
        ctx.summary = out_path.empty() ? &err : &out;

        if (sub == "mlf-table") {
            const Config& c = ctx.config;
            run_mlf_table(ctx, alpha ? *alpha : c.number("mlf.alpha"), beta ? *beta : c.number("mlf.beta"),
                          zmin ? *zmin : c.number("mlf.zmin", -10.0), zmax ? *zmax : c.number("mlf.zmax", 0.0),
                          steps ? *steps : c.count("mlf.steps", 100));
        } else if (sub == "solve-forward") {
            run_solve_forward(ctx);
        } else if (sub == "solve-adjoint") {
            run_solve_adjoint(ctx);
        } else if (sub == "verify-duality") {
            run_verify_duality(ctx);
        } else if (sub == "verify-identities") {
            run_verify_identities(ctx);
        } else if (sub == "ucp-svd") {
            run_ucp_svd(ctx);
        } else {
            run_control(ctx);
        }

        if (out_path.empty()) {
            out << buffer.str();
        } else {
            std::ofstream file(out_path, std::ios::binary);
            if (!file)
                throw ValidationError("out", "cannot write " + out_path);
            file << buffer.str();
        }
        return exit_ok;
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << '\n';
        return exit_validation;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    }
}

} // namespace hilfer::cli
