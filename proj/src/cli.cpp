#include "mtwcheck/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <map>
#include <numbers>
#include <sstream>

#include "mtwcheck/check.hpp"
#include "mtwcheck/config.hpp"
#include "mtwcheck/conformal.hpp"
#include "mtwcheck/error.hpp"
#include "mtwcheck/lemmas.hpp"
#include "mtwcheck/mtw.hpp"

namespace mtw {

namespace {

using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

Json to_json(const Vector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Json to_json(const Matrix& m) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(to_json(Vector(m.row(i).transpose())));
    return out;
}

template <int Rank>
Json flat_json(const TensorN<Rank>& t) {
    // Row-major flattening: the last index varies fastest.
    Json out = Json::array();
    const Eigen::Index n = t.dimension(0);
    std::array<Eigen::Index, Rank> idx{};
    const Eigen::Index size = t.size();
    for (Eigen::Index flat = 0; flat < size; ++flat) {
        Eigen::Index rest = flat;
        for (int r = Rank - 1; r >= 0; --r) {
            idx[static_cast<std::size_t>(r)] = rest % n;
            rest /= n;
        }
        out.push_back(t(idx));
    }
    return out;
}

Json config_json(const RunConfig& config) {
    Json out = Json::object();
    for (const auto& [k, v] : config.entries()) out[k] = v;
    return out;
}

Vector to_vector(const std::vector<double>& xs) {
    return Eigen::Map<const Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

Vector require_vector(const std::vector<double>& xs, int n, const char* name) {
    if (xs.empty()) throw ConfigError(std::string("--") + name + " is required");
    if (static_cast<int>(xs.size()) != n)
        throw ConfigError(std::string("--") + name + " must have " + std::to_string(n) + " components");
    return to_vector(xs);
}

Vector optional_vector(const std::vector<double>& xs, int n, const char* name) {
    if (xs.empty()) return Vector::Zero(n);
    return require_vector(xs, n, name);
}

Vector default_point(const RunConfig& config, int n) {
    if (!config.point.empty()) return require_vector(config.point, n, "point");
    if (config.metric == "sphere2") return Eigen::Vector2d(1.0, 0.3);
    return Vector::Zero(n);
}

Method parse_method(const std::string& name) {
    for (const Method m :
         {Method::ClosedForm0, Method::ClosedForm1, Method::ClosedForm2, Method::Jacobi, Method::DirectCost})
        if (to_string(m) == name) return m;
    throw ConfigError("unknown method '" + name + "'");
}

class Emitter {
public:
    Emitter(const RunConfig& config, std::ostream& out) : config_(config), out_(out), start_(Clock::now()) {}

    void json(Json doc) {
        if (config_.timings)
            doc["timings"] = {{"total_seconds", std::chrono::duration<double>(Clock::now() - start_).count()}};
        text(doc.dump(2) + "\n");
    }

    void text(const std::string& s) {
        if (config_.output.empty()) {
            out_ << s;
            return;
        }
        std::ofstream file(config_.output);
        if (!file) throw ConfigError("cannot write '" + config_.output + "'");
        file << s;
    }

private:
    const RunConfig& config_;
    std::ostream& out_;
    Clock::time_point start_;
};

int cmd_eval(const RunConfig& config, Emitter& emit) {
    const Lagrangian lagrangian = build_lagrangian(config);
    const int n = lagrangian.dim();
    const Vector x = require_vector(config.point, n, "point");
    const Vector u = require_vector(config.u, n, "u");
    const Vector v = optional_vector(config.v, n, "v");
    const Vector w = require_vector(config.w, n, "w");
    const Method method = parse_method(config.method);
    MtwEvaluation e;
    e.x = x, e.u = u, e.v = v, e.w = w, e.method = method;
    switch (method) {
        case Method::Jacobi: e = mtw_jacobi(lagrangian, x, u, v, w, config.h, config.steps); break;
        case Method::DirectCost: e = mtw_direct_cost(lagrangian, x, u, v, w, config.h, config.h, config.steps); break;
        case Method::ClosedForm0: {
            const GeometryJet geo = geometry_jet(lagrangian, x, 4);
            const bool flat_hessian = !geo.has_potential || geo.hess_V.lpNorm<Eigen::Infinity>() <= 1e-10;
            if (lagrangian.riemannian()) e.value = riemann_form(geo.riemann, w, u, w, u);
            else if (flat_hessian) e.value = mtw_zeroth_simplified(lagrangian, x, u, w);
            else e.value = mtw_zeroth_general(lagrangian, x, u, w);
            break;
        }
        case Method::ClosedForm1: e.value = mtw_first(lagrangian.metric, x, u, v, w); break;
        case Method::ClosedForm2: e.value = mtw_second(lagrangian.metric, x, u, v, w); break;
    }
    Json result = {{"method", to_string(e.method)},
                   {"value", e.value},
                   {"steps", e.steps},
                   {"h_s", e.h_s},
                   {"h_t", e.h_t},
                   {"error_estimate", e.error_estimate}};
    emit.json({{"config", config_json(config)}, {"result", result}});
    return kExitOk;
}

Json witness_json(const Witness& w) {
    return {{"point", to_json(w.point)}, {"u", to_json(w.u)}, {"v", to_json(w.v)}, {"w", to_json(w.w)}, {"value", w.value}};
}

int cmd_check(const RunConfig& config, Emitter& emit) {
    const Lagrangian lagrangian = build_lagrangian(config);
    const auto n = static_cast<std::size_t>(lagrangian.dim());
    SamplingSpec spec;
    spec.lower = Vector(n);
    spec.upper = Vector(n);
    if (config.region.size() == 2) {
        spec.lower.setConstant(config.region[0]);
        spec.upper.setConstant(config.region[1]);
    } else if (config.region.size() == 2 * n) {
        for (std::size_t i = 0; i < n; ++i) {
            spec.lower(static_cast<Eigen::Index>(i)) = config.region[2 * i];
            spec.upper(static_cast<Eigen::Index>(i)) = config.region[2 * i + 1];
        }
    } else {
        throw ConfigError("--region takes lo,hi or one lo,hi pair per axis");
    }
    spec.grid = config.grid;
    spec.directions = config.samples;
    spec.seed = config.seed;
    spec.threads = config.threads;
    const CheckReport report = check_a3w_necessary(lagrangian, spec);

    Json results = Json::array();
    for (const auto& c : report.conditions) {
        Json r = {{"condition", c.condition},
                  {"verdict", to_string(c.verdict)},
                  {"method", c.method},
                  {"steps", nullptr},
                  {"evaluations", c.evaluations},
                  {"violations", c.violations}};
        if (c.condition == "mechanical_zeroth_nonnegative") r["quadrature_panels"] = 1000;
        r["worst_witness"] = c.worst ? witness_json(*c.worst) : Json(nullptr);
        results.push_back(std::move(r));
    }
    emit.json({{"config", config_json(config)},
               {"points", report.points.size()},
               {"results", results},
               {"overall", to_string(report.overall)}});
    return report.overall == Verdict::Fail ? kExitViolation : kExitOk;
}

int cmd_cost(const RunConfig& config, Emitter& emit) {
    const Lagrangian lagrangian = build_lagrangian(config);
    const int n = lagrangian.dim();
    const Vector x = require_vector(config.point, n, "point");
    const Vector y = require_vector(config.target, n, "target");
    const ShootingResult shot = shoot(lagrangian, x, y, config.steps);
    Json result = {{"method", "shooting"},
                   {"steps", config.steps},
                   {"cost", shot.path.action},
                   {"velocity", to_json(shot.velocity)},
                   {"iterations", shot.iterations},
                   {"residual", shot.residual}};
    emit.json({{"config", config_json(config)}, {"result", result}});
    return kExitOk;
}

int cmd_geodesic(const RunConfig& config, Emitter& emit) {
    const Lagrangian lagrangian = build_lagrangian(config);
    const int n = lagrangian.dim();
    const Vector x = require_vector(config.point, n, "point");
    const Vector v = require_vector(config.v, n, "v");
    const CurvePath path = least_action_curve(lagrangian, x, v, config.steps);
    std::ostringstream csv;
    csv << "# columns: tau";
    for (int i = 1; i <= n; ++i) csv << ",x" << i;
    for (int i = 1; i <= n; ++i) csv << ",v" << i;
    csv << ",energy\n";
    for (std::size_t k = 0; k < path.tau.size(); ++k) {
        csv << format_double(path.tau[k]);
        for (int i = 0; i < n; ++i) csv << ',' << format_double(path.position[k](i));
        for (int i = 0; i < n; ++i) csv << ',' << format_double(path.velocity[k](i));
        csv << ',' << format_double(path.energy[k]) << '\n';
    }
    emit.text(csv.str());
    return kExitOk;
}

int cmd_curvature(const RunConfig& config, Emitter& emit) {
    const Lagrangian lagrangian = build_lagrangian(config);
    const int n = lagrangian.dim();
    const Vector x = require_vector(config.point, n, "point");
    const GeometryJet geo = geometry_jet(lagrangian, x, 2);
    Json result = {{"method", "jet"},
                   {"point", to_json(x)},
                   {"metric", to_json(geo.g)},
                   {"christoffel", flat_json(geo.christoffel)},
                   {"riemann", flat_json(geo.riemann)}};
    if (!config.u.empty() && !config.w.empty()) {
        result["sectional"] = sectional(geo, require_vector(config.u, n, "u"), require_vector(config.w, n, "w"));
    } else if (n == 2) {
        result["sectional"] = sectional(geo, Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1));
    }
    emit.json({{"config", config_json(config)}, {"result", result}});
    return kExitOk;
}

int cmd_conformal_scan(const RunConfig& config, Emitter& emit) {
    if (!(config.a_step > 0.0) || config.a_to < config.a_from) throw ConfigError("need a_step > 0 and a_from <= a_to");
    std::ostringstream csv;
    csv << "# columns: a,curvature_nonnegative,class,transition\n";
    const auto count = static_cast<long>(std::floor((config.a_to - config.a_from) / config.a_step + 1e-9));
    std::string previous;
    for (long k = 0; k <= count; ++k) {
        // Rounded to 12 digits so grid values print as typed (-3.65, not -3.6500000000000004).
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.12g", config.a_from + static_cast<double>(k) * config.a_step);
        const double a = std::strtod(buf, nullptr);
        const bool nonneg = nonneg_curvature_threshold({a, 0.0}).nonnegative;
        const std::string cls = to_string(classify(a));
        csv << format_double(a) << ',' << (nonneg ? 1 : 0) << ',' << cls << ','
            << (k > 0 && cls != previous ? 1 : 0) << '\n';
        previous = cls;
    }
    emit.text(csv.str());
    return kExitOk;
}

int cmd_lemma_tests(const RunConfig& config, Emitter& emit) {
    const Lagrangian lagrangian = build_lagrangian(config);
    const int n = lagrangian.dim();
    const Vector x = default_point(config, n);
    const Matrix g = lagrangian.metric(x);
    auto unit = [&](Vector a) { return Vector(a / std::sqrt(inner(g, a, a))); };
    Vector e1 = Vector::Zero(n), e2 = Vector::Zero(n);
    e1(0) = 1.0;
    e2(n > 1 ? 1 : 0) = 1.0;
    const Vector u = config.u.empty() ? unit(e1) : require_vector(config.u, n, "u");
    const Vector v = config.v.empty() ? unit(e2) : require_vector(config.v, n, "v");
    const Vector w = config.w.empty() ? unit(e1 - 0.5 * e2) : require_vector(config.w, n, "w");
    const auto checks = run_lemma_suite(lagrangian, x, u, v, w, config.steps, config.h);
    Json rows = Json::array();
    bool all = true;
    for (const auto& c : checks) {
        rows.push_back({{"name", c.name}, {"max_error", c.max_error}, {"pass", c.pass}});
        all = all && c.pass;
    }
    emit.json({{"config", config_json(config)},
               {"method", "finite-difference"},
               {"steps", config.steps},
               {"h", {config.h, config.h / 2}},
               {"tolerance", kLemmaTolerance},
               {"checks", rows},
               {"overall", all ? "pass" : "fail"}});
    return all ? kExitOk : kExitViolation;
}

int cmd_calibrate(const RunConfig& config, Emitter& emit) {
    const Method method = parse_method(config.method);
    if (method != Method::Jacobi && method != Method::DirectCost)
        throw ConfigError("calibration needs method jacobi or direct-cost");
    const auto cases = oracle_suite(method, config.steps);
    Json rows = Json::array();
    for (const auto& c : cases) rows.push_back({{"name", c.name}, {"measured", c.measured}, {"closed_form", c.closed_form}});
    Json doc = {{"config", config_json(config)}, {"method", to_string(method)}, {"steps", config.steps}, {"cases", rows}};
    int code = kExitOk;
    try {
        const Calibration cal = calibrate_normalization(cases);
        doc["kappa"] = cal.kappa;
        doc["spread"] = cal.spread;
        doc["informative_cases"] = cal.informative_cases;
    } catch (const CalibrationError& e) {
        doc["error"] = e.what();
        code = kExitViolation;
    }
    emit.json(std::move(doc));
    return code;
}

struct OptionSpec {
    const char* flag;
    const char* key;
    const char* help;
};

constexpr OptionSpec kValueOptions[] = {
    {"--dim", "dim", "dimension for euclidean"},
    {"--point", "point", "base point x, comma separated"},
    {"--target", "target", "endpoint y for cost"},
    {"--u", "u", "vector u"},
    {"--v", "v", "vector v (default 0)"},
    {"--w", "w", "vector w"},
    {"--method", "method", "closed-form-0|closed-form-1|closed-form-2|jacobi|direct-cost"},
    {"--region", "region", "lo,hi for every axis or lo1,hi1,lo2,hi2,..."},
    {"--grid", "grid", "region points per axis"},
    {"--samples", "samples", "directions per point"},
    {"--steps", "steps", "integration steps N"},
    {"--h", "h", "finite-difference step"},
    {"--seed", "seed", "sampling seed"},
    {"--threads", "threads", "worker count"},
    {"--a-from", "a_from", "scan start"},
    {"--a-to", "a_to", "scan end"},
    {"--step", "a_step", "scan step"},
    {"--output,-o", "output", "output file (default stdout)"},
};

struct Parsed {
    std::map<std::string, std::string> values;
    std::string metric, potential, inline_metric, config_path;
    std::vector<std::string> params;
    bool timings = false;
};

void add_options(CLI::App* cmd, Parsed& p) {
    cmd->set_help_flag("--help", "print help for this command");
    cmd->add_option("--config", p.config_path, "key = value config file; flags override it");
    cmd->add_option("--metric", p.metric, "euclidean[(n)] | sphere2 | conformal2d[(a,a4)] | inline");
    cmd->add_option("--g", p.inline_metric, "inline metric entries, row-major, separated by ';'");
    cmd->add_option("--param", p.params, "metric parameter name=value (a, a4, dim)");
    cmd->add_option("--potential", p.potential, "none | quartic(A row-major) | expression");
    for (const auto& o : kValueOptions) cmd->add_option(o.flag, p.values[o.key], o.help);
    cmd->add_flag("--timings", p.timings, "include wall-clock timings in the report");
}

// Option values such as "-0.2,0.2" would otherwise be read as flags.
std::vector<std::string> join_negative_values(const std::vector<std::string>& args) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const auto& a = args[i];
        const bool takes_value = a.starts_with("--") && a.find('=') == std::string::npos && a != "--timings";
        if (takes_value && i + 1 < args.size() && args[i + 1].size() > 1 && args[i + 1][0] == '-' &&
            (std::isdigit(static_cast<unsigned char>(args[i + 1][1])) || args[i + 1][1] == '.')) {
            out.push_back(a + "=" + args[i + 1]);
            ++i;
        } else {
            out.push_back(a);
        }
    }
    return out;
}

using Command = int (*)(const RunConfig&, Emitter&);

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Numerical checks of MTW curvature conditions for mechanical and squared-distance costs", "mtw"};
    app.require_subcommand(1);
    app.set_help_flag("--help,-h", "print help");
    const std::vector<std::pair<std::string, Command>> commands{
        {"eval", cmd_eval},         {"check", cmd_check},
        {"cost", cmd_cost},         {"geodesic", cmd_geodesic},
        {"curvature", cmd_curvature}, {"conformal-scan", cmd_conformal_scan},
        {"lemma-tests", cmd_lemma_tests}, {"calibrate", cmd_calibrate},
    };
    const std::map<std::string, std::string> descriptions{
        {"eval", "evaluate MTW(u, v, w) at a point"},
        {"check", "sample the necessary conditions over a region"},
        {"cost", "action cost between two points by shooting"},
        {"geodesic", "least-action curve as CSV"},
        {"curvature", "metric, Christoffel symbols and curvature at a point"},
        {"conformal-scan", "classify the conformal family over a range of a"},
        {"lemma-tests", "finite-difference identities of variation families"},
        {"calibrate", "fit the normalization constant on oracle cases"},
    };
    Parsed parsed;
    for (const auto& [name, fn] : commands) add_options(app.add_subcommand(name, descriptions.at(name)), parsed);

    std::vector<std::string> args = join_negative_values(raw_args);
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        RunConfig config = parsed.config_path.empty() ? RunConfig{} : load_config(parsed.config_path);
        Command command = nullptr;
        for (const auto& [name, fn] : commands) {
            if (app.got_subcommand(name)) {
                config.command = name;
                command = fn;
                CLI::App* sub = app.get_subcommand(name);
                if (!parsed.metric.empty()) apply_metric_spec(config, parsed.metric);
                if (!parsed.inline_metric.empty()) {
                    config.metric = "inline";
                    config.apply("metric_entries", parsed.inline_metric);
                }
                for (const auto& p : parsed.params) apply_param(config, p);
                if (!parsed.potential.empty()) apply_potential_spec(config, parsed.potential);
                for (const auto& o : kValueOptions) {
                    const std::string flag(o.flag);
                    if (sub->count(flag.substr(0, flag.find(',')))) config.apply(o.key, parsed.values[o.key]);
                }
                if (parsed.timings) config.timings = true;
            }
        }
        Emitter emit(config, out);
        return command(config, emit);
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

}  // namespace mtw
