#include "mtwcheck/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mtwcheck/conformal.hpp"
#include "mtwcheck/error.hpp"

namespace mtw {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    return out;
}

double parse_double(const std::string& text) {
    const std::string t = trim(text);
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) throw ConfigError("not a number: '" + text + "'");
    return x;
}

template <typename Int>
Int parse_int(const std::string& text) {
    const std::string t = trim(text);
    Int x = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) throw ConfigError("not an integer: '" + text + "'");
    return x;
}

bool parse_bool(const std::string& text) {
    const std::string t = trim(text);
    if (t == "true" || t == "1") return true;
    if (t == "false" || t == "0") return false;
    throw ConfigError("not a boolean: '" + text + "'");
}

std::string join_numbers(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        out += format_double(xs[i]);
    }
    return out;
}

std::string join_strings(const std::vector<std::string>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += "; ";
        out += xs[i];
    }
    return out;
}

}  // namespace

std::string format_double(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

std::vector<double> parse_numbers(const std::string& text) {
    std::vector<double> out;
    if (trim(text).empty()) return out;
    for (const auto& item : split(text, ',')) out.push_back(parse_double(item));
    return out;
}

std::map<std::string, std::string> RunConfig::entries() const {
    return {
        {"command", command},
        {"metric", metric},
        {"dim", std::to_string(dim)},
        {"a", format_double(a)},
        {"a4", format_double(a4)},
        {"metric_entries", join_strings(metric_entries)},
        {"potential", potential},
        {"quartic", join_numbers(quartic)},
        {"potential_expr", potential_expr},
        {"point", join_numbers(point)},
        {"target", join_numbers(target)},
        {"u", join_numbers(u)},
        {"v", join_numbers(v)},
        {"w", join_numbers(w)},
        {"method", method},
        {"region", join_numbers(region)},
        {"grid", std::to_string(grid)},
        {"samples", std::to_string(samples)},
        {"steps", std::to_string(steps)},
        {"h", format_double(h)},
        {"seed", std::to_string(seed)},
        {"threads", std::to_string(threads)},
        {"a_from", format_double(a_from)},
        {"a_to", format_double(a_to)},
        {"a_step", format_double(a_step)},
        {"output", output},
        {"timings", timings ? "true" : "false"},
    };
}

void RunConfig::apply(const std::string& key, const std::string& value) {
    const std::string k = trim(key);
    const std::string val = trim(value);
    if (k == "command") command = val;
    else if (k == "metric") metric = val;
    else if (k == "dim") dim = parse_int<int>(val);
    else if (k == "a") a = parse_double(val);
    else if (k == "a4") a4 = parse_double(val);
    else if (k == "metric_entries") metric_entries = val.empty() ? std::vector<std::string>{} : split(val, ';');
    else if (k == "potential") potential = val;
    else if (k == "quartic") quartic = parse_numbers(val);
    else if (k == "potential_expr") potential_expr = val;
    else if (k == "point") point = parse_numbers(val);
    else if (k == "target") target = parse_numbers(val);
    else if (k == "u") u = parse_numbers(val);
    else if (k == "v") v = parse_numbers(val);
    else if (k == "w") w = parse_numbers(val);
    else if (k == "method") method = val;
    else if (k == "region") region = parse_numbers(val);
    else if (k == "grid") grid = parse_int<int>(val);
    else if (k == "samples") samples = parse_int<int>(val);
    else if (k == "steps") steps = parse_int<int>(val);
    else if (k == "h") h = parse_double(val);
    else if (k == "seed") seed = parse_int<std::uint64_t>(val);
    else if (k == "threads") threads = parse_int<int>(val);
    else if (k == "a_from") a_from = parse_double(val);
    else if (k == "a_to") a_to = parse_double(val);
    else if (k == "a_step") a_step = parse_double(val);
    else if (k == "output") output = val;
    else if (k == "timings") timings = parse_bool(val);
    else throw ConfigError("unknown config key '" + k + "'");
}

std::string serialize(const RunConfig& config) {
    std::string out;
    for (const auto& [k, v] : config.entries()) out += k + " = " + v + "\n";
    return out;
}

RunConfig parse_config(const std::string& text) {
    RunConfig config;
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(number) + ": expected key = value");
        config.apply(t.substr(0, eq), t.substr(eq + 1));
    }
    return config;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

void apply_metric_spec(RunConfig& config, const std::string& spec) {
    const std::string s = trim(spec);
    const auto open = s.find('(');
    const std::string name = trim(s.substr(0, open));
    std::vector<double> args;
    if (open != std::string::npos) {
        if (s.back() != ')') throw ConfigError("unbalanced parentheses in metric '" + spec + "'");
        args = parse_numbers(s.substr(open + 1, s.size() - open - 2));
    }
    if (name == "euclidean") {
        if (args.size() > 1) throw ConfigError("euclidean takes one argument");
        if (!args.empty()) config.dim = static_cast<int>(args[0]);
    } else if (name == "sphere2") {
        if (!args.empty()) throw ConfigError("sphere2 takes no arguments");
    } else if (name == "conformal2d") {
        if (args.size() > 2) throw ConfigError("conformal2d takes at most two arguments");
        if (args.size() > 0) config.a = args[0];
        if (args.size() > 1) config.a4 = args[1];
    } else if (name != "inline") {
        throw ConfigError("unknown metric '" + name + "'");
    }
    config.metric = name;
}

void apply_potential_spec(RunConfig& config, const std::string& spec) {
    const std::string s = trim(spec);
    if (s == "none" || s == "quartic") {
        config.potential = s;
    } else if (s.starts_with("quartic(") && s.ends_with(")")) {
        config.potential = "quartic";
        config.quartic = parse_numbers(s.substr(8, s.size() - 9));
    } else {
        config.potential = "inline";
        config.potential_expr = s;
    }
}

void apply_param(RunConfig& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("--param expects name=value, got '" + assignment + "'");
    const std::string key = trim(assignment.substr(0, eq));
    if (key != "a" && key != "a4" && key != "dim") throw ConfigError("unknown metric parameter '" + key + "'");
    config.apply(key, assignment.substr(eq + 1));
}

Lagrangian build_lagrangian(const RunConfig& config) {
    MetricField metric;
    if (config.metric == "euclidean") {
        if (config.dim < 1) throw ConfigError("euclidean dimension must be positive");
        metric = euclidean_metric(config.dim);
    } else if (config.metric == "sphere2") {
        metric = sphere_metric();
    } else if (config.metric == "conformal2d") {
        metric = conformal_metric({config.a, config.a4});
    } else if (config.metric == "inline") {
        const auto count = config.metric_entries.size();
        const auto n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(count))));
        if (n < 1 || static_cast<std::size_t>(n * n) != count)
            throw ConfigError("inline metric needs n*n entries separated by ';'");
        std::vector<std::vector<ScalarField>> rows(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                rows[static_cast<std::size_t>(i)].push_back(
                    parse_field(config.metric_entries[static_cast<std::size_t>(i * n + j)], n));
        metric = MetricField(std::move(rows));
    } else {
        throw ConfigError("unknown metric '" + config.metric + "'");
    }
    const int n = metric.dim();
    if (config.potential == "none") return Lagrangian(metric);
    if (config.potential == "quartic") {
        if (config.quartic.empty()) return Lagrangian(metric, quartic_potential(Matrix::Identity(n, n)));
        if (config.quartic.size() != static_cast<std::size_t>(n * n))
            throw ConfigError("quartic potential needs an n x n matrix");
        const Matrix a = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            config.quartic.data(), n, n);
        if (!a.isApprox(a.transpose())) throw ConfigError("quartic matrix must be symmetric");
        return Lagrangian(metric, quartic_potential(a));
    }
    if (config.potential == "inline") return Lagrangian(metric, parse_field(config.potential_expr, n));
    throw ConfigError("unknown potential '" + config.potential + "'");
}

}  // namespace mtw
