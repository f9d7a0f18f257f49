#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mtwcheck/geometry.hpp"

namespace mtw {

/// Everything a CLI run depends on. Serializes to flat `key = value` text.
struct RunConfig {
    std::string command;

    std::string metric = "euclidean";  // euclidean | sphere2 | conformal2d | inline
    int dim = 2;
    double a = -3.0;
    double a4 = 0.0;
    std::vector<std::string> metric_entries;  // inline: n*n expressions, row-major

    std::string potential = "none";  // none | quartic | inline
    std::vector<double> quartic;  // row-major A
    std::string potential_expr;

    std::vector<double> point;
    std::vector<double> target;
    std::vector<double> u, v, w;
    std::string method = "jacobi";

    std::vector<double> region;  // lo,hi for every axis, or lo1,hi1,lo2,hi2,...
    int grid = 8;
    int samples = 16;
    int steps = 200;
    double h = 1e-2;
    std::uint64_t seed = 42;
    int threads = 0;

    double a_from = -4.0;
    double a_to = -2.5;
    double a_step = 0.05;

    std::string output;  // empty: stdout
    bool timings = false;

    /// Ordered key/value view; inverse of apply().
    std::map<std::string, std::string> entries() const;
    /// Sets one field from its text form. Throws ConfigError on unknown keys or bad values.
    void apply(const std::string& key, const std::string& value);
};

std::string serialize(const RunConfig& config);
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Shortest text that parses back to the same double.
std::string format_double(double x);
std::vector<double> parse_numbers(const std::string& text);

/// Applies a `--metric` value, either a bare name or `name(args)`.
void apply_metric_spec(RunConfig& config, const std::string& spec);
/// Applies a `--potential` value: `none`, `quartic(a11,a12,...)`, `quartic` or an expression.
void apply_potential_spec(RunConfig& config, const std::string& spec);
/// Applies `--param name=value`.
void apply_param(RunConfig& config, const std::string& assignment);

/// Builds the Lagrangian described by the configuration.
Lagrangian build_lagrangian(const RunConfig& config);

}  // namespace mtw
