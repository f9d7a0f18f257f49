#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mtwcheck/geometry.hpp"

namespace mtw {

struct SamplingSpec {
    Vector lower;  // region box corners
    Vector upper;
    int grid = 8;  // points per axis
    int directions = 16;  // unit directions per point
    std::uint64_t seed = 42;
    bool include_center = true;
    std::vector<Vector> extra_points;
    /// Worker cap; 0 means MTW_THREADS or the hardware concurrency.
    int threads = 0;
};

enum class Verdict { Pass, Fail, Skipped };

std::string to_string(Verdict v);

struct Witness {
    Vector point, u, v, w;
    double value = 0.0;
};

struct ConditionResult {
    std::string condition;
    std::string method;
    Verdict verdict = Verdict::Skipped;
    int evaluations = 0;
    int violations = 0;
    /// Most violating (or, without violations, closest to violating) sample.
    std::optional<Witness> worst;
};

struct CheckReport {
    SamplingSpec spec;
    std::vector<Vector> points;
    std::vector<ConditionResult> conditions;
    Verdict overall = Verdict::Pass;

    const ConditionResult& condition(const std::string& name) const;
};

/// Sample points of the region in a fixed order: grid, then center, then extras.
std::vector<Vector> sample_points(const SamplingSpec& spec);

/// g-orthonormal (u, w) pairs at a point. In two dimensions these are the
/// directions 2 pi k / count with w the metric rotation of u; otherwise
/// Gaussian samples from a generator seeded by (seed, point index).
std::vector<std::pair<Vector, Vector>> direction_pairs(const Matrix& g, int count, std::uint64_t seed,
                                                        std::size_t point_index);

/// Number of workers the checker will use for a spec.
int worker_count(const SamplingSpec& spec);

/// Samples the necessary conditions of the weak MTW condition over a region.
/// Squared-distance costs (V = 0): sectional_nonnegative, first_order_vanishing,
/// g_nonnegative, discriminant_2d (dimension 2). Mechanical costs:
/// mechanical_zeroth_nonnegative at sampled local maxima of V.
CheckReport check_a3w_necessary(const Lagrangian& lagrangian, const SamplingSpec& spec);

}  // namespace mtw
