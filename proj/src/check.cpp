#include "mtwcheck/check.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <numbers>
#include <random>
#include <thread>

#include "mtwcheck/error.hpp"
#include "mtwcheck/mtw.hpp"

namespace mtw {

namespace {

struct ConditionDef {
    const char* name;
    Method method;
    bool lower_is_worse;
};

constexpr ConditionDef kSectional{"sectional_nonnegative", Method::ClosedForm0, true};
constexpr ConditionDef kFirstOrder{"first_order_vanishing", Method::ClosedForm1, false};
constexpr ConditionDef kG{"g_nonnegative", Method::ClosedForm2, true};
constexpr ConditionDef kDiscriminant{"discriminant_2d", Method::ClosedForm2, false};
constexpr ConditionDef kMechanical{"mechanical_zeroth_nonnegative", Method::ClosedForm0, true};

struct Partial {
    int evaluations = 0;
    int violations = 0;
    std::optional<Witness> worst;
};

double badness(const ConditionDef& def, double value) { return def.lower_is_worse ? -value : value; }

void offer(const ConditionDef& def, Partial& p, Witness w, bool violated) {
    ++p.evaluations;
    if (violated) ++p.violations;
    if (!p.worst || badness(def, w.value) > badness(def, p.worst->value)) p.worst = std::move(w);
}

void merge(const ConditionDef& def, Partial& into, const Partial& from) {
    into.evaluations += from.evaluations;
    into.violations += from.violations;
    if (from.worst && (!into.worst || badness(def, from.worst->value) > badness(def, into.worst->value)))
        into.worst = from.worst;
}

bool is_local_max(const GeometryJet& geo) {
    if (geo.dV.lpNorm<Eigen::Infinity>() > 1e-10) return false;
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(geo.hess_V, geo.g, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff() <= 1e-12;
}

std::vector<Partial> evaluate_riemannian(const Lagrangian& lagrangian, const Vector& x, const SamplingSpec& spec,
                                         std::size_t index) {
    std::vector<Partial> out(4);
    const GeometryJet geo = geometry_jet(lagrangian, x, 4);
    const auto pairs = direction_pairs(geo.g, spec.directions, spec.seed, index);
    const Vector zero = Vector::Zero(x.size());
    for (const auto& [u, w] : pairs) {
        const double k = sectional(geo, u, w);
        offer(kSectional, out[0], {x, u, zero, w, k}, k < -kInequalitySlack);
        if (std::abs(k) > kFlatCurvatureTolerance) continue;
        const double fov = first_order_vanishing(geo, u, w);
        offer(kFirstOrder, out[1], {x, u, zero, w, fov}, fov > kFlatCurvatureTolerance);
        for (const auto& dir : pairs) {
            const Vector& v = dir.first;
            const double g = g_quantity(geo, u, v, w);
            offer(kG, out[2], {x, u, v, w, g}, g < -kInequalitySlack);
        }
        if (geo.dim == 2) {
            const Discriminant d = discriminant_2d(geo, u);
            offer(kDiscriminant, out[3], {x, u, zero, d.w, d.lhs - d.rhs}, !d.satisfied);
        }
    }
    return out;
}

std::vector<Partial> evaluate_mechanical(const Lagrangian& lagrangian, const Vector& x, const SamplingSpec& spec,
                                         std::size_t index) {
    std::vector<Partial> out(1);
    const GeometryJet geo = geometry_jet(lagrangian, x, 4);
    if (!is_local_max(geo)) return out;
    const bool flat_hessian = geo.hess_V.lpNorm<Eigen::Infinity>() <= 1e-10;
    const Vector zero = Vector::Zero(x.size());
    for (const auto& [u, w] : direction_pairs(geo.g, spec.directions, spec.seed, index)) {
        const double value =
            flat_hessian ? mtw_zeroth_simplified(lagrangian, x, u, w) : mtw_zeroth_general(lagrangian, x, u, w);
        offer(kMechanical, out[0], {x, u, zero, w, value}, value < -kInequalitySlack);
    }
    return out;
}

}  // namespace

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Skipped: return "skipped";
    }
    return "unknown";
}

const ConditionResult& CheckReport::condition(const std::string& name) const {
    for (const auto& c : conditions)
        if (c.condition == name) return c;
    throw DomainError("no condition named '" + name + "' in report");
}

std::vector<Vector> sample_points(const SamplingSpec& spec) {
    const auto n = spec.lower.size();
    if (n == 0 || spec.upper.size() != n) throw DomainError("sampling region must have matching corners");
    if (spec.grid < 1) throw DomainError("grid must have at least one point per axis");
    std::vector<Vector> points;
    auto axis = [&](Eigen::Index i, int k) {
        if (spec.grid == 1) return 0.5 * (spec.lower(i) + spec.upper(i));
        return spec.lower(i) + (spec.upper(i) - spec.lower(i)) * k / (spec.grid - 1);
    };
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    for (;;) {
        Vector p(n);
        for (Eigen::Index i = 0; i < n; ++i) p(i) = axis(i, idx[static_cast<std::size_t>(i)]);
        points.push_back(p);
        Eigen::Index d = n - 1;
        while (d >= 0 && ++idx[static_cast<std::size_t>(d)] == spec.grid) idx[static_cast<std::size_t>(d--)] = 0;
        if (d < 0) break;
    }
    auto add_unique = [&](const Vector& p) {
        if (p.size() != n) throw DomainError("extra sample point has the wrong dimension");
        if (std::none_of(points.begin(), points.end(), [&](const Vector& q) { return q == p; })) points.push_back(p);
    };
    if (spec.include_center) add_unique(0.5 * (spec.lower + spec.upper));
    for (const auto& p : spec.extra_points) add_unique(p);
    return points;
}

std::vector<std::pair<Vector, Vector>> direction_pairs(const Matrix& g, int count, std::uint64_t seed,
                                                        std::size_t point_index) {
    const auto n = g.rows();
    std::vector<std::pair<Vector, Vector>> pairs;
    if (n == 2) {
        for (int k = 0; k < count; ++k) {
            const double theta = 2.0 * std::numbers::pi * k / count;
            Vector u = Eigen::Vector2d(std::cos(theta), std::sin(theta));
            u /= std::sqrt(inner(g, u, u));
            pairs.emplace_back(u, metric_rotation(g, u));
        }
        return pairs;
    }
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(point_index)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal;
    while (static_cast<int>(pairs.size()) < count) {
        Matrix m(n, 2);
        for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
        try {
            const Matrix e = gram_schmidt(g, m);
            pairs.emplace_back(e.col(0), e.col(1));
        } catch (const DomainError&) {
        }
    }
    return pairs;
}

int worker_count(const SamplingSpec& spec) {
    int count = spec.threads > 0 ? spec.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("MTW_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) count = std::min(count, cap);
    }
    return std::max(1, count);
}

CheckReport check_a3w_necessary(const Lagrangian& lagrangian, const SamplingSpec& spec) {
    if (spec.lower.size() != lagrangian.dim()) throw DomainError("sampling region dimension does not match metric");
    if (spec.directions < 1) throw DomainError("need at least one sample direction");
    CheckReport report;
    report.spec = spec;
    report.points = sample_points(spec);

    const bool riemannian = lagrangian.riemannian();
    std::vector<ConditionDef> defs;
    if (riemannian) defs = {kSectional, kFirstOrder, kG, kDiscriminant};
    else defs = {kMechanical};

    const std::size_t count = report.points.size();
    std::vector<std::vector<Partial>> partials(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                partials[i] = riemannian ? evaluate_riemannian(lagrangian, report.points[i], spec, i)
                                         : evaluate_mechanical(lagrangian, report.points[i], spec, i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int workers = std::min<int>(worker_count(spec), static_cast<int>(std::max<std::size_t>(count, 1)));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    for (std::size_t c = 0; c < defs.size(); ++c) {
        Partial total;
        for (const auto& p : partials) merge(defs[c], total, p[c]);
        ConditionResult r;
        r.condition = defs[c].name;
        r.method = to_string(defs[c].method);
        r.evaluations = total.evaluations;
        r.violations = total.violations;
        r.worst = total.worst;
        r.verdict = total.evaluations == 0 ? Verdict::Skipped : total.violations > 0 ? Verdict::Fail : Verdict::Pass;
        if (c == 3 && lagrangian.dim() != 2) r.verdict = Verdict::Skipped;
        report.conditions.push_back(std::move(r));
        if (report.conditions.back().verdict == Verdict::Fail) report.overall = Verdict::Fail;
    }
    return report;
}

}  // namespace mtw
