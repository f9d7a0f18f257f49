#include "mtwcheck/lemmas.hpp"

#include <cmath>
#include <functional>

#include "mtwcheck/error.hpp"

namespace mtw {

namespace {

constexpr int kJetOrder = 3;

// Five-point stencils on offsets -2..2 for derivative orders 0..3, without the h^k factor.
constexpr std::array<std::array<double, 5>, 4> kStencil{{
    {0.0, 0.0, 1.0, 0.0, 0.0},
    {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12},
    {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12},
    {-0.5, 1.0, 0.0, -1.0, 0.5},
}};
constexpr std::array<double, 4> kFactorial{1.0, 1.0, 2.0, 6.0};

using JetVector = std::vector<Jet>;

const std::vector<Vector>& field_of(const VariationFamily::Member& m, FamilyField field) {
    switch (field) {
        case FamilyField::Position: return m.position;
        case FamilyField::Velocity: return m.velocity;
        case FamilyField::Transport: return m.transport;
        case FamilyField::Jacobi: return m.jacobi;
    }
    throw DomainError("unknown family field");
}

// Taylor jets in (s, t) of each component of a field at node i, from the grid samples.
JetVector grid_jets(const VariationFamily& family, FamilyField field, std::size_t i) {
    const auto space = JetSpace::get(2, kJetOrder);
    const auto n = family.lagrangian.dim();
    JetVector out;
    for (int c = 0; c < n; ++c) {
        Jet jet(space, kJetOrder);
        for (int k = 0; k < space->size(); ++k) {
            const auto alpha = space->exponents(k);
            const int p = alpha[0];
            const int q = alpha[1];
            double sum = 0.0;
            for (int a = 0; a < 5; ++a) {
                const double wa = kStencil[static_cast<std::size_t>(p)][static_cast<std::size_t>(a)];
                if (wa == 0.0) continue;
                for (int b = 0; b < 5; ++b) {
                    const double wb = kStencil[static_cast<std::size_t>(q)][static_cast<std::size_t>(b)];
                    if (wb == 0.0) continue;
                    const auto& m = family.members[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
                    sum += wa * wb * field_of(m, field)[i](c);
                }
            }
            jet[k] = sum / (std::pow(family.h, p + q) * kFactorial[static_cast<std::size_t>(p)] *
                            kFactorial[static_cast<std::size_t>(q)]);
        }
        out.push_back(std::move(jet));
    }
    return out;
}

int variable_of(char op) {
    if (op == 's') return 0;
    if (op == 't') return 1;
    throw DomainError(std::string("unknown family derivative '") + op + "'");
}

// D_var X^k = d_var X^k + Gamma^k_ij(gamma) d_var gamma^i X^j, as jets in (s, t).
JetVector covariant(const JetVector& x, const JetVector& position, const JetVector& gamma, int var) {
    const auto n = static_cast<int>(x.size());
    JetVector out;
    for (int k = 0; k < n; ++k) {
        Jet s = x[static_cast<std::size_t>(k)].derivative(var);
        for (int i = 0; i < n; ++i) {
            const Jet dp = position[static_cast<std::size_t>(i)].derivative(var);
            for (int j = 0; j < n; ++j)
                s += gamma[static_cast<std::size_t>((k * n + i) * n + j)] * dp * x[static_cast<std::size_t>(j)];
        }
        out.push_back(s.truncated(x[static_cast<std::size_t>(k)].order() - 1));
    }
    return out;
}

Vector values(const JetVector& x) {
    Vector out(static_cast<Eigen::Index>(x.size()));
    for (std::size_t k = 0; k < x.size(); ++k) out(static_cast<Eigen::Index>(k)) = x[k].value();
    return out;
}

std::size_t node_of(const VariationFamily& family, double tau) {
    const auto i = static_cast<std::size_t>(std::lround(tau * family.steps));
    if (std::abs(family.tau[i] - tau) > 1e-12) throw DomainError("tau is not a grid node of the family");
    return i;
}

}  // namespace

VariationFamily variation_family(const Lagrangian& lagrangian, const Eigen::Ref<const Vector>& x,
                                 const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& v,
                                 const Eigen::Ref<const Vector>& w, double h, int steps) {
    if (!(h > 0.0)) throw DomainError("family step must be positive");
    VariationFamily family;
    family.lagrangian = lagrangian;
    family.h = h;
    family.steps = steps;
    FlowRequest request;
    request.steps = steps;
    request.transport = Matrix(u);
    request.variational = true;
    for (int a = 0; a < 5; ++a) {
        for (int b = 0; b < 5; ++b) {
            const Vector velocity = (b - 2) * h * v + (a - 2) * h * w;
            const Flow flow = integrate_flow(lagrangian, x, velocity, request);
            auto& m = family.members[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
            m.position = flow.path.position;
            m.velocity = flow.path.velocity;
            for (const auto& frame : flow.transported) m.transport.push_back(frame.col(0));
            m.jacobi = jacobi_bvp(flow, u).field;
            if (a == 2 && b == 2) family.tau = flow.path.tau;
        }
    }
    return family;
}

Vector family_derivative(const VariationFamily& family, FamilyField field, std::string_view ops, std::size_t tau_index) {
    if (ops.size() > kJetOrder) throw DomainError("family derivatives are available up to order 3");
    const JetVector position = grid_jets(family, FamilyField::Position, tau_index);
    if (ops.empty()) return values(field == FamilyField::Position ? position : grid_jets(family, field, tau_index));

    const auto& base = family.members[2][2].position[tau_index];
    const std::vector<Jet> chart = christoffel_jets(family.lagrangian.metric, base, kJetOrder);
    JetVector gamma;
    for (const auto& g : chart) gamma.push_back(compose(g, position));

    // Operators apply right to left.
    auto rest = ops;
    JetVector current;
    if (field == FamilyField::Position) {
        const int var = variable_of(rest.back());
        for (const auto& p : position) current.push_back(p.derivative(var));
        rest.remove_suffix(1);
    } else {
        current = grid_jets(family, field, tau_index);
    }
    while (!rest.empty()) {
        current = covariant(current, position, gamma, variable_of(rest.back()));
        rest.remove_suffix(1);
    }
    return values(current);
}

Vector extrapolated_derivative(const VariationFamily& coarse, const VariationFamily& fine, FamilyField field,
                               std::string_view ops, std::size_t tau_index) {
    return (4.0 * family_derivative(fine, field, ops, tau_index) - family_derivative(coarse, field, ops, tau_index)) /
           3.0;
}

std::vector<LemmaCheck> run_lemma_suite(const Lagrangian& lagrangian, const Eigen::Ref<const Vector>& x,
                                        const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& v,
                                        const Eigen::Ref<const Vector>& w, int steps, double h) {
    const GeometryJet geo = geometry_jet(lagrangian, x, 2);
    const VariationFamily coarse = variation_family(lagrangian, x, u, v, w, h, steps);
    const VariationFamily fine = variation_family(lagrangian, x, u, v, w, h / 2, steps);
    const Vector uu = u, vv = v, ww = w;
    auto R = [&](const Vector& a, const Vector& b, const Vector& c) { return riemann_apply(geo.riemann, geo.g_inv, a, b, c); };

    std::vector<LemmaCheck> checks;
    auto check = [&](std::string name, FamilyField field, std::string_view ops,
                     const std::function<Vector(double)>& expected) {
        LemmaCheck c{std::move(name), 0.0, false};
        for (const double tau : kLemmaTaus) {
            const std::size_t i = node_of(coarse, tau);
            const Vector got = extrapolated_derivative(coarse, fine, field, ops, i);
            c.max_error = std::max(c.max_error, (got - expected(tau)).lpNorm<Eigen::Infinity>());
        }
        c.pass = c.max_error <= kLemmaTolerance;
        checks.push_back(std::move(c));
    };
    const Vector zero = Vector::Zero(x.size());
    auto vanishes = [&](double) { return zero; };

    check("dtau gamma = 0", FamilyField::Velocity, "", vanishes);
    if (lagrangian.riemannian()) {
        check("dt gamma = tau v", FamilyField::Position, "t", [&](double t) { return Vector(t * vv); });
        check("ds gamma = tau w", FamilyField::Position, "s", [&](double t) { return Vector(t * ww); });
        check("Ds U = 0", FamilyField::Transport, "s", vanishes);
        check("Dt U = 0", FamilyField::Transport, "t", vanishes);
        check("Ds Ds U = 0", FamilyField::Transport, "ss", vanishes);
        check("Dt Dt U = 0", FamilyField::Transport, "tt", vanishes);
        check("J = (1 - tau) u", FamilyField::Jacobi, "", [&](double t) { return Vector((1 - t) * uu); });
        check("Ds Ds dtau gamma = 0", FamilyField::Velocity, "ss", vanishes);
        check("Dt Dt dtau gamma = 0", FamilyField::Velocity, "tt", vanishes);
        check("Dt Ds dtau gamma = 0", FamilyField::Velocity, "ts", vanishes);
        check("Ds Dt dtau gamma = 0", FamilyField::Velocity, "st", vanishes);
        // Ds Dt X means Ds(Dt X).
        check("Ds Ds Dt dtau gamma = tau^2 R(v,w)w", FamilyField::Velocity, "sst",
              [&](double t) { return Vector(t * t * R(vv, ww, ww)); });
        check("Dt Dt Ds dtau gamma = tau^2 R(w,v)v", FamilyField::Velocity, "tts",
              [&](double t) { return Vector(t * t * R(ww, vv, vv)); });
        check("Ds Dt Dt dtau gamma = tau^2 R(v,w)v", FamilyField::Velocity, "stt",
              [&](double t) { return Vector(t * t * R(vv, ww, vv)); });
        check("Dt Ds Ds dtau gamma = tau^2 R(w,v)w", FamilyField::Velocity, "tss",
              [&](double t) { return Vector(t * t * R(ww, vv, ww)); });
        check("Ds Dt U = (tau^2/2) R(v,w)u", FamilyField::Transport, "st",
              [&](double t) { return Vector(0.5 * t * t * R(vv, ww, uu)); });
        check("Dt Ds U = (tau^2/2) R(w,v)u", FamilyField::Transport, "ts",
              [&](double t) { return Vector(0.5 * t * t * R(ww, vv, uu)); });
        check("Ds J = 0", FamilyField::Jacobi, "s", vanishes);
        check("Dt J = 0", FamilyField::Jacobi, "t", vanishes);
        check("Dt Dt J = tau(tau-1)(tau-2)/3 R(v,u)v", FamilyField::Jacobi, "tt",
              [&](double t) { return Vector(t * (t - 1) * (t - 2) / 3 * R(vv, uu, vv)); });
        check("Ds Ds J = tau(tau-1)(tau-2)/3 R(w,u)w", FamilyField::Jacobi, "ss",
              [&](double t) { return Vector(t * (t - 1) * (t - 2) / 3 * R(ww, uu, ww)); });
        auto mixed_jacobi = [&](double t) {
            return Vector(t * (t - 1) / 3 * ((t - 2) * R(ww, uu, vv) - (t + 1) * R(vv, ww, uu)));
        };
        check("Ds Dt J = tau(tau-1)/3 [(tau-2)R(w,u)v - (tau+1)R(v,w)u]", FamilyField::Jacobi, "st", mixed_jacobi);
        // The other order differs by the commutator R(Ds gamma, Dt gamma) J.
        check("Dt Ds J = Ds Dt J + tau^2 (1-tau) R(w,v)u", FamilyField::Jacobi, "ts",
              [&](double t) { return Vector(mixed_jacobi(t) + t * t * (1 - t) * R(ww, vv, uu)); });
        return checks;
    }

    const LinearizedModes modes = linearized_modes(geo);
    if (geo.dV.lpNorm<Eigen::Infinity>() > 1e-10) throw DomainError("mechanical lemmas need a critical point of V");
    auto wbar = [&](const Vector& a, double t) { return modes.apply(geo.g, a, t, LinearizedModes::wbar); };
    auto wbar_dot = [&](const Vector& a, double t) {
        return modes.apply(geo.g, a, t, [](double mu, double s) { return mu == 0.0 ? 1.0 : std::cosh(mu * s); });
    };
    check("dt gamma = vbar", FamilyField::Position, "t", [&](double t) { return wbar(vv, t); });
    check("ds gamma = wbar", FamilyField::Position, "s", [&](double t) { return wbar(ww, t); });
    check("Ds U = 0", FamilyField::Transport, "s", vanishes);
    check("Ds Ds U = -int R(dtau wbar, wbar)u", FamilyField::Transport, "ss", [&](double t) {
        // Simpson rule over [0, t].
        constexpr int kPanels = 200;
        Vector sum = Vector::Zero(x.size());
        for (int k = 0; k <= kPanels; ++k) {
            const double s = t * k / kPanels;
            const double weight = (k == 0 || k == kPanels) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
            sum -= weight * R(wbar_dot(ww, s), wbar(ww, s), uu);
        }
        return Vector(sum * t / (3.0 * kPanels));
    });
    check("J = utilde", FamilyField::Jacobi, "",
          [&](double t) { return modes.apply(geo.g, uu, t, LinearizedModes::utilde); });
    return checks;
}

}  // namespace mtw
