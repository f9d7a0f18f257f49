#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "mtwcheck/dynamics.hpp"

namespace mtw {

/// Curves of least action gamma_{s,t} with initial velocity t v + s w from x,
/// sampled on the 5 x 5 grid s, t in {-2h, ..., 2h}, together with the
/// parallel transport U of u and the Jacobi field J with J(0) = u, J(1) = 0.
struct VariationFamily {
    struct Member {
        std::vector<Vector> position;
        std::vector<Vector> velocity;
        std::vector<Vector> transport;
        std::vector<Vector> jacobi;
    };

    Lagrangian lagrangian;
    double h = 0.0;
    int steps = kDefaultSteps;
    std::vector<double> tau;
    /// members[a][b] has s = (a - 2) h and t = (b - 2) h.
    std::array<std::array<Member, 5>, 5> members;
};

enum class FamilyField { Position, Velocity, Transport, Jacobi };

VariationFamily variation_family(const Lagrangian& lagrangian, const Eigen::Ref<const Vector>& x,
                                 const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& v,
                                 const Eigen::Ref<const Vector>& w, double h, int steps = kDefaultSteps);

/// Covariant (s, t)-derivative of a field at s = t = 0 and grid node tau_i.
/// `ops` reads like the operator word: "ts" is D_t D_s. For the position the
/// innermost derivative is the coordinate derivative d gamma.
Vector family_derivative(const VariationFamily& family, FamilyField field, std::string_view ops, std::size_t tau_index);

/// Richardson combination (4 Q(h/2) - Q(h)) / 3 of two families.
Vector extrapolated_derivative(const VariationFamily& coarse, const VariationFamily& fine, FamilyField field,
                               std::string_view ops, std::size_t tau_index);

struct LemmaCheck {
    std::string name;
    double max_error = 0.0;
    bool pass = false;
};

inline constexpr double kLemmaTolerance = 1e-3;
inline constexpr std::array<double, 5> kLemmaTaus{0.1, 0.3, 0.5, 0.7, 0.9};

/// Finite-difference checks of the variation-family identities at x. For
/// V = 0 the Riemannian identities are checked; otherwise x must be a local
/// maximum of V and the mechanical identities are checked.
std::vector<LemmaCheck> run_lemma_suite(const Lagrangian& lagrangian, const Eigen::Ref<const Vector>& x,
                                        const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& v,
                                        const Eigen::Ref<const Vector>& w, int steps = kDefaultSteps,
                                        double h = 1e-2);

}  // namespace mtw
