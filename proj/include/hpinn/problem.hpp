#pragma once

#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string_view>

#include "hpinn/net.hpp"

namespace hpinn {

enum class BcKind { dirichlet, neumann };
enum class CaseKind { dirichlet2d, neumann3d };

/// Output multipliers for hard Dirichlet constraints on [0,1]^2.
///   vanishing: x(1-x) y(1-y), zero on the whole boundary.
///   paper:     (1-x^2)(1-y^2), zero only on x = 1 and y = 1.
enum class HardConstraint { none, vanishing, paper };

enum class NeumannSource { consistent, paper };

std::string_view to_string(CaseKind c);
CaseKind parse_case(std::string_view name);
std::string_view to_string(HardConstraint h);
HardConstraint parse_hard_constraint(std::string_view name);
std::string_view to_string(NeumannSource s);
NeumannSource parse_neumann_source(std::string_view name);

/// Point on the boundary of [0,1]^d with its outward unit normal.
struct BoundaryPoint {
    Point x;
    Point normal;
};

using ScalarField = std::function<double(const Point&)>;

/// -Laplace(u) - kappa^2 u = f in (0,1)^d with a Dirichlet or Neumann condition.
struct ProblemSpec {
    CaseKind case_kind = CaseKind::dirichlet2d;
    int dim = 2;
    int omega = 1;
    double kappa = 2.0 * std::numbers::pi;
    BcKind bc = BcKind::dirichlet;
    ScalarField source;
    ScalarField boundary_data;
    ScalarField exact;  ///< empty when no exact solution is known
    /// Analytic jet of the exact solution, used by consistency checks.
    std::function<InputJet(const Point&)> exact_jet;
    HardConstraint hard = HardConstraint::none;

    bool has_exact() const { return static_cast<bool>(exact); }
    bool has_boundary_term() const { return !(bc == BcKind::dirichlet && hard != HardConstraint::none); }
};

inline double wavenumber(int omega) { return 2.0 * std::numbers::pi * static_cast<double>(omega); }

struct ManufacturedOptions {
    HardConstraint hard = HardConstraint::vanishing;
    NeumannSource neumann_source = NeumannSource::consistent;
};

/// Manufactured cases: Dirichlet2D u = sin(kx) sin(ky); Neumann3D u = cos(kx) cos(ky).
/// Throws std::invalid_argument for omega < 1 or a hard constraint on the Neumann case.
ProblemSpec manufactured(CaseKind kind, int omega, const ManufacturedOptions& options = {});

/// -sum_i d2u/dx_i^2 - kappa^2 u - f.
double helmholtz_residual(const InputJet& jet, double kappa, double f_at_x);

inline double dirichlet_residual(double u_value, double g_at_x) { return u_value - g_at_x; }

/// n . grad(u) - g. Throws std::domain_error unless |n| = 1 (to 1e-12).
double neumann_residual(const InputJet& jet, std::span<const double> normal, double g_at_x);

/// Multiplier value and its first/second pure partials at x (d = 2 only).
InputJet hard_multiplier(HardConstraint kind, const Point& x);

/// u_hat = l(x) u_raw. The jet overload applies the product rule exactly.
double hard_transform(HardConstraint kind, const Point& x, double u_raw);
InputJet hard_transform(HardConstraint kind, const Point& x, const InputJet& u_raw);

/// Pulls an adjoint of the transformed jet back to an adjoint of the raw jet.
InputJet hard_transform_adjoint(HardConstraint kind, const Point& x, const InputJet& transformed_adjoint);

}  // namespace hpinn
