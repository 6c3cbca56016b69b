#include "hpinn/problem.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hpinn {

std::string_view to_string(CaseKind c) {
    return c == CaseKind::dirichlet2d ? "dirichlet2d" : "neumann3d";
}

CaseKind parse_case(std::string_view name) {
    if (name == "dirichlet2d") return CaseKind::dirichlet2d;
    if (name == "neumann3d") return CaseKind::neumann3d;
    throw std::invalid_argument("unknown case '" + std::string(name) + "'");
}

std::string_view to_string(HardConstraint h) {
    switch (h) {
        case HardConstraint::none: return "none";
        case HardConstraint::vanishing: return "vanishing";
        case HardConstraint::paper: return "paper";
    }
    return "?";
}

HardConstraint parse_hard_constraint(std::string_view name) {
    if (name == "none") return HardConstraint::none;
    if (name == "vanishing") return HardConstraint::vanishing;
    if (name == "paper") return HardConstraint::paper;
    throw std::invalid_argument("unknown hard constraint '" + std::string(name) + "'");
}

std::string_view to_string(NeumannSource s) { return s == NeumannSource::consistent ? "consistent" : "paper"; }

NeumannSource parse_neumann_source(std::string_view name) {
    if (name == "consistent") return NeumannSource::consistent;
    if (name == "paper") return NeumannSource::paper;
    throw std::invalid_argument("unknown Neumann source '" + std::string(name) + "'");
}

ProblemSpec manufactured(CaseKind kind, int omega, const ManufacturedOptions& options) {
    if (omega < 1) throw std::invalid_argument("omega must be a positive integer");
    ProblemSpec spec;
    spec.case_kind = kind;
    spec.omega = omega;
    const double k = wavenumber(omega);
    spec.kappa = k;
    spec.boundary_data = [](const Point&) { return 0.0; };

    if (kind == CaseKind::dirichlet2d) {
        spec.dim = 2;
        spec.bc = BcKind::dirichlet;
        spec.hard = options.hard;
        spec.exact = [k](const Point& p) { return std::sin(k * p[0]) * std::sin(k * p[1]); };
        spec.source = [k](const Point& p) { return k * k * std::sin(k * p[0]) * std::sin(k * p[1]); };
        spec.exact_jet = [k](const Point& p) {
            const double sx = std::sin(k * p[0]), cx = std::cos(k * p[0]);
            const double sy = std::sin(k * p[1]), cy = std::cos(k * p[1]);
            InputJet j = InputJet::zero(2);
            j.value = sx * sy;
            j.d1 = {k * cx * sy, k * sx * cy, 0.0};
            j.d2 = {-k * k * sx * sy, -k * k * sx * sy, 0.0};
            return j;
        };
        return spec;
    }

    if (options.hard != HardConstraint::none)
        throw std::invalid_argument("hard constraints are only supported for the Dirichlet case");
    spec.dim = 3;
    spec.bc = BcKind::neumann;
    spec.hard = HardConstraint::none;
    const double scale = options.neumann_source == NeumannSource::paper ? 2.0 * k * k : k * k;
    spec.exact = [k](const Point& p) { return std::cos(k * p[0]) * std::cos(k * p[1]); };
    spec.source = [k, scale](const Point& p) { return scale * std::cos(k * p[0]) * std::cos(k * p[1]); };
    spec.exact_jet = [k](const Point& p) {
        const double sx = std::sin(k * p[0]), cx = std::cos(k * p[0]);
        const double sy = std::sin(k * p[1]), cy = std::cos(k * p[1]);
        InputJet j = InputJet::zero(3);
        j.value = cx * cy;
        j.d1 = {-k * sx * cy, -k * cx * sy, 0.0};
        j.d2 = {-k * k * cx * cy, -k * k * cx * cy, 0.0};
        return j;
    };
    return spec;
}

double helmholtz_residual(const InputJet& jet, double kappa, double f_at_x) {
    return -jet.laplacian() - kappa * kappa * jet.value - f_at_x;
}

double neumann_residual(const InputJet& jet, std::span<const double> normal, double g_at_x) {
    if (static_cast<int>(normal.size()) != jet.dim) throw std::domain_error("normal dimension mismatch");
    double norm2 = 0.0, flux = 0.0;
    for (std::size_t i = 0; i < normal.size(); ++i) {
        norm2 += normal[i] * normal[i];
        flux += normal[i] * jet.d1[i];
    }
    if (std::abs(std::sqrt(norm2) - 1.0) > 1e-12) throw std::domain_error("boundary normal is not a unit vector");
    return flux - g_at_x;
}

InputJet hard_multiplier(HardConstraint kind, const Point& x) {
    if (x.dim != 2) throw std::invalid_argument("hard constraints are defined on [0,1]^2 only");
    InputJet m = InputJet::zero(2);
    const double px = x[0], py = x[1];
    switch (kind) {
        case HardConstraint::none:
            m.value = 1.0;
            break;
        case HardConstraint::vanishing: {
            const double fx = px * (1.0 - px), fy = py * (1.0 - py);
            m.value = fx * fy;
            m.d1 = {(1.0 - 2.0 * px) * fy, fx * (1.0 - 2.0 * py), 0.0};
            m.d2 = {-2.0 * fy, -2.0 * fx, 0.0};
            break;
        }
        case HardConstraint::paper: {
            const double fx = 1.0 - px * px, fy = 1.0 - py * py;
            m.value = fx * fy;
            m.d1 = {-2.0 * px * fy, -2.0 * py * fx, 0.0};
            m.d2 = {-2.0 * fy, -2.0 * fx, 0.0};
            break;
        }
    }
    return m;
}

double hard_transform(HardConstraint kind, const Point& x, double u_raw) {
    if (kind == HardConstraint::none) return u_raw;
    return hard_multiplier(kind, x).value * u_raw;
}

InputJet hard_transform(HardConstraint kind, const Point& x, const InputJet& u) {
    if (kind == HardConstraint::none) return u;
    const InputJet m = hard_multiplier(kind, x);
    InputJet out = InputJet::zero(2);
    out.value = m.value * u.value;
    for (std::size_t i = 0; i < 2; ++i) {
        out.d1[i] = m.d1[i] * u.value + m.value * u.d1[i];
        out.d2[i] = m.d2[i] * u.value + 2.0 * m.d1[i] * u.d1[i] + m.value * u.d2[i];
    }
    return out;
}

InputJet hard_transform_adjoint(HardConstraint kind, const Point& x, const InputJet& bar) {
    if (kind == HardConstraint::none) return bar;
    const InputJet m = hard_multiplier(kind, x);
    InputJet raw = InputJet::zero(2);
    raw.value = bar.value * m.value;
    for (std::size_t i = 0; i < 2; ++i) {
        raw.value += bar.d1[i] * m.d1[i] + bar.d2[i] * m.d2[i];
        raw.d1[i] = bar.d1[i] * m.value + 2.0 * bar.d2[i] * m.d1[i];
        raw.d2[i] = bar.d2[i] * m.value;
    }
    return raw;
}

}  // namespace hpinn
