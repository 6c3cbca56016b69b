#include "hpinn/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace hpinn {

void LossWeights::validate() const {
    for (const double w : {domain, boundary, data})
        if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("loss weights must be finite and positive");
}

PointSets train_sets(const CollocationSet& sets) {
    return {sets.domain_train, sets.boundary_train, sets.observations};
}

PointSets test_sets(const CollocationSet& sets) {
    return {sets.domain_test, sets.boundary_test, sets.observations};
}

double pde_loss(const MlpParams& params, std::span<const Point> points, const ProblemSpec& spec,
                MlpParams* gradient, double scale) {
    if (points.empty()) return 0.0;
    const double inv_n = 1.0 / static_cast<double>(points.size());
    const double k2 = spec.kappa * spec.kappa;
    const PointLoss term = [&](std::size_t i, const InputJet& raw, InputJet& adjoint) {
        const Point& x = points[i];
        const InputJet u = hard_transform(spec.hard, x, raw);
        const double r = helmholtz_residual(u, spec.kappa, spec.source(x));
        // d(r^2 / N)/d(jet), pulled back through the transform.
        const double c = 2.0 * r * inv_n * scale;
        InputJet bar = InputJet::zero(u.dim);
        bar.value = -k2 * c;
        for (int d = 0; d < u.dim; ++d) bar.d2[static_cast<std::size_t>(d)] = -c;
        adjoint = hard_transform_adjoint(spec.hard, x, bar);
        return r * r * inv_n;
    };
    return param_gradient(params, points, JetOrder::second, term, gradient);
}

double bc_loss(const MlpParams& params, std::span<const BoundaryPoint> points, const ProblemSpec& spec,
               MlpParams* gradient, double scale) {
    if (points.empty()) return 0.0;
    const double inv_n = 1.0 / static_cast<double>(points.size());
    std::vector<Point> coords(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) coords[i] = points[i].x;

    if (spec.bc == BcKind::dirichlet) {
        const PointLoss term = [&](std::size_t i, const InputJet& raw, InputJet& adjoint) {
            const Point& x = points[i].x;
            const double r = dirichlet_residual(hard_transform(spec.hard, x, raw.value), spec.boundary_data(x));
            InputJet bar = InputJet::zero(raw.dim);
            bar.value = 2.0 * r * inv_n * scale;
            adjoint = spec.hard == HardConstraint::none ? bar : hard_transform_adjoint(spec.hard, x, bar);
            return r * r * inv_n;
        };
        return param_gradient(params, coords, JetOrder::value, term, gradient);
    }

    const PointLoss term = [&](std::size_t i, const InputJet& jet, InputJet& adjoint) {
        const BoundaryPoint& bp = points[i];
        const double r = neumann_residual(jet, bp.normal.coords(), spec.boundary_data(bp.x));
        const double c = 2.0 * r * inv_n * scale;
        for (int d = 0; d < jet.dim; ++d) adjoint.d1[static_cast<std::size_t>(d)] = c * bp.normal[d];
        return r * r * inv_n;
    };
    return param_gradient(params, coords, JetOrder::first, term, gradient);
}

double data_loss(const MlpParams& params, std::span<const Observation> observations, const ProblemSpec& spec,
                 MlpParams* gradient, double scale) {
    if (observations.empty()) return 0.0;
    const double inv_n = 1.0 / static_cast<double>(observations.size());
    std::vector<Point> coords(observations.size());
    for (std::size_t i = 0; i < observations.size(); ++i) coords[i] = observations[i].x;
    const PointLoss term = [&](std::size_t i, const InputJet& raw, InputJet& adjoint) {
        const Point& x = observations[i].x;
        const double r = hard_transform(spec.hard, x, raw.value) - observations[i].value;
        InputJet bar = InputJet::zero(raw.dim);
        bar.value = 2.0 * r * inv_n * scale;
        adjoint = spec.hard == HardConstraint::none ? bar : hard_transform_adjoint(spec.hard, x, bar);
        return r * r * inv_n;
    };
    return param_gradient(params, coords, JetOrder::value, term, gradient);
}

double pde_loss_from_jets(std::span<const InputJet> jets, std::span<const Point> points, const ProblemSpec& spec) {
    if (jets.size() != points.size()) throw std::invalid_argument("one jet per point is required");
    if (points.empty()) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double r = helmholtz_residual(jets[i], spec.kappa, spec.source(points[i]));
        sum += r * r;
    }
    return sum / static_cast<double>(points.size());
}

namespace {

LossBreakdown assemble(const MlpParams& params, const PointSets& sets, const LossWeights& weights,
                       const ProblemSpec& spec, MlpParams* gradient) {
    weights.validate();
    LossBreakdown out;
    if (sets.domain.empty()) out.warnings |= kEmptyDomain;
    if (sets.observations.empty()) out.warnings |= kEmptyData;
    out.pde = pde_loss(params, sets.domain, spec, gradient, weights.domain);
    if (spec.has_boundary_term()) {
        if (sets.boundary.empty()) out.warnings |= kEmptyBoundary;
        out.bc = bc_loss(params, sets.boundary, spec, gradient, weights.boundary);
    }
    out.data = data_loss(params, sets.observations, spec, gradient, weights.data);
    out.total = weights.domain * out.pde + weights.boundary * out.bc + weights.data * out.data;
    if (!std::isfinite(out.total)) throw NumericalFault("non-finite composite loss");
    return out;
}

}  // namespace

LossBreakdown composite_loss(const MlpParams& params, const PointSets& sets, const LossWeights& weights,
                             const ProblemSpec& spec) {
    return assemble(params, sets, weights, spec, nullptr);
}

LossBreakdown composite_loss_gradient(const MlpParams& params, const PointSets& sets, const LossWeights& weights,
                                      const ProblemSpec& spec, MlpParams& gradient) {
    if (gradient.architecture() != params.architecture()) gradient = MlpParams(params.architecture());
    gradient.set_zero();
    return assemble(params, sets, weights, spec, &gradient);
}

std::vector<double> solution_values(const MlpParams& params, const ProblemSpec& spec, std::span<const Point> points) {
    std::vector<double> values = forward_batch(params, points);
    if (spec.hard != HardConstraint::none)
        for (std::size_t i = 0; i < points.size(); ++i) values[i] = hard_transform(spec.hard, points[i], values[i]);
    return values;
}

double relative_l2(std::span<const double> predicted, std::span<const double> exact) {
    if (predicted.size() != exact.size()) throw std::invalid_argument("vector lengths differ");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i) {
        const double e = predicted[i] - exact[i];
        num += e * e;
        den += exact[i] * exact[i];
    }
    if (den == 0.0) throw std::domain_error("relative l2 error is undefined for a zero reference");
    return std::sqrt(num) / std::sqrt(den);
}

double relative_l2_metric(const MlpParams& params, std::span<const Point> points, const ProblemSpec& spec) {
    if (!spec.has_exact()) throw std::domain_error("the problem has no exact solution");
    const std::vector<double> predicted = solution_values(params, spec, points);
    std::vector<double> exact(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) exact[i] = spec.exact(points[i]);
    return relative_l2(predicted, exact);
}

}  // namespace hpinn
