#pragma once

#include <span>
#include <vector>

#include "hpinn/net.hpp"
#include "hpinn/problem.hpp"
#include "hpinn/sampling.hpp"

namespace hpinn {

struct LossWeights {
    double domain = 1.0;
    double boundary = 1.0;
    double data = 1.0;

    /// Throws std::invalid_argument unless every weight is finite and > 0.
    void validate() const;
};

enum LossWarning : unsigned {
    kEmptyDomain = 1u << 0,
    kEmptyBoundary = 1u << 1,
    kEmptyData = 1u << 2,
};

struct LossBreakdown {
    double pde = 0.0;
    double bc = 0.0;
    double data = 0.0;
    double total = 0.0;
    unsigned warnings = 0;  ///< LossWarning bits for empty point sets
};

/// One evaluation partition (train or test) of a CollocationSet.
struct PointSets {
    std::span<const Point> domain;
    std::span<const BoundaryPoint> boundary;
    std::span<const Observation> observations;
};

PointSets train_sets(const CollocationSet& sets);
PointSets test_sets(const CollocationSet& sets);

/// Mean squared Helmholtz residual of the (hard-transformed) network. If
/// `gradient` is non-null, adds scale * d(loss)/d(theta) into it.
double pde_loss(const MlpParams& params, std::span<const Point> points, const ProblemSpec& spec,
                MlpParams* gradient = nullptr, double scale = 1.0);

/// Mean squared boundary residual (Dirichlet value or Neumann flux).
double bc_loss(const MlpParams& params, std::span<const BoundaryPoint> points, const ProblemSpec& spec,
               MlpParams* gradient = nullptr, double scale = 1.0);

/// Mean squared misfit to observations; 0 for an empty set.
double data_loss(const MlpParams& params, std::span<const Observation> observations, const ProblemSpec& spec,
                 MlpParams* gradient = nullptr, double scale = 1.0);

/// Mean of squares of the PDE residual evaluated on supplied jets of the
/// solution candidate (already transformed). Used to check analytic fields.
double pde_loss_from_jets(std::span<const InputJet> jets, std::span<const Point> points, const ProblemSpec& spec);

/// w_D pde + w_Gamma bc + w_u data. The bc term is omitted when the problem
/// enforces Dirichlet data through a hard constraint.
LossBreakdown composite_loss(const MlpParams& params, const PointSets& sets, const LossWeights& weights,
                             const ProblemSpec& spec);

/// Same breakdown, with the parameter gradient of `total` written to `gradient`.
LossBreakdown composite_loss_gradient(const MlpParams& params, const PointSets& sets, const LossWeights& weights,
                                      const ProblemSpec& spec, MlpParams& gradient);

/// Network output after the problem's hard-constraint transform.
std::vector<double> solution_values(const MlpParams& params, const ProblemSpec& spec, std::span<const Point> points);

/// |pred - exact|_2 / |exact|_2. Throws std::domain_error when |exact|_2 = 0.
double relative_l2(std::span<const double> predicted, std::span<const double> exact);

/// Relative l2 error of the transformed network against spec.exact on `points`.
double relative_l2_metric(const MlpParams& params, std::span<const Point> points, const ProblemSpec& spec);

}  // namespace hpinn
