#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hpinn/net.hpp"
#include "hpinn/problem.hpp"
#include "hpinn/rng.hpp"

namespace hpinn {

/// Labelled observation (point, u value).
struct Observation {
    Point x;
    double value = 0.0;
};

/// Train and test collocation points. Observations are optional.
struct CollocationSet {
    std::vector<Point> domain_train;
    std::vector<Point> domain_test;
    std::vector<BoundaryPoint> boundary_train;
    std::vector<BoundaryPoint> boundary_test;
    std::vector<Observation> observations;
};

/// n_x = round(r * omega): there are omega wavelengths across [0,1].
int points_per_dim(double r, int omega);

/// r = n_x / omega rounded to one decimal.
double precision_of(int nx, int omega);

struct LevelSize {
    int n = 0;
    std::size_t count = 0;
};

/// n_l = 10 * 2^(l-1), |T_l| = n_l^2 for l in {1, 3, 5}; throws otherwise.
LevelSize level_size(int level);

std::vector<Point> sample_domain(std::size_t count, int dim, Rng& rng);

/// Uniform by area over the boundary of [0,1]^d with outward normals.
std::vector<BoundaryPoint> sample_boundary(std::size_t count, int dim, Rng& rng);

enum class BoundaryCountMode { formula, paper16 };

std::string_view to_string(BoundaryCountMode m);
BoundaryCountMode parse_boundary_count_mode(std::string_view name);

/// formula: 2^(d-1) d n_x^(d-1); paper16: 16 n_x^2 (d = 3 only).
std::size_t neumann_boundary_count(int dim, int nx, BoundaryCountMode mode);

struct SamplingPlan {
    double r_train = 10.0;
    double r_test = 30.0;
    /// When set, the training density is the level's n_l instead of r_train.
    std::optional<int> level;
    BoundaryCountMode boundary_mode = BoundaryCountMode::formula;
};

/// Builds the sets for a problem.
///
/// 2D: |T_D| = n_x^2 for train and test; boundary sets only when the problem
/// keeps a boundary loss term. 3D (Neumann protocol): |T_D| = n_x^2,
/// |T_Gamma| per boundary_mode, and the test sets equal the training sets.
CollocationSet build_collocation(const ProblemSpec& spec, const SamplingPlan& plan, Rng& rng);

/// One row per point: x0..x{d-1}[, n0..n{d-1}].
void write_points_csv(const std::string& path, const std::vector<Point>& points);
void write_points_csv(const std::string& path, const std::vector<BoundaryPoint>& points);

}  // namespace hpinn
