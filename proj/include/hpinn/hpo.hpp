#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "hpinn/gp.hpp"
#include "hpinn/hyperparams.hpp"
#include "hpinn/net.hpp"
#include "hpinn/optimizer.hpp"
#include "hpinn/rng.hpp"

namespace hpinn {

/// Expected improvement for minimisation:
/// (best - mu - xi) Phi(z) + sigma phi(z), z = (best - mu - xi) / sigma,
/// and max(best - mu - xi, 0) when sigma = 0.
double expected_improvement(double mu, double sigma, double best, double xi);

/// Index of the row of `candidates` minimising -EI under `model`; the first
/// index wins ties.
std::size_t argmin_negative_ei(const GpModel& model, const Eigen::MatrixXd& candidates, double best, double xi);

struct HpoOptions {
    SearchSpace space = SearchSpace::dirichlet();
    HyperParams initial;
    int iterations = 100;    ///< M
    int n_random = 10;       ///< trials before the surrogate takes over, lambda_0 included
    int n_candidates = 10'000;
    double xi = 0.01;
    bool log_targets = true;  ///< fit the GP to log10(loss^test)
    /// Diverged trials enter the GP with this multiple of the worst finite loss so far.
    double divergence_factor = 10.0;
    GpOptions gp;
    std::uint64_t seed = 11;
};

/// Loss used when every trial so far has diverged.
inline constexpr double kNoFiniteLossPenalty = 1e10;

/// Draws n_candidates random points of the space, scores -EI and returns the
/// decoded minimiser. `best` is in the model's target units.
HyperParams propose_next(const GpModel& model, double best, const SearchSpace& space, int n_candidates, double xi,
                         Rng& rng);

struct TrialOutcome {
    double loss_train = 0.0;
    double loss_test = 0.0;
    double metric = 0.0;
    bool diverged = false;
    std::size_t param_count = 0;
    double seconds = 0.0;
    std::optional<MlpParams> params;  ///< best iterate of the trial, if kept
};

using TrialObjective = std::function<TrialOutcome(const HyperParams& hp, int iteration)>;

struct TrialRecord {
    int iteration = 0;
    HyperParams hp;
    std::vector<double> encoded;
    double loss_train = 0.0;
    double loss_test = 0.0;
    double metric = 0.0;
    std::size_t param_count = 0;
    bool diverged = false;
    double seconds = 0.0;
    bool random = true;       ///< drawn at random rather than proposed by the surrogate
    double gp_target = 0.0;   ///< value fed to the GP for this trial
};

struct HpoResult {
    std::vector<TrialRecord> trials;
    std::optional<int> best_iteration;  ///< empty when every trial diverged
    std::vector<double> best_so_far;    ///< min loss^test over non-diverged trials 0..m
    std::vector<nlohmann::json> gp_log; ///< fitted surrogate per surrogate-driven iteration
    std::optional<MlpParams> best_params;
    std::optional<GpModel> final_model; ///< GP fitted on all trials (when >= 2)
    bool all_diverged = false;

    const TrialRecord& best() const;
};

/// Gaussian-process Bayesian optimisation over `options.space`. Iteration 0
/// evaluates options.initial, iterations 1..n_random-1 are uniform draws, and
/// later iterations evaluate the -EI minimiser of a GP fitted on all trials.
HpoResult run_hpo(const HpoOptions& options, const TrialObjective& objective,
                  const std::function<void(const TrialRecord&)>& on_trial = {});

/// Objective that trains a PINN for each hyper-parameter point; every trial
/// initialises its network from `init_seed`.
TrialObjective training_objective(const ProblemSpec& spec, const CollocationSet& sets, const TrainOptions& train,
                                  std::uint64_t init_seed);

/// Model target for a raw loss under the campaign's transform.
double gp_target(double loss, bool log_targets);

enum class HpDim { learning_rate, depth, width, activation, boundary_weight };
std::string_view to_string(HpDim d);

struct PdpRow {
    double value = 0.0;  ///< hyper-parameter value (activation: index in kActivationOrder)
    std::string label;
    double mean = 0.0;   ///< averaged posterior mean, in GP target units
};

/// Average of the posterior mean over `background` rows with encoded
/// coordinate `dim` replaced by each grid value.
std::vector<double> partial_dependence(const GpModel& model, const Eigen::MatrixXd& background, int dim,
                                       std::span<const double> grid);

/// Partial dependence along one hyper-parameter, averaging over n_avg uniform
/// draws of the others. Continuous dimensions give grid_size rows; the
/// activation gives one row per category.
std::vector<PdpRow> partial_dependence(const GpModel& model, const SearchSpace& space, HpDim dim, int grid_size,
                                       int n_avg, Rng& rng);

}  // namespace hpinn
