#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "hpinn/hyperparams.hpp"
#include "hpinn/loss.hpp"
#include "hpinn/net.hpp"
#include "hpinn/problem.hpp"
#include "hpinn/sampling.hpp"

namespace hpinn {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-7;
};

struct AdamState {
    AdamConfig config;
    std::size_t step = 0;
    std::vector<double> m;
    std::vector<double> v;

    AdamState(AdamConfig cfg, std::size_t n) : config(cfg), m(n, 0.0), v(n, 0.0) {}
};

/// One ADAM update with bias correction, in place. Throws NumericalFault on a
/// non-finite gradient (params and state are left untouched).
void adam_step(AdamState& state, std::span<double> params, std::span<const double> gradient);

struct EpochLog {
    int epoch = 0;
    LossBreakdown train;
    LossBreakdown test;
    double metric = 0.0;  ///< NaN when the problem has no exact solution
    double elapsed_seconds = 0.0;
};

struct TrainOptions {
    int epochs = 50'000;
    int log_every = 100;
    double epsilon = 1e-7;
};

struct TrainResult {
    MlpParams best_params;
    int best_epoch = 0;
    std::vector<EpochLog> curve;  ///< logged epochs: 0, log_every, ..., epochs
    bool diverged = false;
    double loss_train = 0.0;  ///< train loss of the best iterate
    double loss_test = 0.0;   ///< test loss of the best iterate
    double metric = 0.0;
    double wall_seconds = 0.0;

    const EpochLog& best() const;
};

/// Full-batch ADAM on the composite training loss. The best iterate is the
/// argmin of the train loss over logged epochs. A non-finite loss stops the
/// run with diverged = true; the best iterate so far is still returned.
TrainResult train(const HyperParams& hp, const ProblemSpec& spec, const CollocationSet& sets,
                  const TrainOptions& options, Rng& rng);

/// Same, starting from explicit parameters.
TrainResult train_from(MlpParams initial, const HyperParams& hp, const ProblemSpec& spec,
                       const CollocationSet& sets, const TrainOptions& options);

/// Loss weights implied by hyper-parameters: w_Gamma from hp, others 1.
LossWeights weights_for(const HyperParams& hp);

}  // namespace hpinn
