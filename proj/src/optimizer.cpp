#include "hpinn/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hpinn {

void adam_step(AdamState& state, std::span<double> params, std::span<const double> gradient) {
    const std::size_t n = params.size();
    if (gradient.size() != n || state.m.size() != n || state.v.size() != n)
        throw std::invalid_argument("ADAM state, parameters and gradient must have equal length");
    for (const double g : gradient)
        if (!std::isfinite(g)) throw NumericalFault("non-finite gradient in ADAM step");

    const AdamConfig& c = state.config;
    const auto k1 = static_cast<double>(state.step + 1);
    const double correction1 = 1.0 - std::pow(c.beta1, k1);
    const double correction2 = 1.0 - std::pow(c.beta2, k1);
    for (std::size_t i = 0; i < n; ++i) {
        const double g = gradient[i];
        state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * g;
        state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * (g * g);
        const double m_hat = state.m[i] / correction1;
        const double v_hat = state.v[i] / correction2;
        params[i] = params[i] - c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
    }
    ++state.step;
}

const EpochLog& TrainResult::best() const {
    for (const auto& e : curve)
        if (e.epoch == best_epoch) return e;
    throw std::logic_error("best epoch is not among the logged epochs");
}

LossWeights weights_for(const HyperParams& hp) {
    LossWeights w;
    if (hp.boundary_weight) w.boundary = *hp.boundary_weight;
    return w;
}

TrainResult train(const HyperParams& hp, const ProblemSpec& spec, const CollocationSet& sets,
                  const TrainOptions& options, Rng& rng) {
    return train_from(glorot_init(hp.architecture(spec.dim), rng), hp, spec, sets, options);
}

TrainResult train_from(MlpParams params, const HyperParams& hp, const ProblemSpec& spec,
                       const CollocationSet& sets, const TrainOptions& options) {
    if (options.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (options.log_every < 1) throw std::invalid_argument("log_every must be >= 1");
    if (params.architecture().input_dim != spec.dim) throw std::invalid_argument("network input dim does not match the problem");

    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    const auto seconds = [&start] { return std::chrono::duration<double>(clock::now() - start).count(); };

    const LossWeights weights = weights_for(hp);
    const PointSets train_pts = train_sets(sets);
    const PointSets test_pts = test_sets(sets);

    AdamState adam({hp.learning_rate, 0.9, 0.999, options.epsilon}, params.size());
    MlpParams gradient(params.architecture());

    TrainResult result;
    result.best_params = params;
    double best_loss = std::numeric_limits<double>::infinity();

    for (int epoch = 0; epoch <= options.epochs; ++epoch) {
        const bool logged = epoch % options.log_every == 0 || epoch == options.epochs;
        LossBreakdown train_loss;
        try {
            train_loss = epoch < options.epochs ? composite_loss_gradient(params, train_pts, weights, spec, gradient)
                                                : composite_loss(params, train_pts, weights, spec);
            if (logged) {
                EpochLog log;
                log.epoch = epoch;
                log.train = train_loss;
                log.test = composite_loss(params, test_pts, weights, spec);
                log.metric = spec.has_exact() ? relative_l2_metric(params, sets.domain_test, spec)
                                              : std::numeric_limits<double>::quiet_NaN();
                log.elapsed_seconds = seconds();
                if (spec.has_exact() && !std::isfinite(log.metric)) throw NumericalFault("non-finite metric");
                result.curve.push_back(log);
                if (train_loss.total < best_loss) {
                    best_loss = train_loss.total;
                    result.best_epoch = epoch;
                    result.best_params = params;
                }
            }
            if (epoch < options.epochs) adam_step(adam, params.values(), gradient.values());
        } catch (const NumericalFault&) {
            result.diverged = true;
            break;
        }
    }

    if (!result.curve.empty() && std::isfinite(best_loss)) {
        const EpochLog& b = result.best();
        result.loss_train = b.train.total;
        result.loss_test = b.test.total;
        result.metric = b.metric;
    } else {
        result.diverged = true;
        result.loss_train = result.loss_test = result.metric = std::numeric_limits<double>::infinity();
    }
    result.wall_seconds = seconds();
    return result;
}

}  // namespace hpinn
