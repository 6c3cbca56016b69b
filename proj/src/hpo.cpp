#include "hpinn/hpo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

namespace hpinn {

double expected_improvement(double mu, double sigma, double best, double xi) {
    const double gain = best - mu - xi;
    if (!(sigma > 0.0)) return std::max(gain, 0.0);
    const double z = gain / sigma;
    const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
    const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    return std::max(0.0, gain * cdf + sigma * pdf);
}

std::size_t argmin_negative_ei(const GpModel& model, const Eigen::MatrixXd& candidates, double best, double xi) {
    if (candidates.rows() == 0) throw std::invalid_argument("no acquisition candidates");
    std::size_t arg = 0;
    double lowest = std::numeric_limits<double>::infinity();
    std::vector<double> row(static_cast<std::size_t>(candidates.cols()));
    for (Eigen::Index i = 0; i < candidates.rows(); ++i) {
        for (Eigen::Index j = 0; j < candidates.cols(); ++j) row[static_cast<std::size_t>(j)] = candidates(i, j);
        const GpPrediction p = model.predict(row);
        const double score = -expected_improvement(p.mean, p.stddev, best, xi);
        if (score < lowest) {
            lowest = score;
            arg = static_cast<std::size_t>(i);
        }
    }
    return arg;
}

HyperParams propose_next(const GpModel& model, double best, const SearchSpace& space, int n_candidates, double xi,
                         Rng& rng) {
    if (n_candidates < 1) throw std::invalid_argument("n_candidates must be >= 1");
    const int dim = space.encoded_dim();
    if (model.input_dim() != dim) throw std::invalid_argument("surrogate dimension does not match the search space");
    Eigen::MatrixXd candidates(n_candidates, dim);
    for (int i = 0; i < n_candidates; ++i) {
        const auto enc = encode(sample_uniform(space, rng), space);
        for (int j = 0; j < dim; ++j) candidates(i, j) = enc[static_cast<std::size_t>(j)];
    }
    const std::size_t arg = argmin_negative_ei(model, candidates, best, xi);
    std::vector<double> chosen(static_cast<std::size_t>(dim));
    for (int j = 0; j < dim; ++j) chosen[static_cast<std::size_t>(j)] = candidates(static_cast<Eigen::Index>(arg), j);
    return decode(chosen, space);
}

double gp_target(double loss, bool log_targets) {
    if (!log_targets) return loss;
    return std::log10(std::max(loss, 1e-300));
}

const TrialRecord& HpoResult::best() const {
    if (!best_iteration) throw std::logic_error("every trial diverged; no best configuration");
    return trials[static_cast<std::size_t>(*best_iteration)];
}

namespace {

Eigen::MatrixXd history_inputs(const std::vector<TrialRecord>& trials) {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(trials.size()), static_cast<Eigen::Index>(trials.front().encoded.size()));
    for (std::size_t i = 0; i < trials.size(); ++i)
        for (std::size_t j = 0; j < trials[i].encoded.size(); ++j)
            X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = trials[i].encoded[j];
    return X;
}

Eigen::VectorXd history_targets(const std::vector<TrialRecord>& trials) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(trials.size()));
    for (std::size_t i = 0; i < trials.size(); ++i) y(static_cast<Eigen::Index>(i)) = trials[i].gp_target;
    return y;
}

}  // namespace

HpoResult run_hpo(const HpoOptions& options, const TrialObjective& objective,
                  const std::function<void(const TrialRecord&)>& on_trial) {
    if (options.iterations < 1) throw std::invalid_argument("iterations must be >= 1");
    if (options.n_random < 1) throw std::invalid_argument("n_random must be >= 1");
    options.space.validate();
    if (!options.space.contains(options.initial))
        throw std::out_of_range("initial hyper-parameters " + options.initial.to_string() + " lie outside the search space");

    Rng rng(options.seed);
    HpoResult result;
    double best_loss = std::numeric_limits<double>::infinity();
    double worst_finite = -std::numeric_limits<double>::infinity();

    for (int m = 0; m < options.iterations; ++m) {
        HyperParams hp;
        bool random = true;
        if (m == 0) {
            hp = options.initial;
        } else if (m < options.n_random || result.trials.size() < 2) {
            hp = sample_uniform(options.space, rng);
        } else {
            try {
                GpModel model = GpModel::fit(history_inputs(result.trials), history_targets(result.trials), options.gp, rng);
                hp = propose_next(model, model.min_target(), options.space, options.n_candidates, options.xi, rng);
                nlohmann::json entry = model.to_json();
                entry["iteration"] = m;
                entry["proposal"] = hp.to_string();
                result.gp_log.push_back(std::move(entry));
                random = false;
            } catch (const GpFitError& e) {
                result.gp_log.push_back({{"iteration", m}, {"fit_failed", e.what()}});
                hp = sample_uniform(options.space, rng);
            }
        }

        TrialOutcome outcome = objective(hp, m);
        TrialRecord rec;
        rec.iteration = m;
        rec.hp = hp;
        rec.encoded = encode(hp, options.space);
        rec.loss_train = outcome.loss_train;
        rec.loss_test = outcome.loss_test;
        rec.metric = outcome.metric;
        rec.param_count = outcome.param_count;
        rec.seconds = outcome.seconds;
        rec.random = random;
        rec.diverged = outcome.diverged || !std::isfinite(outcome.loss_test);

        if (rec.diverged) {
            const double raw = std::isfinite(worst_finite) ? options.divergence_factor * worst_finite : kNoFiniteLossPenalty;
            rec.gp_target = gp_target(raw, options.log_targets);
        } else {
            worst_finite = std::max(worst_finite, rec.loss_test);
            rec.gp_target = gp_target(rec.loss_test, options.log_targets);
            if (rec.loss_test < best_loss) {
                best_loss = rec.loss_test;
                result.best_iteration = m;
                if (outcome.params) result.best_params = std::move(outcome.params);
            }
        }
        result.best_so_far.push_back(best_loss);
        result.trials.push_back(std::move(rec));
        if (on_trial) on_trial(result.trials.back());
    }

    result.all_diverged = !result.best_iteration.has_value();
    if (result.trials.size() >= 2) {
        try {
            result.final_model = GpModel::fit(history_inputs(result.trials), history_targets(result.trials), options.gp, rng);
        } catch (const GpFitError&) {
        }
    }
    return result;
}

TrialObjective training_objective(const ProblemSpec& spec, const CollocationSet& sets, const TrainOptions& train_opts,
                                  std::uint64_t init_seed) {
    return [&spec, &sets, train_opts, init_seed](const HyperParams& hp, int) {
        Rng rng(init_seed);
        TrainResult r = train(hp, spec, sets, train_opts, rng);
        TrialOutcome out;
        out.loss_train = r.loss_train;
        out.loss_test = r.loss_test;
        out.metric = r.metric;
        out.diverged = r.diverged;
        out.param_count = r.best_params.size();
        out.seconds = r.wall_seconds;
        out.params = std::move(r.best_params);
        return out;
    };
}

std::string_view to_string(HpDim d) {
    switch (d) {
        case HpDim::learning_rate: return "learning_rate";
        case HpDim::depth: return "depth";
        case HpDim::width: return "width";
        case HpDim::activation: return "activation";
        case HpDim::boundary_weight: return "boundary_weight";
    }
    return "?";
}

std::vector<double> partial_dependence(const GpModel& model, const Eigen::MatrixXd& background, int dim,
                                       std::span<const double> grid) {
    if (dim < 0 || dim >= model.input_dim()) throw std::invalid_argument("partial dependence dimension out of range");
    std::vector<double> out;
    out.reserve(grid.size());
    std::vector<double> row(static_cast<std::size_t>(background.cols()));
    for (const double g : grid) {
        double sum = 0.0;
        for (Eigen::Index i = 0; i < background.rows(); ++i) {
            for (Eigen::Index j = 0; j < background.cols(); ++j) row[static_cast<std::size_t>(j)] = background(i, j);
            row[static_cast<std::size_t>(dim)] = g;
            sum += model.predict(row).mean;
        }
        out.push_back(sum / static_cast<double>(background.rows()));
    }
    return out;
}

std::vector<PdpRow> partial_dependence(const GpModel& model, const SearchSpace& space, HpDim dim, int grid_size,
                                       int n_avg, Rng& rng) {
    if (n_avg < 1) throw std::invalid_argument("n_avg must be >= 1");
    if (dim == HpDim::boundary_weight && !space.boundary_weight)
        throw std::invalid_argument("the search space has no boundary weight");
    const int edim = space.encoded_dim();
    Eigen::MatrixXd background(n_avg, edim);
    for (int i = 0; i < n_avg; ++i) {
        const auto enc = encode(sample_uniform(space, rng), space);
        for (int j = 0; j < edim; ++j) background(i, j) = enc[static_cast<std::size_t>(j)];
    }

    std::vector<PdpRow> rows;
    if (dim == HpDim::activation) {
        const int first = edim - static_cast<int>(kActivationOrder.size());
        std::vector<double> row(static_cast<std::size_t>(edim));
        for (std::size_t a = 0; a < kActivationOrder.size(); ++a) {
            double sum = 0.0;
            for (int i = 0; i < n_avg; ++i) {
                for (int j = 0; j < edim; ++j) row[static_cast<std::size_t>(j)] = background(i, j);
                for (std::size_t k = 0; k < kActivationOrder.size(); ++k)
                    row[static_cast<std::size_t>(first) + k] = k == a ? 1.0 : 0.0;
                sum += model.predict(row).mean;
            }
            rows.push_back({static_cast<double>(a), std::string(to_string(kActivationOrder[a])), sum / n_avg});
        }
        return rows;
    }

    if (grid_size < 2) throw std::invalid_argument("grid_size must be >= 2");
    int enc = 0;
    switch (dim) {
        case HpDim::learning_rate: enc = 0; break;
        case HpDim::depth: enc = 1; break;
        case HpDim::width: enc = 2; break;
        case HpDim::boundary_weight: enc = 3; break;
        case HpDim::activation: break;
    }
    std::vector<double> grid(static_cast<std::size_t>(grid_size));
    for (int i = 0; i < grid_size; ++i) grid[static_cast<std::size_t>(i)] = static_cast<double>(i) / (grid_size - 1);
    const auto means = partial_dependence(model, background, enc, grid);

    for (int i = 0; i < grid_size; ++i) {
        const double u = grid[static_cast<std::size_t>(i)];
        double value = 0.0;
        const auto from_real = [u](const RealRange& r) {
            return r.log_scale ? std::pow(10.0, std::log10(r.lo) + u * (std::log10(r.hi) - std::log10(r.lo)))
                               : r.lo + u * (r.hi - r.lo);
        };
        const auto from_int = [u](const IntRange& r) { return r.lo + u * (r.hi - r.lo); };
        switch (dim) {
            case HpDim::learning_rate: value = from_real(space.learning_rate); break;
            case HpDim::depth: value = from_int(space.depth); break;
            case HpDim::width: value = from_int(space.width); break;
            case HpDim::boundary_weight: value = from_real(*space.boundary_weight); break;
            case HpDim::activation: break;
        }
        rows.push_back({value, "", means[static_cast<std::size_t>(i)]});
    }
    return rows;
}

}  // namespace hpinn
