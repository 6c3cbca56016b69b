#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "hpinn/rng.hpp"

namespace hpinn {

enum class KernelKind { matern52, squared_exponential };

/// sigma^2 (1 + sqrt5 rho + 5 rho^2 / 3) exp(-sqrt5 rho), rho the distance
/// after dividing each coordinate difference by its length scale.
double matern52(std::span<const double> x, std::span<const double> y, std::span<const double> length_scales,
                double signal_var);

/// sigma^2 exp(-rho^2 / 2).
double squared_exponential(std::span<const double> x, std::span<const double> y,
                           std::span<const double> length_scales, double signal_var);

class GpFitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GpOptions {
    KernelKind kernel = KernelKind::matern52;
    int restarts = 5;
    /// When false the noise variance stays at noise_lower (interpolation).
    bool fit_noise = true;
    double noise_lower = 1e-10;
    double noise_upper = 1.0;
    double length_lower = 1e-2;
    double length_upper = 1e2;
    double signal_lower = 1e-2;
    double signal_upper = 1e3;
    double jitter = 1e-10;
    double max_jitter = 1e-6;
    int max_evaluations = 400;  ///< per local search
};

struct GpHyper {
    std::vector<double> length_scales;
    double signal_var = 1.0;
    double noise_var = 1e-10;
};

struct GpPrediction {
    double mean = 0.0;
    double stddev = 0.0;
};

/// Exact GP regression with a constant (training-mean) prior on standardised
/// targets. Immutable after fit; predict is safe to call concurrently.
class GpModel {
public:
    /// Fits kernel hyper-parameters by multi-start Nelder-Mead on the log
    /// marginal likelihood in log space. Needs at least two rows.
    static GpModel fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const GpOptions& options, Rng& rng);

    /// Builds the posterior for fixed hyper-parameters (no optimisation).
    static GpModel with_hyper(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const GpHyper& hyper,
                              const GpOptions& options);

    GpPrediction predict(std::span<const double> x) const;

    /// Log marginal likelihood of the standardised targets under `hyper`.
    /// Returns -inf when the covariance cannot be factorised.
    static double log_marginal_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& y_std,
                                          const GpHyper& hyper, const GpOptions& options);

    const GpHyper& hyper() const { return hyper_; }
    double log_likelihood() const { return log_ml_; }
    double jitter_used() const { return jitter_; }
    int input_dim() const { return static_cast<int>(X_.cols()); }
    std::size_t size() const { return static_cast<std::size_t>(X_.rows()); }
    double target_mean() const { return y_mean_; }
    double target_scale() const { return y_scale_; }
    double min_target() const;
    /// Prior standard deviation of the latent function, in target units.
    double prior_stddev() const;
    const Eigen::MatrixXd& inputs() const { return X_; }
    const Eigen::VectorXd& targets() const { return y_; }

    nlohmann::json to_json() const;

private:
    double kernel(std::span<const double> a, std::span<const double> b) const;

    GpOptions options_;
    GpHyper hyper_;
    Eigen::MatrixXd X_;
    Eigen::VectorXd y_;
    double y_mean_ = 0.0;
    double y_scale_ = 1.0;
    Eigen::MatrixXd chol_;   // lower factor of K + (noise + jitter) I
    Eigen::VectorXd alpha_;  // (K + noise I)^-1 y_std
    double jitter_ = 0.0;
    double log_ml_ = 0.0;
};

}  // namespace hpinn
