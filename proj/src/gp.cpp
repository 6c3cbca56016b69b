#include "hpinn/gp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>

#include <Eigen/Cholesky>

namespace hpinn {

namespace {

double scaled_distance(std::span<const double> x, std::span<const double> y, std::span<const double> ls) {
    if (x.size() != y.size() || x.size() != ls.size()) throw std::invalid_argument("kernel input dimensions differ");
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double t = (x[i] - y[i]) / ls[i];
        sum += t * t;
    }
    return std::sqrt(sum);
}

using Objective = std::function<double(const std::vector<double>&)>;

// Nelder-Mead minimiser; returns the best vertex.
std::vector<double> nelder_mead(const Objective& f, std::vector<double> start, double step, int max_evals,
                                double* best_value) {
    const std::size_t n = start.size();
    std::vector<std::vector<double>> simplex(n + 1, start);
    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step;
    int evals = 0;
    for (std::size_t i = 0; i <= n; ++i, ++evals) values[i] = f(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    while (evals < max_evals) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];
        if (std::abs(values[worst] - values[best]) < 1e-9 * (1.0 + std::abs(values[best]))) break;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            const auto& v = simplex[order[k]];
            for (std::size_t i = 0; i < n; ++i) centroid[i] += v[i] / static_cast<double>(n);
        }
        auto along = [&](double t) {
            std::vector<double> p(n);
            for (std::size_t i = 0; i < n; ++i) p[i] = centroid[i] + t * (simplex[worst][i] - centroid[i]);
            return p;
        };

        auto reflected = along(-1.0);
        const double fr = f(reflected);
        ++evals;
        if (fr < values[best]) {
            auto expanded = along(-2.0);
            const double fe = f(expanded);
            ++evals;
            if (fe < fr) {
                simplex[worst] = std::move(expanded);
                values[worst] = fe;
            } else {
                simplex[worst] = std::move(reflected);
                values[worst] = fr;
            }
        } else if (fr < values[second]) {
            simplex[worst] = std::move(reflected);
            values[worst] = fr;
        } else {
            auto contracted = fr < values[worst] ? along(-0.5) : along(0.5);
            const double fc = f(contracted);
            ++evals;
            if (fc < std::min(fr, values[worst])) {
                simplex[worst] = std::move(contracted);
                values[worst] = fc;
            } else {
                for (std::size_t k = 1; k <= n; ++k) {
                    auto& v = simplex[order[k]];
                    for (std::size_t i = 0; i < n; ++i) v[i] = simplex[best][i] + 0.5 * (v[i] - simplex[best][i]);
                    values[order[k]] = f(v);
                    ++evals;
                }
            }
        }
    }
    const auto it = std::min_element(values.begin(), values.end());
    *best_value = *it;
    return simplex[static_cast<std::size_t>(it - values.begin())];
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& X, const GpHyper& h, KernelKind kind) {
    const Eigen::Index m = X.rows();
    const auto dim = static_cast<std::size_t>(X.cols());
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(m), std::vector<double>(dim));
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < X.cols(); ++j) rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = X(i, j);
    Eigen::MatrixXd K(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j <= i; ++j) {
            const auto& a = rows[static_cast<std::size_t>(i)];
            const auto& b = rows[static_cast<std::size_t>(j)];
            const double v = kind == KernelKind::matern52 ? matern52(a, b, h.length_scales, h.signal_var)
                                                          : squared_exponential(a, b, h.length_scales, h.signal_var);
            K(i, j) = v;
            K(j, i) = v;
        }
    return K;
}

struct Factor {
    Eigen::MatrixXd lower;
    double jitter = 0.0;
    bool ok = false;
};

Factor factorize(const Eigen::MatrixXd& K, double noise, const GpOptions& o) {
    const Eigen::Index m = K.rows();
    for (double jitter = o.jitter; jitter <= o.max_jitter * (1.0 + 1e-12); jitter *= 10.0) {
        Eigen::MatrixXd A = K;
        A.diagonal().array() += noise + jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(A);
        if (llt.info() != Eigen::Success) continue;
        Eigen::MatrixXd L = llt.matrixL();
        bool positive = true;
        for (Eigen::Index i = 0; i < m; ++i)
            if (!(L(i, i) > 0.0) || !std::isfinite(L(i, i))) positive = false;
        if (positive) return {std::move(L), jitter, true};
    }
    return {};
}

double lml_from_factor(const Factor& f, const Eigen::VectorXd& y) {
    const Eigen::VectorXd alpha = f.lower.transpose().triangularView<Eigen::Upper>().solve(
        f.lower.triangularView<Eigen::Lower>().solve(y));
    const double logdet = f.lower.diagonal().array().log().sum();
    return -0.5 * y.dot(alpha) - logdet - 0.5 * static_cast<double>(y.size()) * std::log(2.0 * std::numbers::pi);
}

}  // namespace

double matern52(std::span<const double> x, std::span<const double> y, std::span<const double> length_scales,
                double signal_var) {
    const double r = std::sqrt(5.0) * scaled_distance(x, y, length_scales);
    return signal_var * (1.0 + r + r * r / 3.0) * std::exp(-r);
}

double squared_exponential(std::span<const double> x, std::span<const double> y,
                           std::span<const double> length_scales, double signal_var) {
    const double r = scaled_distance(x, y, length_scales);
    return signal_var * std::exp(-0.5 * r * r);
}

double GpModel::log_marginal_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& y_std,
                                        const GpHyper& hyper, const GpOptions& options) {
    const Factor f = factorize(kernel_matrix(X, hyper, options.kernel), hyper.noise_var, options);
    if (!f.ok) return -std::numeric_limits<double>::infinity();
    return lml_from_factor(f, y_std);
}

GpModel GpModel::with_hyper(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const GpHyper& hyper,
                            const GpOptions& options) {
    if (X.rows() != y.size()) throw std::invalid_argument("GP inputs and targets differ in length");
    if (X.rows() < 1) throw std::invalid_argument("GP needs at least one observation");
    if (static_cast<Eigen::Index>(hyper.length_scales.size()) != X.cols())
        throw std::invalid_argument("one length scale per input dimension is required");
    if (!X.allFinite() || !y.allFinite()) throw std::invalid_argument("GP data must be finite");

    GpModel model;
    model.options_ = options;
    model.hyper_ = hyper;
    model.X_ = X;
    model.y_ = y;
    model.y_mean_ = y.mean();
    const double var = (y.array() - model.y_mean_).square().mean();
    model.y_scale_ = var > 1e-24 ? std::sqrt(var) : 1.0;
    const Eigen::VectorXd ys = (y.array() - model.y_mean_) / model.y_scale_;

    const Factor f = factorize(kernel_matrix(X, hyper, options.kernel), hyper.noise_var, options);
    if (!f.ok) throw GpFitError("covariance matrix is not positive definite after jitter escalation");
    model.chol_ = f.lower;
    model.jitter_ = f.jitter;
    model.alpha_ = f.lower.transpose().triangularView<Eigen::Upper>().solve(f.lower.triangularView<Eigen::Lower>().solve(ys));
    model.log_ml_ = lml_from_factor(f, ys);
    return model;
}

GpModel GpModel::fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const GpOptions& options, Rng& rng) {
    if (X.rows() < 2) throw std::invalid_argument("GP fit needs at least two observations");
    if (X.rows() != y.size()) throw std::invalid_argument("GP inputs and targets differ in length");
    if (!X.allFinite() || !y.allFinite()) throw std::invalid_argument("GP data must be finite");

    const auto dim = static_cast<std::size_t>(X.cols());
    const double mean = y.mean();
    const double var = (y.array() - mean).square().mean();
    const double scale = var > 1e-24 ? std::sqrt(var) : 1.0;
    const Eigen::VectorXd ys = (y.array() - mean) / scale;

    struct Bound {
        double lo, hi;
    };
    std::vector<Bound> bounds(dim, Bound{std::log(options.length_lower), std::log(options.length_upper)});
    bounds.push_back({std::log(options.signal_lower), std::log(options.signal_upper)});
    if (options.fit_noise) bounds.push_back({std::log(options.noise_lower), std::log(options.noise_upper)});

    auto unpack = [&](const std::vector<double>& p) {
        GpHyper h;
        h.length_scales.resize(dim);
        for (std::size_t i = 0; i < dim; ++i) h.length_scales[i] = std::exp(std::clamp(p[i], bounds[i].lo, bounds[i].hi));
        h.signal_var = std::exp(std::clamp(p[dim], bounds[dim].lo, bounds[dim].hi));
        h.noise_var = options.fit_noise ? std::exp(std::clamp(p[dim + 1], bounds[dim + 1].lo, bounds[dim + 1].hi))
                                        : options.noise_lower;
        return h;
    };
    const Objective objective = [&](const std::vector<double>& p) {
        // Penalise leaving the box so the simplex is pulled back inside.
        double outside = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (p[i] < bounds[i].lo) outside += bounds[i].lo - p[i];
            if (p[i] > bounds[i].hi) outside += p[i] - bounds[i].hi;
        }
        const double lml = log_marginal_likelihood(X, ys, unpack(p), options);
        if (!std::isfinite(lml)) return 1e300;
        return -lml + 1e3 * outside;
    };

    std::vector<std::vector<double>> starts;
    std::vector<double> first(dim, 0.0);  // unit length scales
    first.push_back(0.0);                 // unit signal variance
    if (options.fit_noise) first.push_back(std::log(1e-2));
    starts.push_back(first);
    for (int r = 0; r < options.restarts; ++r) {
        std::vector<double> p(bounds.size());
        for (std::size_t i = 0; i < bounds.size(); ++i) p[i] = rng.uniform(bounds[i].lo, bounds[i].hi);
        starts.push_back(std::move(p));
    }

    double best_value = std::numeric_limits<double>::infinity();
    std::vector<double> best;
    for (const auto& s : starts) {
        double value = 0.0;
        auto p = nelder_mead(objective, s, 1.0, options.max_evaluations, &value);
        if (value < best_value) {
            best_value = value;
            best = std::move(p);
        }
    }
    if (best.empty() || best_value >= 1e300) throw GpFitError("GP marginal likelihood could not be evaluated");
    return with_hyper(X, y, unpack(best), options);
}

double GpModel::kernel(std::span<const double> a, std::span<const double> b) const {
    return options_.kernel == KernelKind::matern52 ? matern52(a, b, hyper_.length_scales, hyper_.signal_var)
                                                   : squared_exponential(a, b, hyper_.length_scales, hyper_.signal_var);
}

GpPrediction GpModel::predict(std::span<const double> x) const {
    if (static_cast<Eigen::Index>(x.size()) != X_.cols()) throw std::invalid_argument("query dimension mismatch");
    const Eigen::Index m = X_.rows();
    Eigen::VectorXd kstar(m);
    std::vector<double> row(static_cast<std::size_t>(X_.cols()));
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < X_.cols(); ++j) row[static_cast<std::size_t>(j)] = X_(i, j);
        kstar(i) = kernel(x, row);
    }
    const Eigen::VectorXd v = chol_.triangularView<Eigen::Lower>().solve(kstar);
    const double var = std::max(0.0, hyper_.signal_var - v.squaredNorm());
    return {y_mean_ + y_scale_ * kstar.dot(alpha_), y_scale_ * std::sqrt(var)};
}

double GpModel::min_target() const { return y_.minCoeff(); }

double GpModel::prior_stddev() const { return y_scale_ * std::sqrt(hyper_.signal_var); }

nlohmann::json GpModel::to_json() const {
    return {
        {"kernel", options_.kernel == KernelKind::matern52 ? "matern52" : "squared_exponential"},
        {"length_scales", hyper_.length_scales},
        {"signal_var", hyper_.signal_var},
        {"noise_var", hyper_.noise_var},
        {"jitter", jitter_},
        {"log_marginal_likelihood", log_ml_},
        {"target_mean", y_mean_},
        {"target_scale", y_scale_},
        {"points", X_.rows()},
    };
}

}  // namespace hpinn
