#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hpinn/hpo.hpp"
#include "hpinn/hyperparams.hpp"
#include "hpinn/problem.hpp"
#include "hpinn/sampling.hpp"

namespace hpinn {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Everything a train, hpo or sweep run needs. Case-dependent fields stay
/// empty until resolve() materialises the defaults.
struct RunConfig {
    std::optional<CaseKind> case_kind;
    int omega = 1;
    std::vector<int> omegas;  ///< sweep only
    std::vector<int> levels;  ///< sweep only
    SamplingPlan sampling;
    std::optional<HyperParams> hyperparams;  ///< lambda for train, lambda_0 for hpo
    std::optional<SearchSpace> space;
    int epochs = 50'000;
    int log_every = 100;
    double epsilon = 1e-7;
    int iterations = 100;
    int n_random = 10;
    int n_candidates = 10'000;
    double xi = 0.01;
    bool log_targets = true;
    int gp_restarts = 5;
    int pdp_grid = 20;
    int pdp_samples = 250;
    int grid_points = 51;
    std::uint64_t seed = 11;
    std::string output = "run";
    HardConstraint hard = HardConstraint::vanishing;
    NeumannSource neumann_source = NeumannSource::consistent;

    /// Fills case-dependent defaults and validates every field. Throws ConfigError.
    void resolve();

    /// Canonical document; after resolve() every field is present.
    nlohmann::json to_json() const;
    /// Strict parse: unknown keys and wrong types raise ConfigError. Keys
    /// absent from `doc` keep the values already in *this.
    void merge_json(const nlohmann::json& doc);
    static RunConfig from_json(const nlohmann::json& doc);
    static RunConfig load(const std::string& path);

    ProblemSpec problem() const;
    HpoOptions hpo_options() const;
    TrainOptions train_options() const;
};

/// Default lambda_0 per case: Dirichlet [1e-3, 4, 50, sin], Neumann [1e-3, 3, 275, sin, 400].
HyperParams default_hyperparams(CaseKind kind);

/// Seed of sweep cell (omega, level): seed + FNV-1a("omega=<omega>;level=<level>").
std::uint64_t cell_seed(std::uint64_t seed, int omega, int level);

/// Independent stream seed for one use of the run seed ("collocation", "init", "hpo").
std::uint64_t derive_seed(std::uint64_t seed, std::string_view purpose);

}  // namespace hpinn
