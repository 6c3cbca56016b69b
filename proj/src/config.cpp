#include "hpinn/config.hpp"

#include <fstream>
#include <set>

namespace hpinn {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

template <class T>
T get_as(const json& v, const std::string& key) {
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        throw ConfigError("key '" + key + "' has the wrong type");
    }
}

json real_range_json(const RealRange& r) { return json::array({r.lo, r.hi}); }
json int_range_json(const IntRange& r) { return json::array({r.lo, r.hi}); }

std::pair<double, double> parse_pair(const json& v, const std::string& key) {
    if (!v.is_array() || v.size() != 2) throw ConfigError("key '" + key + "' must be a [lo, hi] pair");
    return {get_as<double>(v[0], key), get_as<double>(v[1], key)};
}

json hyperparams_json(const HyperParams& hp) {
    json j = {{"learning_rate", hp.learning_rate},
              {"depth", hp.depth},
              {"width", hp.width},
              {"activation", std::string(to_string(hp.activation))}};
    j["boundary_weight"] = hp.boundary_weight ? json(*hp.boundary_weight) : json(nullptr);
    return j;
}

}  // namespace

HyperParams default_hyperparams(CaseKind kind) {
    if (kind == CaseKind::dirichlet2d) return HyperParams{1e-3, 4, 50, Activation::sin, std::nullopt};
    return HyperParams{1e-3, 3, 275, Activation::sin, 400.0};
}

std::uint64_t cell_seed(std::uint64_t seed, int omega, int level) {
    return seed + fnv1a("omega=" + std::to_string(omega) + ";level=" + std::to_string(level));
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view purpose) {
    return seed + fnv1a(purpose);
}

void RunConfig::resolve() {
    if (!case_kind) throw ConfigError("missing required field 'case'");
    if (omega < 1) throw ConfigError("omega must be >= 1");
    for (const int w : omegas)
        if (w < 1) throw ConfigError("every sweep omega must be >= 1");
    for (const int l : levels)
        if (l != 1 && l != 3 && l != 5) throw ConfigError("sweep levels must be drawn from {1, 3, 5}");
    if (sampling.level && *sampling.level != 1 && *sampling.level != 3 && *sampling.level != 5)
        throw ConfigError("sampling.level must be 1, 3 or 5");
    if (!(sampling.r_train > 0.0) || !(sampling.r_test > 0.0)) throw ConfigError("precisions must be positive");
    if (sampling.boundary_mode == BoundaryCountMode::paper16 && *case_kind != CaseKind::neumann3d)
        throw ConfigError("boundary_count 'paper16' applies to the 3D Neumann case only");
    if (*case_kind == CaseKind::neumann3d && hard != HardConstraint::none) {
        // Hard constraints are Dirichlet-only; the Neumann case always uses none.
        hard = HardConstraint::none;
    }

    if (!space) space = SearchSpace::for_case(*case_kind);
    try {
        space->validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (!hyperparams) hyperparams = default_hyperparams(*case_kind);
    if (*case_kind == CaseKind::dirichlet2d && hyperparams->boundary_weight && hard != HardConstraint::none)
        throw ConfigError("boundary_weight has no effect with a hard Dirichlet constraint");
    if (hyperparams->learning_rate <= 0.0 || hyperparams->depth < 1 || hyperparams->width < 1)
        throw ConfigError("hyper-parameters must be positive");
    if (hyperparams->boundary_weight && !(*hyperparams->boundary_weight > 0.0))
        throw ConfigError("boundary_weight must be positive");

    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (log_every < 1) throw ConfigError("log_every must be >= 1");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (iterations < 1) throw ConfigError("iterations must be >= 1");
    if (n_random < 1) throw ConfigError("n_random must be >= 1");
    if (n_candidates < 1) throw ConfigError("n_candidates must be >= 1");
    if (!(xi >= 0.0)) throw ConfigError("xi must be >= 0");
    if (gp_restarts < 0) throw ConfigError("gp_restarts must be >= 0");
    if (pdp_grid < 2) throw ConfigError("pdp_grid must be >= 2");
    if (pdp_samples < 1) throw ConfigError("pdp_samples must be >= 1");
    if (grid_points < 2) throw ConfigError("grid_points must be >= 2");
    if (output.empty()) throw ConfigError("output directory must not be empty");
}

json RunConfig::to_json() const {
    json j;
    j["case"] = case_kind ? json(std::string(to_string(*case_kind))) : json(nullptr);
    j["omega"] = omega;
    j["omegas"] = omegas;
    j["levels"] = levels;
    j["sampling"] = {{"r_train", sampling.r_train},
                     {"r_test", sampling.r_test},
                     {"level", sampling.level ? json(*sampling.level) : json(nullptr)},
                     {"boundary_count", std::string(to_string(sampling.boundary_mode))}};
    j["hyperparams"] = hyperparams ? hyperparams_json(*hyperparams) : json(nullptr);
    if (space) {
        j["space"] = {{"learning_rate", real_range_json(space->learning_rate)},
                      {"depth", int_range_json(space->depth)},
                      {"width", int_range_json(space->width)},
                      {"boundary_weight", space->boundary_weight ? real_range_json(*space->boundary_weight) : json(nullptr)}};
    } else {
        j["space"] = nullptr;
    }
    j["epochs"] = epochs;
    j["log_every"] = log_every;
    j["epsilon"] = epsilon;
    j["iterations"] = iterations;
    j["n_random"] = n_random;
    j["n_candidates"] = n_candidates;
    j["xi"] = xi;
    j["log_targets"] = log_targets;
    j["gp_restarts"] = gp_restarts;
    j["pdp_grid"] = pdp_grid;
    j["pdp_samples"] = pdp_samples;
    j["grid_points"] = grid_points;
    j["seed"] = seed;
    j["output"] = output;
    j["hard_constraint"] = std::string(to_string(hard));
    j["neumann_source"] = std::string(to_string(neumann_source));
    return j;
}

void RunConfig::merge_json(const json& doc) {
    reject_unknown(doc,
                   {"case", "omega", "omegas", "levels", "sampling", "hyperparams", "space", "epochs", "log_every",
                    "epsilon", "iterations", "n_random", "n_candidates", "xi", "log_targets", "gp_restarts", "pdp_grid",
                    "pdp_samples", "grid_points", "seed", "output", "hard_constraint", "neumann_source"},
                   "config");
    try {
        if (doc.contains("case") && !doc["case"].is_null()) case_kind = parse_case(get_as<std::string>(doc["case"], "case"));
        if (doc.contains("omega")) omega = get_as<int>(doc["omega"], "omega");
        if (doc.contains("omegas")) omegas = get_as<std::vector<int>>(doc["omegas"], "omegas");
        if (doc.contains("levels")) levels = get_as<std::vector<int>>(doc["levels"], "levels");
        if (doc.contains("sampling")) {
            const json& s = doc["sampling"];
            reject_unknown(s, {"r_train", "r_test", "level", "boundary_count"}, "sampling");
            if (s.contains("r_train")) sampling.r_train = get_as<double>(s["r_train"], "sampling.r_train");
            if (s.contains("r_test")) sampling.r_test = get_as<double>(s["r_test"], "sampling.r_test");
            if (s.contains("level"))
                sampling.level = s["level"].is_null() ? std::nullopt : std::optional<int>(get_as<int>(s["level"], "sampling.level"));
            if (s.contains("boundary_count"))
                sampling.boundary_mode = parse_boundary_count_mode(get_as<std::string>(s["boundary_count"], "sampling.boundary_count"));
        }
        if (doc.contains("hyperparams") && !doc["hyperparams"].is_null()) {
            const json& h = doc["hyperparams"];
            reject_unknown(h, {"learning_rate", "depth", "width", "activation", "boundary_weight"}, "hyperparams");
            HyperParams hp = hyperparams.value_or(case_kind ? default_hyperparams(*case_kind) : HyperParams{});
            if (h.contains("learning_rate")) hp.learning_rate = get_as<double>(h["learning_rate"], "hyperparams.learning_rate");
            if (h.contains("depth")) hp.depth = get_as<int>(h["depth"], "hyperparams.depth");
            if (h.contains("width")) hp.width = get_as<int>(h["width"], "hyperparams.width");
            if (h.contains("activation")) hp.activation = parse_activation(get_as<std::string>(h["activation"], "hyperparams.activation"));
            if (h.contains("boundary_weight"))
                hp.boundary_weight = h["boundary_weight"].is_null()
                                         ? std::nullopt
                                         : std::optional<double>(get_as<double>(h["boundary_weight"], "hyperparams.boundary_weight"));
            hyperparams = hp;
        }
        if (doc.contains("space") && !doc["space"].is_null()) {
            const json& s = doc["space"];
            reject_unknown(s, {"learning_rate", "depth", "width", "boundary_weight"}, "space");
            SearchSpace sp = space.value_or(case_kind ? SearchSpace::for_case(*case_kind) : SearchSpace::dirichlet());
            if (s.contains("learning_rate")) {
                const auto [lo, hi] = parse_pair(s["learning_rate"], "space.learning_rate");
                sp.learning_rate = {lo, hi, true};
            }
            if (s.contains("depth")) {
                const auto [lo, hi] = parse_pair(s["depth"], "space.depth");
                sp.depth = {static_cast<int>(lo), static_cast<int>(hi)};
            }
            if (s.contains("width")) {
                const auto [lo, hi] = parse_pair(s["width"], "space.width");
                sp.width = {static_cast<int>(lo), static_cast<int>(hi)};
            }
            if (s.contains("boundary_weight")) {
                if (s["boundary_weight"].is_null()) {
                    sp.boundary_weight.reset();
                } else {
                    const auto [lo, hi] = parse_pair(s["boundary_weight"], "space.boundary_weight");
                    sp.boundary_weight = RealRange{lo, hi, true};
                }
            }
            space = sp;
        }
        if (doc.contains("epochs")) epochs = get_as<int>(doc["epochs"], "epochs");
        if (doc.contains("log_every")) log_every = get_as<int>(doc["log_every"], "log_every");
        if (doc.contains("epsilon")) epsilon = get_as<double>(doc["epsilon"], "epsilon");
        if (doc.contains("iterations")) iterations = get_as<int>(doc["iterations"], "iterations");
        if (doc.contains("n_random")) n_random = get_as<int>(doc["n_random"], "n_random");
        if (doc.contains("n_candidates")) n_candidates = get_as<int>(doc["n_candidates"], "n_candidates");
        if (doc.contains("xi")) xi = get_as<double>(doc["xi"], "xi");
        if (doc.contains("log_targets")) log_targets = get_as<bool>(doc["log_targets"], "log_targets");
        if (doc.contains("gp_restarts")) gp_restarts = get_as<int>(doc["gp_restarts"], "gp_restarts");
        if (doc.contains("pdp_grid")) pdp_grid = get_as<int>(doc["pdp_grid"], "pdp_grid");
        if (doc.contains("pdp_samples")) pdp_samples = get_as<int>(doc["pdp_samples"], "pdp_samples");
        if (doc.contains("grid_points")) grid_points = get_as<int>(doc["grid_points"], "grid_points");
        if (doc.contains("seed")) seed = get_as<std::uint64_t>(doc["seed"], "seed");
        if (doc.contains("output")) output = get_as<std::string>(doc["output"], "output");
        if (doc.contains("hard_constraint")) hard = parse_hard_constraint(get_as<std::string>(doc["hard_constraint"], "hard_constraint"));
        if (doc.contains("neumann_source"))
            neumann_source = parse_neumann_source(get_as<std::string>(doc["neumann_source"], "neumann_source"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

RunConfig RunConfig::from_json(const json& doc) {
    RunConfig cfg;
    cfg.merge_json(doc);
    return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    try {
        return from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON in ") + path + ": " + e.what());
    }
}

ProblemSpec RunConfig::problem() const {
    if (!case_kind) throw ConfigError("missing required field 'case'");
    ManufacturedOptions opts;
    opts.hard = *case_kind == CaseKind::dirichlet2d ? hard : HardConstraint::none;
    opts.neumann_source = neumann_source;
    return manufactured(*case_kind, omega, opts);
}

TrainOptions RunConfig::train_options() const { return TrainOptions{epochs, log_every, epsilon}; }

HpoOptions RunConfig::hpo_options() const {
    HpoOptions o;
    o.space = space.value_or(SearchSpace::for_case(case_kind.value_or(CaseKind::dirichlet2d)));
    o.initial = hyperparams.value_or(default_hyperparams(case_kind.value_or(CaseKind::dirichlet2d)));
    o.iterations = iterations;
    o.n_random = n_random;
    o.n_candidates = n_candidates;
    o.xi = xi;
    o.log_targets = log_targets;
    o.gp.restarts = gp_restarts;
    o.seed = derive_seed(seed, "hpo");
    return o;
}

}  // namespace hpinn
