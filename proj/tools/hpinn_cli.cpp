// Command-line front end: hpinn {train,hpo,sweep} [--config FILE] [overrides...]

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hpinn/config.hpp"
#include "hpinn/runs.hpp"

namespace {

using nlohmann::json;

struct Flags {
    std::string config_path;
    std::string case_name, boundary_count, activation, hard, neumann_source, out;
    int omega = 0, level = 0, depth = 0, width = 0, epochs = 0, log_every = 0, iterations = 0, n_random = 0,
        candidates = 0, gp_restarts = 0, pdp_grid = 0, pdp_samples = 0, grid_points = 0;
    double r_train = 0, r_test = 0, lr = 0, boundary_weight = 0, epsilon = 0, xi = 0;
    bool log_targets = true;
    std::uint64_t seed = 0;
    std::vector<int> omegas, levels;
    std::vector<double> lr_range, depth_range, width_range, bw_range;
};

void add_flags(CLI::App& cmd, Flags& f) {
    cmd.add_option("--config", f.config_path, "JSON config file; flags override it")->check(CLI::ExistingFile);
    cmd.add_option("--case", f.case_name, "dirichlet2d | neumann3d");
    cmd.add_option("--omega", f.omega, "frequency omega (kappa = 2 pi omega)");
    cmd.add_option("--r-train", f.r_train, "training points per wavelength");
    cmd.add_option("--r-test", f.r_test, "test points per wavelength");
    cmd.add_option("--level", f.level, "fixed training-set level 1, 3 or 5");
    cmd.add_option("--boundary-count", f.boundary_count, "formula | paper16");
    cmd.add_option("--lr", f.lr, "learning rate");
    cmd.add_option("--depth", f.depth, "hidden layers");
    cmd.add_option("--width", f.width, "neurons per hidden layer");
    cmd.add_option("--activation", f.activation, "sin | sigmoid | tanh");
    cmd.add_option("--boundary-weight", f.boundary_weight, "boundary loss weight");
    cmd.add_option("--epochs", f.epochs, "training epochs K");
    cmd.add_option("--log-every", f.log_every, "epochs between logged evaluations");
    cmd.add_option("--epsilon", f.epsilon, "ADAM epsilon");
    cmd.add_option("--iterations", f.iterations, "HPO trials M");
    cmd.add_option("--n-random", f.n_random, "random trials before the surrogate takes over");
    cmd.add_option("--candidates", f.candidates, "acquisition candidates per step");
    cmd.add_option("--xi", f.xi, "expected-improvement offset");
    cmd.add_option("--log-targets", f.log_targets, "fit the surrogate on log10 losses (true|false)");
    cmd.add_option("--gp-restarts", f.gp_restarts, "random restarts of the surrogate fit");
    cmd.add_option("--pdp-grid", f.pdp_grid, "partial-dependence grid size");
    cmd.add_option("--pdp-samples", f.pdp_samples, "partial-dependence background samples");
    cmd.add_option("--grid-points", f.grid_points, "solution grid points per axis");
    cmd.add_option("--seed", f.seed, "master seed");
    cmd.add_option("--out", f.out, "output directory");
    cmd.add_option("--hard", f.hard, "none | vanishing | paper");
    cmd.add_option("--neumann-source", f.neumann_source, "consistent | paper");
    cmd.add_option("--omegas", f.omegas, "sweep frequencies")->delimiter(',');
    cmd.add_option("--levels", f.levels, "sweep levels")->delimiter(',');
    cmd.add_option("--space-lr", f.lr_range, "learning-rate range lo,hi")->delimiter(',')->expected(2);
    cmd.add_option("--space-depth", f.depth_range, "depth range lo,hi")->delimiter(',')->expected(2);
    cmd.add_option("--space-width", f.width_range, "width range lo,hi")->delimiter(',')->expected(2);
    cmd.add_option("--space-boundary-weight", f.bw_range, "boundary-weight range lo,hi")->delimiter(',')->expected(2);
}

json overrides(const CLI::App& cmd, const Flags& f) {
    json doc = json::object();
    const auto given = [&cmd](const char* name) { return cmd.count(name) > 0; };
    if (given("--case")) doc["case"] = f.case_name;
    if (given("--omega")) doc["omega"] = f.omega;
    if (given("--omegas")) doc["omegas"] = f.omegas;
    if (given("--levels")) doc["levels"] = f.levels;

    json sampling = json::object();
    if (given("--r-train")) sampling["r_train"] = f.r_train;
    if (given("--r-test")) sampling["r_test"] = f.r_test;
    if (given("--level")) sampling["level"] = f.level;
    if (given("--boundary-count")) sampling["boundary_count"] = f.boundary_count;
    if (!sampling.empty()) doc["sampling"] = sampling;

    json hp = json::object();
    if (given("--lr")) hp["learning_rate"] = f.lr;
    if (given("--depth")) hp["depth"] = f.depth;
    if (given("--width")) hp["width"] = f.width;
    if (given("--activation")) hp["activation"] = f.activation;
    if (given("--boundary-weight")) hp["boundary_weight"] = f.boundary_weight;
    if (!hp.empty()) doc["hyperparams"] = hp;

    json space = json::object();
    if (given("--space-lr")) space["learning_rate"] = f.lr_range;
    if (given("--space-depth")) space["depth"] = f.depth_range;
    if (given("--space-width")) space["width"] = f.width_range;
    if (given("--space-boundary-weight")) space["boundary_weight"] = f.bw_range;
    if (!space.empty()) doc["space"] = space;

    if (given("--epochs")) doc["epochs"] = f.epochs;
    if (given("--log-every")) doc["log_every"] = f.log_every;
    if (given("--epsilon")) doc["epsilon"] = f.epsilon;
    if (given("--iterations")) doc["iterations"] = f.iterations;
    if (given("--n-random")) doc["n_random"] = f.n_random;
    if (given("--candidates")) doc["n_candidates"] = f.candidates;
    if (given("--xi")) doc["xi"] = f.xi;
    if (given("--log-targets")) doc["log_targets"] = f.log_targets;
    if (given("--gp-restarts")) doc["gp_restarts"] = f.gp_restarts;
    if (given("--pdp-grid")) doc["pdp_grid"] = f.pdp_grid;
    if (given("--pdp-samples")) doc["pdp_samples"] = f.pdp_samples;
    if (given("--grid-points")) doc["grid_points"] = f.grid_points;
    if (given("--seed")) doc["seed"] = f.seed;
    if (given("--out")) doc["output"] = f.out;
    if (given("--hard")) doc["hard_constraint"] = f.hard;
    if (given("--neumann-source")) doc["neumann_source"] = f.neumann_source;
    return doc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hyper-parameter optimisation for physics-informed Helmholtz solvers"};
    app.require_subcommand(1);
    Flags flags;
    CLI::App* train = app.add_subcommand("train", "train one network");
    CLI::App* hpo = app.add_subcommand("hpo", "run one Bayesian optimisation campaign");
    CLI::App* sweep = app.add_subcommand("sweep", "run one campaign per (omega, level) cell");
    for (CLI::App* cmd : {train, hpo, sweep}) add_flags(*cmd, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : hpinn::kExitConfig;
    }

    CLI::App* cmd = train->parsed() ? train : hpo->parsed() ? hpo : sweep;
    hpinn::RunConfig config;
    try {
        if (!flags.config_path.empty()) config = hpinn::RunConfig::load(flags.config_path);
        config.merge_json(overrides(*cmd, flags));
    } catch (const hpinn::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return hpinn::kExitConfig;
    }

    if (cmd == train) return hpinn::cmd_train(config, std::cerr);
    if (cmd == hpo) return hpinn::cmd_hpo(config, std::cerr);
    return hpinn::cmd_sweep(config, std::cerr);
}
