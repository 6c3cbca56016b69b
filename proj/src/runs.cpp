#include "hpinn/runs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include "hpinn/csv.hpp"
#include "hpinn/loss.hpp"
#include "hpinn/optimizer.hpp"

namespace hpinn {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_json(const fs::path& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << doc.dump(2) << '\n';
}

json hyperparams_json(const HyperParams& hp) {
    json j = {{"learning_rate", hp.learning_rate},
              {"depth", hp.depth},
              {"width", hp.width},
              {"activation", std::string(to_string(hp.activation))}};
    j["boundary_weight"] = hp.boundary_weight ? json(*hp.boundary_weight) : json(nullptr);
    j["display"] = hp.to_string();
    return j;
}

std::vector<Point> regular_grid(int dim, int n) {
    std::vector<Point> pts;
    const auto step = 1.0 / static_cast<double>(n - 1);
    const int nz = dim == 3 ? n : 1;
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                Point p;
                p.dim = dim;
                p[0] = i * step;
                p[1] = j * step;
                if (dim == 3) p[2] = k * step;
                pts.push_back(p);
            }
    return pts;
}

CollocationSet make_sets(const RunConfig& cfg, const ProblemSpec& spec) {
    Rng rng(derive_seed(cfg.seed, "collocation"));
    return build_collocation(spec, cfg.sampling, rng);
}

void write_sets(const fs::path& dir, const CollocationSet& sets) {
    write_points_csv((dir / "domain_train.csv").string(), sets.domain_train);
    write_points_csv((dir / "domain_test.csv").string(), sets.domain_test);
    write_points_csv((dir / "boundary_train.csv").string(), sets.boundary_train);
    write_points_csv((dir / "boundary_test.csv").string(), sets.boundary_test);
}

template <class Body>
int guarded(std::ostream& log, Body&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericalFault& e) {
        log << "numerical fault: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const GpFitError& e) {
        log << "numerical fault: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::out_of_range& e) {
        log << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        log << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}

void write_trials(const fs::path& path, const HpoResult& result, const SearchSpace& space) {
    std::vector<std::string> header = {"iteration", "learning_rate", "depth", "width", "activation", "boundary_weight",
                                       "loss_train", "loss_test", "metric", "param_count", "diverged", "random",
                                       "gp_target", "seconds"};
    for (int j = 0; j < space.encoded_dim(); ++j) header.push_back("enc_" + std::to_string(j));
    CsvWriter csv(path.string(), header);
    for (const auto& t : result.trials) {
        csv.cell(t.iteration).cell(t.hp.learning_rate).cell(t.hp.depth).cell(t.hp.width).cell(to_string(t.hp.activation));
        if (t.hp.boundary_weight) csv.cell(*t.hp.boundary_weight);
        else csv.cell(std::string_view{});
        csv.cell(t.loss_train).cell(t.loss_test).cell(t.metric).cell(t.param_count);
        csv.cell(t.diverged ? 1 : 0).cell(t.random ? 1 : 0).cell(t.gp_target).cell(t.seconds);
        for (const double e : t.encoded) csv.cell(e);
        csv.end_row();
    }
}

}  // namespace

int cmd_train(RunConfig config, std::ostream& log) {
    return guarded(log, [&] {
        config.resolve();
        const fs::path dir(config.output);
        fs::create_directories(dir);
        write_json(dir / "config.json", config.to_json());

        const ProblemSpec spec = config.problem();
        const CollocationSet sets = make_sets(config, spec);
        write_sets(dir, sets);
        const HyperParams hp = *config.hyperparams;
        Rng init(derive_seed(config.seed, "init"));
        log << "training " << to_string(*config.case_kind) << " omega=" << config.omega << " lambda=" << hp.to_string()
            << " K=" << config.epochs << '\n';
        const TrainResult result = train(hp, spec, sets, config.train_options(), init);

        {
            CsvWriter csv((dir / "epochs.csv").string(),
                          {"epoch", "loss_train", "loss_test", "pde_train", "bc_train", "data_train", "pde_test", "bc_test",
                           "data_test", "metric", "elapsed_seconds"});
            for (const auto& e : result.curve) {
                csv.cell(e.epoch).cell(e.train.total).cell(e.test.total).cell(e.train.pde).cell(e.train.bc).cell(e.train.data);
                csv.cell(e.test.pde).cell(e.test.bc).cell(e.test.data).cell(e.metric).cell(e.elapsed_seconds);
                csv.end_row();
            }
        }

        const auto grid = regular_grid(spec.dim, config.grid_points);
        const auto values = solution_values(result.best_params, spec, grid);
        {
            std::vector<std::string> header = {"x", "y"};
            if (spec.dim == 3) header.push_back("z");
            for (const char* h : {"u_theta", "u_exact", "abs_error"}) header.emplace_back(h);
            CsvWriter csv((dir / "solution_grid.csv").string(), header);
            for (std::size_t i = 0; i < grid.size(); ++i) {
                for (int k = 0; k < spec.dim; ++k) csv.cell(grid[i][k]);
                const double exact = spec.exact(grid[i]);
                csv.cell(values[i]).cell(exact).cell(std::abs(values[i] - exact));
                csv.end_row();
            }
        }
        save_params(result.best_params, (dir / "params.bin").string());

        json summary = {{"best_epoch", result.best_epoch},
                        {"loss_train", result.loss_train},
                        {"loss_test", result.loss_test},
                        {"metric", result.metric},
                        {"diverged", result.diverged},
                        {"param_count", result.best_params.size()},
                        {"hyperparams", hyperparams_json(hp)},
                        {"wall_seconds", result.wall_seconds}};
        write_json(dir / "summary.json", summary);
        log << "best epoch " << result.best_epoch << ": loss_train=" << format_double(result.loss_train)
            << " loss_test=" << format_double(result.loss_test) << " metric=" << format_double(result.metric)
            << (result.diverged ? " (diverged)" : "") << '\n';
        return static_cast<int>(kExitOk);
    });
}

HpoResult run_campaign(const RunConfig& config, const fs::path& dir, std::ostream& log) {
    fs::create_directories(dir);
    write_json(dir / "config.json", config.to_json());

    const ProblemSpec spec = config.problem();
    const CollocationSet sets = make_sets(config, spec);
    const HpoOptions options = config.hpo_options();
    const TrialObjective objective = training_objective(spec, sets, config.train_options(), derive_seed(config.seed, "init"));

    HpoResult result = run_hpo(options, objective, [&log](const TrialRecord& t) {
        log << "  m=" << t.iteration << (t.random ? " random " : " gp     ") << t.hp.to_string()
            << " loss_test=" << format_double(t.loss_test) << (t.diverged ? " diverged" : "") << '\n';
    });

    write_trials(dir / "trials.csv", result, options.space);

    {
        std::vector<double> train, test;
        for (const auto& t : result.trials) {
            train.push_back(t.loss_train);
            test.push_back(t.loss_test);
        }
        std::sort(train.begin(), train.end());
        std::sort(test.begin(), test.end());
        CsvWriter csv((dir / "losses_sorted.csv").string(), {"rank", "loss_train", "loss_test"});
        for (std::size_t i = 0; i < train.size(); ++i) {
            csv.cell(i).cell(train[i]).cell(test[i]);
            csv.end_row();
        }
    }
    {
        CsvWriter csv((dir / "best_so_far.csv").string(),
                      {"iteration", "best_iteration", "best_loss_test", "best_loss_train", "best_metric"});
        std::optional<std::size_t> best;
        for (std::size_t m = 0; m < result.trials.size(); ++m) {
            const auto& t = result.trials[m];
            if (!t.diverged && (!best || t.loss_test < result.trials[*best].loss_test)) best = m;
            csv.cell(m);
            if (best) {
                const auto& b = result.trials[*best];
                csv.cell(*best).cell(b.loss_test).cell(b.loss_train).cell(b.metric);
            } else {
                csv.cell(-1).cell(result.best_so_far[m]).cell(std::string_view{}).cell(std::string_view{});
            }
            csv.end_row();
        }
    }

    json best_doc;
    if (result.best_iteration) {
        const auto& b = result.best();
        best_doc = {{"iteration", b.iteration},
                    {"hyperparams", hyperparams_json(b.hp)},
                    {"loss_train", b.loss_train},
                    {"loss_test", b.loss_test},
                    {"metric", b.metric},
                    {"param_count", b.param_count},
                    {"all_diverged", false}};
        if (result.best_params) save_params(*result.best_params, (dir / "best_params.bin").string());
    } else {
        best_doc = {{"all_diverged", true}};
    }
    write_json(dir / "best.json", best_doc);
    write_json(dir / "gp_log.json", json(result.gp_log));

    if (result.final_model) {
        Rng pdp_rng(derive_seed(config.seed, "pdp"));
        std::vector<HpDim> dims = {HpDim::learning_rate, HpDim::depth, HpDim::width, HpDim::activation};
        if (options.space.boundary_weight) dims.push_back(HpDim::boundary_weight);
        for (const HpDim d : dims) {
            const auto rows = partial_dependence(*result.final_model, options.space, d, config.pdp_grid,
                                                 config.pdp_samples, pdp_rng);
            CsvWriter csv((dir / ("pdp_" + std::string(to_string(d)) + ".csv")).string(), {"value", "label", "mean"});
            for (const auto& r : rows) {
                csv.cell(r.value).cell(r.label).cell(r.mean);
                csv.end_row();
            }
        }
    }
    return result;
}

int cmd_hpo(RunConfig config, std::ostream& log) {
    return guarded(log, [&] {
        config.resolve();
        log << "hpo " << to_string(*config.case_kind) << " omega=" << config.omega << " M=" << config.iterations
            << " K=" << config.epochs << '\n';
        const HpoResult result = run_campaign(config, fs::path(config.output), log);
        if (result.all_diverged) log << "every trial diverged\n";
        else log << "best m=" << result.best().iteration << ' ' << result.best().hp.to_string()
                 << " loss_test=" << format_double(result.best().loss_test) << '\n';
        return static_cast<int>(kExitOk);
    });
}

int cmd_sweep(RunConfig config, std::ostream& log) {
    return guarded(log, [&] {
        config.resolve();
        if (config.omegas.empty()) config.omegas = {config.omega};
        if (config.levels.empty()) throw ConfigError("sweep needs at least one level");
        const fs::path root(config.output);
        fs::create_directories(root);
        write_json(root / "config.json", config.to_json());

        CsvWriter csv((root / "summary.csv").string(),
                      {"omega", "level", "n", "train_points", "r", "best_iteration", "best_loss_test", "best_loss_train",
                       "best_metric", "learning_rate", "depth", "width", "activation", "boundary_weight", "param_count"});
        for (const int omega : config.omegas)
            for (const int level : config.levels) {
                RunConfig cell = config;
                cell.omegas.clear();
                cell.levels.clear();
                cell.omega = omega;
                cell.sampling.level = level;
                cell.seed = cell_seed(config.seed, omega, level);
                cell.output = (root / ("omega" + std::to_string(omega) + "_level" + std::to_string(level))).string();
                cell.resolve();
                log << "cell omega=" << omega << " level=" << level << '\n';
                const HpoResult result = run_campaign(cell, fs::path(cell.output), log);

                const LevelSize size = level_size(level);
                csv.cell(omega).cell(level).cell(size.n).cell(size.count).cell(precision_of(size.n, omega));
                if (result.best_iteration) {
                    const auto& b = result.best();
                    csv.cell(b.iteration).cell(b.loss_test).cell(b.loss_train).cell(b.metric);
                    csv.cell(b.hp.learning_rate).cell(b.hp.depth).cell(b.hp.width).cell(to_string(b.hp.activation));
                    if (b.hp.boundary_weight) csv.cell(*b.hp.boundary_weight);
                    else csv.cell(std::string_view{});
                    csv.cell(b.param_count);
                } else {
                    csv.cell(-1);
                    for (int k = 0; k < 9; ++k) csv.cell(std::string_view{});
                }
                csv.end_row();
            }
        return static_cast<int>(kExitOk);
    });
}

}  // namespace hpinn
