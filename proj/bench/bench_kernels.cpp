// Batched (Eigen/OpenMP) kernel against the serial reference on a PDE-style
// loss: second-order jets, Laplacian residual squared.

#include <benchmark/benchmark.h>

#include "hpinn/config.hpp"
#include "hpinn/loss.hpp"
#include "hpinn/sampling.hpp"

using namespace hpinn;

namespace {

struct Setup {
    MlpParams params;
    std::vector<Point> points;
    PointLoss loss;

    Setup(int width, int n_points) {
        Rng rng(derive_seed(11, "bench"));
        params = glorot_init(Architecture::constant_width(2, 3, width, Activation::sin), rng);
        points = sample_domain(static_cast<std::size_t>(n_points), 2, rng);
        const double k2 = wavenumber(1) * wavenumber(1);
        loss = [k2](std::size_t, const InputJet& j, InputJet& adj) {
            const double r = -j.laplacian() - k2 * j.value;
            adj = InputJet::zero(j.dim);
            adj.value = -2.0 * k2 * r;
            for (int i = 0; i < j.dim; ++i) adj.d2[i] = -2.0 * r;
            return r * r;
        };
    }
};

void BM_Batched(benchmark::State& state) {
    Setup s(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    MlpParams g(s.params.architecture());
    for (auto _ : state) {
        g.set_zero();
        benchmark::DoNotOptimize(param_gradient(s.params, s.points, JetOrder::second, s.loss, &g));
    }
    state.SetItemsProcessed(state.iterations() * state.range(1));
}

void BM_Reference(benchmark::State& state) {
    Setup s(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    MlpParams g(s.params.architecture());
    for (auto _ : state) {
        g.set_zero();
        benchmark::DoNotOptimize(reference::param_gradient(s.params, s.points, JetOrder::second, s.loss, &g));
    }
    state.SetItemsProcessed(state.iterations() * state.range(1));
}

void BM_CompositeLossGradient(benchmark::State& state) {
    const ProblemSpec spec = manufactured(CaseKind::dirichlet2d, 1);
    Rng rng(derive_seed(11, "bench"));
    const CollocationSet sets = build_collocation(spec, SamplingPlan{}, rng);
    const HyperParams hp{1e-3, 2, static_cast<int>(state.range(0)), Activation::sin, std::nullopt};
    const MlpParams params = glorot_init(hp.architecture(2), rng);
    MlpParams g;
    for (auto _ : state) benchmark::DoNotOptimize(composite_loss_gradient(params, train_sets(sets), weights_for(hp), spec, g));
}

}  // namespace

BENCHMARK(BM_Batched)->Args({32, 400})->Args({64, 400})->Args({128, 1600});
BENCHMARK(BM_Reference)->Args({32, 400})->Args({64, 400})->Args({128, 1600});
BENCHMARK(BM_CompositeLossGradient)->Arg(32)->Arg(64);

BENCHMARK_MAIN();
