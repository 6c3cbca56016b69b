#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hpinn/net.hpp"
#include "oracles.hpp"

using namespace hpinn;

TEST_CASE("param_count matches the layer formula") {
    CHECK(param_count(Architecture::constant_width(2, 2, 275, Activation::sin)) == 77'001);
    CHECK(param_count(Architecture{1, {1}, Activation::sin}) == 4);
    CHECK(param_count(Architecture::constant_width(3, 10, 207, Activation::sin)) == 388'540);
    CHECK(param_count(Architecture::constant_width(3, 3, 292, Activation::sin)) == 172'573);
}

TEST_CASE("param_count equals flattened length, exhaustively") {
    for (int d = 1; d <= 3; ++d)
        for (int depth = 1; depth <= 4; ++depth)
            for (int width = 1; width <= 8; ++width) {
                const auto arch = Architecture::constant_width(d, depth, width, Activation::tanh);
                std::size_t manual = 0;
                int prev = d;
                for (int l = 0; l < depth; ++l) {
                    manual += static_cast<std::size_t>(width * prev + width);
                    prev = width;
                }
                manual += static_cast<std::size_t>(prev + 1);
                CHECK(param_count(arch) == manual);
                CHECK(MlpParams(arch).size() == manual);
            }
}

TEST_CASE("architecture validation") {
    CHECK_THROWS_AS(Architecture({2, {}, Activation::sin}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(Architecture({2, {3, 0}, Activation::sin}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(Architecture({0, {3}, Activation::sin}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(parse_activation("relu"), std::invalid_argument);
    CHECK(parse_activation("sigmoid") == Activation::sigmoid);
    CHECK_THROWS_AS(MlpParams(Architecture::constant_width(2, 1, 3, Activation::sin), std::vector<double>(5)),
                    std::invalid_argument);
}

TEST_CASE("glorot_init bounds, zero biases, determinism") {
    CHECK(glorot_bound(3, 3) == doctest::Approx(1.0).epsilon(1e-15));

    const auto arch = Architecture::constant_width(2, 3, 16, Activation::sin);
    Rng a(11), b(11);
    const auto pa = glorot_init(arch, a);
    const auto pb = glorot_init(arch, b);
    CHECK(pa == pb);
    for (int l = 1; l <= arch.layer_count(); ++l) {
        CHECK(pa.bias(l).isZero(0.0));
        CHECK(pa.weights(l).cwiseAbs().maxCoeff() <= glorot_bound(arch.fan_in(l), arch.fan_out(l)));
    }
    Rng c(12);
    CHECK_FALSE(glorot_init(arch, c) == pa);
}

TEST_CASE("glorot_init sample statistics for fan_in = fan_out = 50") {
    // The middle layer of a 2 x 50 network is 50x50; repeat until 1e5 samples.
    const auto arch = Architecture::constant_width(2, 2, 50, Activation::sin);
    Rng rng(7);
    const double bound = std::sqrt(6.0 / 100.0);
    double sum = 0.0, max_abs = 0.0;
    std::size_t n = 0;
    while (n < 100'000) {
        const auto p = glorot_init(arch, rng);
        const auto w = p.weights(2);
        for (Eigen::Index i = 0; i < w.size(); ++i) {
            sum += w.data()[i];
            max_abs = std::max(max_abs, std::abs(w.data()[i]));
        }
        n += static_cast<std::size_t>(w.size());
    }
    const double mean = sum / static_cast<double>(n);
    const double se = bound / std::sqrt(3.0) / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(mean) <= 3.0 * se);
    CHECK(max_abs <= bound);
}

TEST_CASE("forward: trivial networks") {
    const auto arch = Architecture::constant_width(2, 2, 4, Activation::tanh);
    MlpParams p(arch);
    p.bias(arch.layer_count())(0) = 1.75;
    Rng rng(3);
    for (int k = 0; k < 10; ++k) CHECK(forward(p, oracle::random_interior(2, rng)) == 1.75);

    MlpParams s(Architecture{2, {1}, Activation::sin});
    s.weights(1)(0, 0) = 1.0;
    s.weights(2)(0, 0) = 1.0;
    for (const double x : {0.1, 0.4, 0.9}) CHECK(forward(s, oracle::point({x, 0.3})) == doctest::Approx(std::sin(x)).epsilon(1e-15));
}

TEST_CASE("forward agrees with the naive evaluator") {
    Rng rng(5);
    for (const auto act : {Activation::sin, Activation::tanh, Activation::sigmoid})
        for (int trial = 0; trial < 20; ++trial) {
            const int d = 1 + static_cast<int>(rng.below(3));
            const auto arch = Architecture::constant_width(d, 1 + static_cast<int>(rng.below(4)),
                                                           1 + static_cast<int>(rng.below(20)), act);
            const auto p = oracle::random_params(arch, rng);
            std::vector<double> x(static_cast<std::size_t>(d));
            for (auto& v : x) v = rng.uniform();
            const double want = oracle::naive_forward(p, x);
            CHECK(oracle::rel_err(forward(p, x), want, 1e-3) <= 1e-12);
        }
}

TEST_CASE("forward_jet: analytic cases and bitwise value") {
    MlpParams s(Architecture{2, {1}, Activation::sin});
    s.weights(1)(0, 0) = 1.0;
    s.weights(2)(0, 0) = 1.0;
    const auto j = forward_jet(s, oracle::point({0.7, 0.2}));
    CHECK(j.d1[0] == doctest::Approx(std::cos(0.7)).epsilon(1e-15));
    CHECK(j.d2[0] == doctest::Approx(-std::sin(0.7)).epsilon(1e-15));
    CHECK(j.d1[1] == 0.0);
    CHECK(j.d2[1] == 0.0);

    // Hidden weights zero: the output is an affine function of constants.
    const auto arch = Architecture::constant_width(3, 2, 5, Activation::sigmoid);
    Rng rng(9);
    auto p = oracle::random_params(arch, rng);
    p.weights(1).setZero();
    const auto flat = forward_jet(p, oracle::point({0.1, 0.5, 0.8}));
    for (int i = 0; i < 3; ++i) {
        CHECK(flat.d1[i] == 0.0);
        CHECK(flat.d2[i] == 0.0);
    }

    for (const auto act : {Activation::sin, Activation::tanh, Activation::sigmoid})
        for (int trial = 0; trial < 30; ++trial) {
            const int d = 2 + static_cast<int>(rng.below(2));
            const auto q = oracle::random_params(Architecture::constant_width(d, 3, 12, act), rng);
            const auto x = oracle::random_interior(d, rng);
            CHECK(forward_jet(q, x).value == forward(q, x));
            CHECK(forward_jet(q, x, JetOrder::first).value == forward(q, x));
            CHECK(forward_jet(q, x, JetOrder::value).value == forward(q, x));
        }
}

TEST_CASE("forward_jet partials match central differences") {
    Rng rng(21);
    const double h = 1e-4;
    double worst = 0.0;
    for (int trial = 0; trial < 60; ++trial) {
        const auto act = static_cast<Activation>(trial % 3);
        const int d = 2 + trial % 2;
        const auto p = oracle::random_params(Architecture::constant_width(d, 2, 16, act), rng);
        const auto x = oracle::random_interior(d, rng);
        const auto jet = forward_jet(p, x);
        for (int i = 0; i < d; ++i) {
            const auto f = [&](double t) {
                auto y = x;
                y[i] = t;
                return forward(p, y);
            };
            worst = std::max(worst, oracle::rel_err(jet.d1[i], oracle::fd_first(f, x[i], h)));
            worst = std::max(worst, oracle::rel_err(jet.d2[i], oracle::fd_second(f, x[i], h)));
        }
    }
    CHECK(worst <= 1e-6);
}

namespace {

// Mixed loss touching every jet component: sum_i (a u + b . d1 + c . d2 - t_i)^2.
struct MixedLoss {
    std::vector<double> target;
    double a = 0.7, b = -0.3, c = 0.05;
    double operator()(std::size_t i, const InputJet& j, InputJet& adj) const {
        double r = a * j.value - target[i];
        for (int k = 0; k < j.dim; ++k) r += b * j.d1[k] + c * j.d2[k];
        adj.value = 2.0 * r * a;
        for (int k = 0; k < j.dim; ++k) {
            adj.d1[k] = 2.0 * r * b;
            adj.d2[k] = 2.0 * r * c;
        }
        return r * r;
    }
};

}  // namespace

TEST_CASE("param_gradient: zero weights give only the output-bias entry") {
    const auto arch = Architecture::constant_width(2, 2, 4, Activation::sin);
    MlpParams p(arch), g(arch);
    const std::vector<Point> pts = {oracle::point({0.3, 0.6})};
    const PointLoss value = [](std::size_t, const InputJet& j, InputJet& adj) {
        adj.value = 1.0;
        return j.value;
    };
    param_gradient(p, pts, JetOrder::value, value, &g);
    const auto out_bias = g.bias_offset(arch.layer_count());
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(g.values()[k] == (k == out_bias ? 1.0 : 0.0));
}

TEST_CASE("param_gradient matches finite differences, batched and reference") {
    Rng rng(33);
    const double h = 1e-6;
    double worst = 0.0, worst_ref = 0.0, diff = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto act = static_cast<Activation>(trial % 3);
        const int d = 2 + trial % 2;
        const auto arch = Architecture::constant_width(d, 1 + trial % 3, 3 + trial % 5, act);
        auto p = oracle::random_params(arch, rng, 0.8);
        std::vector<Point> pts;
        MixedLoss loss;
        for (int k = 0; k < 7; ++k) {
            pts.push_back(oracle::random_interior(d, rng));
            loss.target.push_back(rng.uniform(-1, 1));
        }
        const auto order = static_cast<JetOrder>(trial % 3);
        const PointLoss pl = [&loss, order](std::size_t i, const InputJet& j, InputJet& adj) {
            InputJet masked = j;
            if (order == JetOrder::value) masked.d1 = {}, masked.d2 = {};
            if (order == JetOrder::first) masked.d2 = {};
            return loss(i, masked, adj);
        };
        MlpParams g(arch), gr(arch);
        const double l0 = param_gradient(p, pts, order, pl, &g);
        const double l0r = reference::param_gradient(p, pts, order, pl, &gr);
        CHECK(l0 == doctest::Approx(l0r).epsilon(1e-13));
        for (std::size_t k = 0; k < p.size(); ++k) {
            const double keep = p.values()[k];
            p.values()[k] = keep + h;
            const double up = reference::param_gradient(p, pts, order, pl, nullptr);
            p.values()[k] = keep - h;
            const double down = reference::param_gradient(p, pts, order, pl, nullptr);
            p.values()[k] = keep;
            const double fd = (up - down) / (2.0 * h);
            worst = std::max(worst, oracle::rel_err(g.values()[k], fd));
            worst_ref = std::max(worst_ref, oracle::rel_err(gr.values()[k], fd));
            diff = std::max(diff, oracle::rel_err(g.values()[k], gr.values()[k], 1e-8));
        }
    }
    CHECK(worst <= 1e-5);
    CHECK(worst_ref <= 1e-5);
    CHECK(diff <= 1e-10);
}

TEST_CASE("param_gradient is linear in the loss and accumulates") {
    Rng rng(4);
    const auto arch = Architecture::constant_width(2, 2, 6, Activation::tanh);
    const auto p = oracle::random_params(arch, rng);
    std::vector<Point> pts;
    MixedLoss loss;
    for (int k = 0; k < 50; ++k) {
        pts.push_back(oracle::random_interior(2, rng));
        loss.target.push_back(0.1 * k);
    }
    const double alpha = 3.5;
    const PointLoss scaled = [&](std::size_t i, const InputJet& j, InputJet& adj) {
        const double v = loss(i, j, adj);
        adj.value *= alpha;
        for (int k = 0; k < 2; ++k) adj.d1[k] *= alpha, adj.d2[k] *= alpha;
        return alpha * v;
    };
    MlpParams g(arch), ga(arch), twice(arch);
    param_gradient(p, pts, JetOrder::second, std::cref(loss), &g);
    param_gradient(p, pts, JetOrder::second, scaled, &ga);
    param_gradient(p, pts, JetOrder::second, std::cref(loss), &twice);
    param_gradient(p, pts, JetOrder::second, std::cref(loss), &twice);
    for (std::size_t k = 0; k < g.size(); ++k) {
        CHECK(ga.values()[k] == doctest::Approx(alpha * g.values()[k]).epsilon(1e-12));
        CHECK(twice.values()[k] == doctest::Approx(2.0 * g.values()[k]).epsilon(1e-12));
    }
}

TEST_CASE("param_gradient is deterministic across thread counts") {
    Rng rng(8);
    const auto arch = Architecture::constant_width(2, 2, 20, Activation::sin);
    const auto p = oracle::random_params(arch, rng);
    std::vector<Point> pts;
    MixedLoss loss;
    for (int k = 0; k < 1000; ++k) {
        pts.push_back(oracle::random_interior(2, rng));
        loss.target.push_back(rng.uniform());
    }
    MlpParams g1(arch), g2(arch);
    const double a = param_gradient(p, pts, JetOrder::second, std::cref(loss), &g1);
    const double b = param_gradient(p, pts, JetOrder::second, std::cref(loss), &g2);
    CHECK(a == b);
    CHECK(g1 == g2);
}

TEST_CASE("forward_batch equals forward pointwise") {
    Rng rng(10);
    const auto p = oracle::random_params(Architecture::constant_width(3, 3, 9, Activation::sigmoid), rng);
    std::vector<Point> pts;
    for (int k = 0; k < 200; ++k) pts.push_back(oracle::random_interior(3, rng));
    const auto v = forward_batch(p, pts);
    REQUIRE(v.size() == pts.size());
    for (std::size_t k = 0; k < pts.size(); ++k) CHECK(v[k] == doctest::Approx(forward(p, pts[k])).epsilon(1e-13));
}

TEST_CASE("param_gradient reports non-finite values") {
    const auto arch = Architecture::constant_width(2, 1, 3, Activation::sin);
    MlpParams p(arch), g(arch);
    const std::vector<Point> pts = {oracle::point({0.5, 0.5})};
    const PointLoss bad = [](std::size_t, const InputJet&, InputJet& adj) {
        adj.value = 1.0;
        return std::numeric_limits<double>::quiet_NaN();
    };
    CHECK_THROWS_AS(param_gradient(p, pts, JetOrder::value, bad, &g), NumericalFault);
    CHECK_THROWS_AS(reference::param_gradient(p, pts, JetOrder::value, bad, &g), NumericalFault);
}

TEST_CASE("blob serialization round-trips") {
    Rng rng(12);
    const auto p = oracle::random_params(Architecture::constant_width(3, 2, 7, Activation::tanh), rng);
    const auto blob = serialize(p);
    REQUIRE(blob.size() > 12);
    CHECK(std::string(blob.begin(), blob.begin() + 8) == "HPINNMLP");
    const std::uint32_t header = blob[8] | (blob[9] << 8) | (blob[10] << 16) | (static_cast<std::uint32_t>(blob[11]) << 24);
    CHECK(blob.size() == 12 + header + 8 * p.size());
    CHECK(deserialize(blob) == p);

    auto broken = blob;
    broken[0] = 'X';
    CHECK_THROWS(deserialize(broken));
    broken = blob;
    broken.pop_back();
    CHECK_THROWS(deserialize(broken));
}
