#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hpinn/problem.hpp"
#include "hpinn/sampling.hpp"
#include "oracles.hpp"

using namespace hpinn;

namespace {

InputJet jet2(double v, double dx, double dy, double dxx, double dyy) {
    InputJet j = InputJet::zero(2);
    j.value = v;
    j.d1 = {dx, dy, 0.0};
    j.d2 = {dxx, dyy, 0.0};
    return j;
}

}  // namespace

TEST_CASE("helmholtz_residual examples") {
    const double k = wavenumber(1);
    CHECK(helmholtz_residual(InputJet::zero(2), k, 0.0) == 0.0);

    // u = x^2 with kappa = 1, f = 0.
    for (const double x : {0.0, 0.3, 0.9}) {
        const auto j = jet2(x * x, 2 * x, 0.0, 2.0, 0.0);
        CHECK(helmholtz_residual(j, 1.0, 0.0) == doctest::Approx(-2.0 - x * x).epsilon(1e-15));
        const auto u = [](double t) { return t * t; };
        CHECK(-oracle::fd_second(u, x, 1e-4) - x * x == doctest::Approx(-2.0 - x * x).epsilon(1e-6));
    }
}

TEST_CASE("manufactured Dirichlet case is consistent") {
    const auto spec = manufactured(CaseKind::dirichlet2d, 2);
    CHECK(spec.kappa == 4.0 * std::numbers::pi);
    CHECK(spec.dim == 2);
    CHECK(spec.hard == HardConstraint::vanishing);
    CHECK_FALSE(spec.has_boundary_term());
    CHECK(manufactured(CaseKind::dirichlet2d, 1).exact(oracle::point({0.25, 0.25})) ==
          doctest::Approx(1.0).epsilon(1e-15));

    Rng rng(1);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto x = oracle::random_interior(2, rng, 0.0);
        worst = std::max(worst, std::abs(helmholtz_residual(spec.exact_jet(x), spec.kappa, spec.source(x))));
    }
    CHECK(worst <= 1e-9);

    double worst_bc = 0.0;
    for (const auto& b : sample_boundary(100, 2, rng))
        worst_bc = std::max(worst_bc, std::abs(dirichlet_residual(spec.exact(b.x), spec.boundary_data(b.x))));
    CHECK(worst_bc <= 1e-9);

    CHECK(dirichlet_residual(1.0, 1.0) == 0.0);
    CHECK(dirichlet_residual(0.5, 0.0) == 0.5);
    CHECK_THROWS_AS(manufactured(CaseKind::dirichlet2d, 0), std::invalid_argument);
}

TEST_CASE("manufactured Neumann case") {
    const auto spec = manufactured(CaseKind::neumann3d, 1, {HardConstraint::none, NeumannSource::consistent});
    CHECK(spec.dim == 3);
    CHECK(spec.bc == BcKind::neumann);
    CHECK(spec.has_boundary_term());
    const auto x = oracle::point({0.1, 0.35, 0.8});
    const double c = std::cos(spec.kappa * 0.1) * std::cos(spec.kappa * 0.35);
    CHECK(spec.source(x) == doctest::Approx(spec.kappa * spec.kappa * c).epsilon(1e-14));
    CHECK(std::abs(helmholtz_residual(spec.exact_jet(x), spec.kappa, spec.source(x))) <= 1e-9);

    const auto paper = manufactured(CaseKind::neumann3d, 1, {HardConstraint::none, NeumannSource::paper});
    CHECK(paper.source(x) == doctest::Approx(2.0 * spec.kappa * spec.kappa * c).epsilon(1e-14));

    CHECK_THROWS_AS(manufactured(CaseKind::neumann3d, 1, {HardConstraint::vanishing, NeumannSource::consistent}),
                    std::invalid_argument);

    // 10^3 points on each face.
    Rng rng(2);
    for (int axis = 0; axis < 3; ++axis)
        for (const double side : {0.0, 1.0}) {
            double worst = 0.0;
            Point n;
            n.dim = 3;
            n[axis] = side == 0.0 ? -1.0 : 1.0;
            for (int i = 0; i < 1000; ++i) {
                auto p = oracle::random_interior(3, rng, 0.0);
                p[axis] = side;
                worst = std::max(worst, std::abs(neumann_residual(spec.exact_jet(p), n.coords(), spec.boundary_data(p))));
            }
            CHECK(worst <= 1e-9);
        }
}

TEST_CASE("neumann_residual examples and contract") {
    InputJet constant = InputJet::zero(3);
    constant.value = 4.0;
    const std::array<double, 3> nx{1.0, 0.0, 0.0};
    const std::array<double, 3> ny{0.0, -1.0, 0.0};
    CHECK(neumann_residual(constant, nx, 0.0) == 0.0);
    CHECK(neumann_residual(constant, ny, 0.0) == 0.0);

    InputJet ux = InputJet::zero(3);
    ux.value = 1.0;
    ux.d1 = {1.0, 0.0, 0.0};
    CHECK(neumann_residual(ux, nx, 0.0) == 1.0);

    const std::array<double, 3> bad{1.0, 1.0, 0.0};
    CHECK_THROWS_AS(neumann_residual(ux, bad, 0.0), std::domain_error);
}

TEST_CASE("hard_transform multipliers") {
    Rng rng(3);
    for (const auto& b : sample_boundary(1000, 2, rng)) CHECK(hard_transform(HardConstraint::vanishing, b.x, rng.uniform(-5, 5)) == 0.0);
    CHECK(hard_transform(HardConstraint::paper, oracle::point({1.0, 0.5}), 3.0) == 0.0);
    CHECK(hard_transform(HardConstraint::paper, oracle::point({0.0, 0.5}), 2.0) == doctest::Approx(0.75 * 2.0).epsilon(1e-15));
    CHECK(hard_transform(HardConstraint::none, oracle::point({0.3, 0.5}), 2.0) == 2.0);
}

TEST_CASE("hard_transform jets match finite differences") {
    Rng rng(4);
    const auto arch = Architecture::constant_width(2, 2, 10, Activation::tanh);
    for (const auto kind : {HardConstraint::vanishing, HardConstraint::paper}) {
        double worst = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            const auto p = oracle::random_params(arch, rng);
            const auto x = oracle::random_interior(2, rng);
            const auto t = hard_transform(kind, x, forward_jet(p, x));
            CHECK(t.value == hard_transform(kind, x, forward(p, x)));
            for (int i = 0; i < 2; ++i) {
                const auto f = [&](double s) {
                    auto y = x;
                    y[i] = s;
                    return hard_transform(kind, y, forward(p, y));
                };
                worst = std::max(worst, oracle::rel_err(t.d1[i], oracle::fd_first(f, x[i], 1e-4)));
                worst = std::max(worst, oracle::rel_err(t.d2[i], oracle::fd_second(f, x[i], 1e-4)));
            }
        }
        CHECK(worst <= 1e-6);
    }
}

TEST_CASE("hard_transform_adjoint is the transpose of the jet map") {
    // <adj_t, T(j)> = <T^*(adj_t), j> for the linear map j -> hard_transform(j).
    Rng rng(5);
    for (const auto kind : {HardConstraint::vanishing, HardConstraint::paper}) {
        for (int trial = 0; trial < 20; ++trial) {
            const auto x = oracle::random_interior(2, rng);
            const auto j = jet2(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
            const auto a = jet2(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
            const auto t = hard_transform(kind, x, j);
            const auto back = hard_transform_adjoint(kind, x, a);
            const auto dot = [](const InputJet& u, const InputJet& v) {
                return u.value * v.value + u.d1[0] * v.d1[0] + u.d1[1] * v.d1[1] + u.d2[0] * v.d2[0] + u.d2[1] * v.d2[1];
            };
            CHECK(dot(a, t) == doctest::Approx(dot(back, j)).epsilon(1e-13));
        }
    }
}

TEST_CASE("enum names round-trip") {
    for (const auto c : {CaseKind::dirichlet2d, CaseKind::neumann3d}) CHECK(parse_case(to_string(c)) == c);
    for (const auto h : {HardConstraint::none, HardConstraint::vanishing, HardConstraint::paper})
        CHECK(parse_hard_constraint(to_string(h)) == h);
    for (const auto s : {NeumannSource::consistent, NeumannSource::paper}) CHECK(parse_neumann_source(to_string(s)) == s);
    CHECK_THROWS(parse_case("dirichlet3d"));
}
