#include <cmath>

#include "activation.hpp"
#include "hpinn/net.hpp"

namespace hpinn::reference {

namespace {

using Blocks = std::vector<std::vector<double>>;

Blocks make_blocks(int nb, int n) {
    return Blocks(static_cast<std::size_t>(nb), std::vector<double>(static_cast<std::size_t>(n), 0.0));
}

}  // namespace

double param_gradient(const MlpParams& params, std::span<const Point> points, JetOrder order,
                      const PointLoss& loss, MlpParams* gradient) {
    const Architecture& arch = params.architecture();
    const int d = arch.input_dim;
    const int nb = jet_blocks(order, d);
    const int layers = arch.layer_count();
    const auto act = arch.activation;
    if (gradient && gradient->architecture() != arch)
        throw std::invalid_argument("gradient buffer does not match the network");

    double total = 0.0;
    std::vector<Blocks> inputs(static_cast<std::size_t>(layers));
    std::vector<Blocks> pre(static_cast<std::size_t>(layers));

    for (std::size_t p = 0; p < points.size(); ++p) {
        const Point& x = points[p];
        if (x.dim != d) throw std::invalid_argument("point dimension does not match the network");

        Blocks cur = make_blocks(nb, d);
        for (int j = 0; j < d; ++j) cur[0][static_cast<std::size_t>(j)] = x[j];
        if (order != JetOrder::value)
            for (int i = 0; i < d; ++i) cur[static_cast<std::size_t>(1 + i)][static_cast<std::size_t>(i)] = 1.0;

        for (int l = 1; l <= layers; ++l) {
            const auto li = static_cast<std::size_t>(l - 1);
            const auto w = params.weights(l);
            const auto b = params.bias(l);
            const int rows = arch.fan_out(l), cols = arch.fan_in(l);
            inputs[li] = cur;
            Blocks a = make_blocks(nb, rows);
            for (int blk = 0; blk < nb; ++blk)
                for (int r = 0; r < rows; ++r) {
                    double acc = 0.0;
                    for (int c = 0; c < cols; ++c) acc += w(r, c) * cur[static_cast<std::size_t>(blk)][static_cast<std::size_t>(c)];
                    a[static_cast<std::size_t>(blk)][static_cast<std::size_t>(r)] = blk == 0 ? acc + b(r) : acc;
                }
            pre[li] = a;
            if (l == layers) {
                cur = std::move(a);
                break;
            }
            for (int r = 0; r < rows; ++r) {
                const auto k = static_cast<std::size_t>(r);
                const auto s = detail::activation_derivs(act, a[0][k]);
                a[0][k] = s.s0;
                for (int i = 0; i < d && order != JetOrder::value; ++i) {
                    const double a1 = a[static_cast<std::size_t>(1 + i)][k];
                    a[static_cast<std::size_t>(1 + i)][k] = s.s1 * a1;
                    if (order == JetOrder::second) {
                        auto& a2 = a[static_cast<std::size_t>(1 + d + i)][k];
                        a2 = s.s2 * a1 * a1 + s.s1 * a2;
                    }
                }
            }
            cur = std::move(a);
        }

        InputJet jet = InputJet::zero(d);
        jet.value = cur[0][0];
        for (int i = 0; i < d && order != JetOrder::value; ++i) {
            jet.d1[static_cast<std::size_t>(i)] = cur[static_cast<std::size_t>(1 + i)][0];
            if (order == JetOrder::second) jet.d2[static_cast<std::size_t>(i)] = cur[static_cast<std::size_t>(1 + d + i)][0];
        }
        InputJet adjoint = InputJet::zero(d);
        const double term = loss(p, jet, adjoint);
        if (!std::isfinite(term) || !adjoint.finite())
            throw NumericalFault("non-finite loss term at collocation point " + std::to_string(p));
        total += term;
        if (!gradient) continue;

        // Adjoint of the current layer's outputs, block layout as above.
        Blocks bar = make_blocks(nb, 1);
        bar[0][0] = adjoint.value;
        for (int i = 0; i < d && order != JetOrder::value; ++i) {
            bar[static_cast<std::size_t>(1 + i)][0] = adjoint.d1[static_cast<std::size_t>(i)];
            if (order == JetOrder::second) bar[static_cast<std::size_t>(1 + d + i)][0] = adjoint.d2[static_cast<std::size_t>(i)];
        }

        for (int l = layers; l >= 1; --l) {
            const auto li = static_cast<std::size_t>(l - 1);
            const int rows = arch.fan_out(l), cols = arch.fan_in(l);
            if (l < layers) {
                const Blocks& a = pre[li];
                Blocks abar = make_blocks(nb, rows);
                for (int r = 0; r < rows; ++r) {
                    const auto k = static_cast<std::size_t>(r);
                    const auto s = detail::activation_derivs(act, a[0][k]);
                    double a0 = bar[0][k] * s.s1;
                    for (int i = 0; i < d && order != JetOrder::value; ++i) {
                        const auto bi = static_cast<std::size_t>(1 + i);
                        const double a1 = a[bi][k];
                        const double z1bar = bar[bi][k];
                        a0 += z1bar * s.s2 * a1;
                        abar[bi][k] = z1bar * s.s1;
                        if (order == JetOrder::second) {
                            const auto bj = static_cast<std::size_t>(1 + d + i);
                            const double z2bar = bar[bj][k];
                            abar[bj][k] = z2bar * s.s1;
                            abar[bi][k] += 2.0 * z2bar * s.s2 * a1;
                            a0 += z2bar * (s.s3 * a1 * a1 + s.s2 * a[bj][k]);
                        }
                    }
                    abar[0][k] = a0;
                }
                bar = std::move(abar);
            }
            auto gw = gradient->weights(l);
            auto gb = gradient->bias(l);
            const Blocks& in = inputs[li];
            for (int r = 0; r < rows; ++r) {
                gb(r) += bar[0][static_cast<std::size_t>(r)];
                for (int c = 0; c < cols; ++c) {
                    double acc = 0.0;
                    for (int blk = 0; blk < nb; ++blk)
                        acc += bar[static_cast<std::size_t>(blk)][static_cast<std::size_t>(r)] * in[static_cast<std::size_t>(blk)][static_cast<std::size_t>(c)];
                    gw(r, c) += acc;
                }
            }
            if (l == 1) break;
            const auto w = params.weights(l);
            Blocks prev = make_blocks(nb, cols);
            for (int blk = 0; blk < nb; ++blk)
                for (int c = 0; c < cols; ++c) {
                    double acc = 0.0;
                    for (int r = 0; r < rows; ++r) acc += w(r, c) * bar[static_cast<std::size_t>(blk)][static_cast<std::size_t>(r)];
                    prev[static_cast<std::size_t>(blk)][static_cast<std::size_t>(c)] = acc;
                }
            bar = std::move(prev);
        }
    }
    if (gradient && !gradient->all_finite()) throw NumericalFault("non-finite parameter gradient");
    return total;
}

}  // namespace hpinn::reference
