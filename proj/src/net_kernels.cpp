#include <algorithm>
#include <cmath>

#include <omp.h>

#include "activation.hpp"
#include "hpinn/net.hpp"

namespace hpinn {

namespace {

constexpr std::size_t kChunk = 32;
constexpr std::size_t kMaxSlots = 8;

using Matrix = Eigen::MatrixXd;

// Column layout of every activation matrix: nb blocks of `cols` columns each,
// block 0 values, 1..d first partials, d+1..2d second partials.
struct LayerTape {
    Matrix input;   // fan_in x nb*cols
    Matrix pre;     // fan_out x nb*cols
    Matrix s1, s2, s3;  // activation derivatives on the value block (hidden layers)
};

class ChunkKernel {
public:
    ChunkKernel(const MlpParams& params, JetOrder order)
        : params_(params), arch_(params.architecture()), order_(order),
          d_(arch_.input_dim), nb_(jet_blocks(order, arch_.input_dim)),
          tape_(static_cast<std::size_t>(arch_.layer_count())) {}

    double run(std::span<const Point> points, std::size_t first_index, const PointLoss& loss, double* grad) {
        const auto n = static_cast<Eigen::Index>(points.size());
        const int layers = arch_.layer_count();
        const auto blockc = [n](int blk) { return static_cast<Eigen::Index>(blk) * n; };

        Matrix cur = Matrix::Zero(d_, nb_ * n);
        for (Eigen::Index p = 0; p < n; ++p) {
            const Point& x = points[static_cast<std::size_t>(p)];
            if (x.dim != d_) throw std::invalid_argument("point dimension does not match the network");
            for (int j = 0; j < d_; ++j) cur(j, p) = x[j];
            if (order_ != JetOrder::value)
                for (int i = 0; i < d_; ++i) cur(i, blockc(1 + i) + p) = 1.0;
        }

        for (int l = 1; l <= layers; ++l) {
            LayerTape& t = tape_[static_cast<std::size_t>(l - 1)];
            const auto w = params_.weights(l);
            t.input = std::move(cur);
            t.pre.noalias() = w * t.input;
            t.pre.leftCols(n).colwise() += params_.bias(l);
            if (l == layers) {
                cur = t.pre;
                break;
            }
            const Eigen::Index rows = t.pre.rows();
            t.s1.resize(rows, n);
            t.s2.resize(rows, n);
            t.s3.resize(rows, n);
            cur.resize(rows, nb_ * n);
            for (Eigen::Index p = 0; p < n; ++p)
                for (Eigen::Index r = 0; r < rows; ++r) {
                    const auto s = detail::activation_derivs(arch_.activation, t.pre(r, p));
                    cur(r, p) = s.s0;
                    t.s1(r, p) = s.s1;
                    t.s2(r, p) = s.s2;
                    t.s3(r, p) = s.s3;
                }
            for (int i = 0; i < d_ && order_ != JetOrder::value; ++i) {
                const auto a1 = t.pre.middleCols(blockc(1 + i), n).array();
                cur.middleCols(blockc(1 + i), n).array() = t.s1.array() * a1;
                if (order_ == JetOrder::second) {
                    const auto a2 = t.pre.middleCols(blockc(1 + d_ + i), n).array();
                    cur.middleCols(blockc(1 + d_ + i), n).array() = t.s2.array() * a1 * a1 + t.s1.array() * a2;
                }
            }
        }

        // cur is 1 x nb*n: the output jets.
        Matrix bar = Matrix::Zero(1, nb_ * n);
        double total = 0.0;
        for (Eigen::Index p = 0; p < n; ++p) {
            InputJet jet = InputJet::zero(d_);
            jet.value = cur(0, p);
            for (int i = 0; i < d_ && order_ != JetOrder::value; ++i) {
                jet.d1[static_cast<std::size_t>(i)] = cur(0, blockc(1 + i) + p);
                if (order_ == JetOrder::second) jet.d2[static_cast<std::size_t>(i)] = cur(0, blockc(1 + d_ + i) + p);
            }
            InputJet adjoint = InputJet::zero(d_);
            const std::size_t index = first_index + static_cast<std::size_t>(p);
            const double term = loss(index, jet, adjoint);
            if (!std::isfinite(term) || !adjoint.finite())
                throw NumericalFault("non-finite loss term at collocation point " + std::to_string(index));
            total += term;
            bar(0, p) = adjoint.value;
            for (int i = 0; i < d_ && order_ != JetOrder::value; ++i) {
                bar(0, blockc(1 + i) + p) = adjoint.d1[static_cast<std::size_t>(i)];
                if (order_ == JetOrder::second) bar(0, blockc(1 + d_ + i) + p) = adjoint.d2[static_cast<std::size_t>(i)];
            }
        }
        if (!grad) return total;

        for (int l = layers; l >= 1; --l) {
            const LayerTape& t = tape_[static_cast<std::size_t>(l - 1)];
            if (l < layers) {
                Matrix abar(bar.rows(), bar.cols());
                auto a0 = abar.leftCols(n).array();
                a0 = bar.leftCols(n).array() * t.s1.array();
                for (int i = 0; i < d_ && order_ != JetOrder::value; ++i) {
                    const auto a1 = t.pre.middleCols(blockc(1 + i), n).array();
                    const auto z1bar = bar.middleCols(blockc(1 + i), n).array();
                    a0 += z1bar * t.s2.array() * a1;
                    auto a1bar = abar.middleCols(blockc(1 + i), n).array();
                    a1bar = z1bar * t.s1.array();
                    if (order_ == JetOrder::second) {
                        const auto a2 = t.pre.middleCols(blockc(1 + d_ + i), n).array();
                        const auto z2bar = bar.middleCols(blockc(1 + d_ + i), n).array();
                        abar.middleCols(blockc(1 + d_ + i), n).array() = z2bar * t.s1.array();
                        a1bar += 2.0 * z2bar * t.s2.array() * a1;
                        a0 += z2bar * (t.s3.array() * a1 * a1 + t.s2.array() * a2);
                    }
                }
                bar = std::move(abar);
            }
            const int rows = arch_.fan_out(l), cols = arch_.fan_in(l);
            Eigen::Map<RowMatrix> gw(grad + params_.weight_offset(l), rows, cols);
            Eigen::Map<Eigen::VectorXd> gb(grad + params_.bias_offset(l), rows);
            gw.noalias() += bar * t.input.transpose();
            gb += bar.leftCols(n).rowwise().sum();
            if (l == 1) break;
            Matrix prev;
            prev.noalias() = params_.weights(l).transpose() * bar;
            bar = std::move(prev);
        }
        return total;
    }

private:
    const MlpParams& params_;
    const Architecture& arch_;
    JetOrder order_;
    int d_;
    int nb_;
    std::vector<LayerTape> tape_;
};

}  // namespace

double param_gradient(const MlpParams& params, std::span<const Point> points, JetOrder order,
                      const PointLoss& loss, MlpParams* gradient) {
    if (gradient && gradient->architecture() != params.architecture())
        throw std::invalid_argument("gradient buffer does not match the network");
    if (points.empty()) return 0.0;

    const std::size_t chunks = (points.size() + kChunk - 1) / kChunk;
    const std::size_t slots = std::min(kMaxSlots, chunks);
    const std::size_t nparams = params.size();

    std::vector<double> partial_loss(slots, 0.0);
    std::vector<std::vector<double>> partial_grad(gradient ? slots : 0);
    std::vector<std::string> errors(slots);
    std::vector<char> faulted(slots, 0);

#pragma omp parallel for schedule(static, 1)
    for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(slots); ++s) {
        const auto slot = static_cast<std::size_t>(s);
        try {
            ChunkKernel kernel(params, order);
            double* grad = nullptr;
            if (gradient) {
                partial_grad[slot].assign(nparams, 0.0);
                grad = partial_grad[slot].data();
            }
            const std::size_t c0 = slot * chunks / slots, c1 = (slot + 1) * chunks / slots;
            double acc = 0.0;
            for (std::size_t c = c0; c < c1; ++c) {
                const std::size_t begin = c * kChunk;
                const std::size_t end = std::min(points.size(), begin + kChunk);
                acc += kernel.run(points.subspan(begin, end - begin), begin, loss, grad);
            }
            partial_loss[slot] = acc;
        } catch (const NumericalFault& e) {
            faulted[slot] = 1;
            errors[slot] = e.what();
        } catch (const std::exception& e) {
            faulted[slot] = 2;
            errors[slot] = e.what();
        }
    }

    for (std::size_t s = 0; s < slots; ++s) {
        if (faulted[s] == 1) throw NumericalFault(errors[s]);
        if (faulted[s] == 2) throw std::invalid_argument(errors[s]);
    }

    double total = 0.0;
    for (std::size_t s = 0; s < slots; ++s) total += partial_loss[s];
    if (gradient) {
        auto out = gradient->values();
        for (std::size_t s = 0; s < slots; ++s)
            for (std::size_t k = 0; k < nparams; ++k) out[k] += partial_grad[s][k];
        if (!gradient->all_finite()) throw NumericalFault("non-finite parameter gradient");
    }
    return total;
}

std::vector<double> forward_batch(const MlpParams& params, std::span<const Point> points) {
    std::vector<double> values(points.size());
    param_gradient(params, points, JetOrder::value,
                   [&values](std::size_t i, const InputJet& jet, InputJet&) {
                       values[i] = jet.value;
                       return 0.0;
                   },
                   nullptr);
    return values;
}

}  // namespace hpinn
