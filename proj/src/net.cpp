#include "hpinn/net.hpp"

#include <algorithm>
#include <numeric>

#include "activation.hpp"

namespace hpinn {

Point make_point(std::span<const double> coords) {
    if (coords.empty() || coords.size() > static_cast<std::size_t>(kMaxDim))
        throw std::invalid_argument("point dimension must be in [1, 3]");
    Point p;
    p.dim = static_cast<int>(coords.size());
    std::copy(coords.begin(), coords.end(), p.x.begin());
    return p;
}

std::string_view to_string(Activation a) {
    switch (a) {
        case Activation::sin: return "sin";
        case Activation::sigmoid: return "sigmoid";
        case Activation::tanh: return "tanh";
    }
    return "?";
}

Activation parse_activation(std::string_view name) {
    if (name == "sin") return Activation::sin;
    if (name == "sigmoid") return Activation::sigmoid;
    if (name == "tanh") return Activation::tanh;
    throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

Architecture Architecture::constant_width(int input_dim, int depth, int width, Activation activation) {
    if (depth < 1) throw std::invalid_argument("depth must be >= 1");
    Architecture arch{input_dim, std::vector<int>(static_cast<std::size_t>(depth), width), activation};
    arch.validate();
    return arch;
}

void Architecture::validate() const {
    if (input_dim < 1 || input_dim > kMaxDim) throw std::invalid_argument("input_dim must be in [1, 3]");
    if (hidden_widths.empty()) throw std::invalid_argument("at least one hidden layer is required");
    for (const int w : hidden_widths)
        if (w < 1) throw std::invalid_argument("hidden widths must be >= 1");
    switch (activation) {
        case Activation::sin:
        case Activation::sigmoid:
        case Activation::tanh: break;
        default: throw std::invalid_argument("activation outside {sin, sigmoid, tanh}");
    }
}

int Architecture::fan_in(int l) const {
    return l == 1 ? input_dim : hidden_widths[static_cast<std::size_t>(l - 2)];
}

int Architecture::fan_out(int l) const {
    return l == layer_count() ? 1 : hidden_widths[static_cast<std::size_t>(l - 1)];
}

std::size_t param_count(const Architecture& arch) {
    std::size_t total = 0;
    for (int l = 1; l <= arch.layer_count(); ++l)
        total += static_cast<std::size_t>(arch.fan_out(l)) * static_cast<std::size_t>(arch.fan_in(l) + 1);
    return total;
}

MlpParams::MlpParams(Architecture arch) : arch_(std::move(arch)) {
    arch_.validate();
    data_.assign(param_count(arch_), 0.0);
    std::size_t offset = 0;
    for (int l = 1; l <= arch_.layer_count(); ++l) {
        offsets_.push_back(offset);
        offset += static_cast<std::size_t>(arch_.fan_out(l)) * static_cast<std::size_t>(arch_.fan_in(l) + 1);
    }
}

MlpParams::MlpParams(Architecture arch, std::vector<double> values) : MlpParams(std::move(arch)) {
    if (values.size() != data_.size())
        throw std::invalid_argument("parameter vector length does not match the architecture");
    data_ = std::move(values);
}

std::size_t MlpParams::bias_offset(int l) const {
    return weight_offset(l) + static_cast<std::size_t>(arch_.fan_out(l)) * static_cast<std::size_t>(arch_.fan_in(l));
}

Eigen::Map<RowMatrix> MlpParams::weights(int l) {
    return {data_.data() + weight_offset(l), arch_.fan_out(l), arch_.fan_in(l)};
}

Eigen::Map<const RowMatrix> MlpParams::weights(int l) const {
    return {data_.data() + weight_offset(l), arch_.fan_out(l), arch_.fan_in(l)};
}

Eigen::Map<Eigen::VectorXd> MlpParams::bias(int l) {
    return {data_.data() + bias_offset(l), arch_.fan_out(l)};
}

Eigen::Map<const Eigen::VectorXd> MlpParams::bias(int l) const {
    return {data_.data() + bias_offset(l), arch_.fan_out(l)};
}

void MlpParams::set_zero() { std::fill(data_.begin(), data_.end(), 0.0); }

bool MlpParams::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

MlpParams glorot_init(const Architecture& arch, Rng& rng) {
    MlpParams params(arch);
    for (int l = 1; l <= arch.layer_count(); ++l) {
        const double bound = glorot_bound(arch.fan_in(l), arch.fan_out(l));
        auto w = params.weights(l);
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = bound * (2.0 * rng.uniform() - 1.0);
    }
    return params;
}

double InputJet::laplacian() const {
    double sum = 0.0;
    for (int i = 0; i < dim; ++i) sum += d2[static_cast<std::size_t>(i)];
    return sum;
}

bool InputJet::finite() const {
    if (!std::isfinite(value)) return false;
    for (int i = 0; i < dim; ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (!std::isfinite(d1[k]) || !std::isfinite(d2[k])) return false;
    }
    return true;
}

InputJet forward_jet(const MlpParams& params, std::span<const double> x, JetOrder order) {
    const Architecture& arch = params.architecture();
    const int d = arch.input_dim;
    if (static_cast<int>(x.size()) != d) throw std::invalid_argument("input dimension does not match the network");
    const int nb = jet_blocks(order, d);

    // blocks[b][j]: b = 0 value, 1..d first partials, d+1..2d second partials.
    std::vector<std::vector<double>> in(static_cast<std::size_t>(nb), std::vector<double>(static_cast<std::size_t>(d), 0.0));
    for (int j = 0; j < d; ++j) in[0][static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)];
    if (order != JetOrder::value)
        for (int i = 0; i < d; ++i) in[static_cast<std::size_t>(1 + i)][static_cast<std::size_t>(i)] = 1.0;

    for (int l = 1; l <= arch.layer_count(); ++l) {
        const auto w = params.weights(l);
        const auto b = params.bias(l);
        const int rows = arch.fan_out(l), cols = arch.fan_in(l);
        std::vector<std::vector<double>> pre(static_cast<std::size_t>(nb), std::vector<double>(static_cast<std::size_t>(rows)));
        for (int blk = 0; blk < nb; ++blk) {
            const auto& src = in[static_cast<std::size_t>(blk)];
            auto& dst = pre[static_cast<std::size_t>(blk)];
            for (int r = 0; r < rows; ++r) {
                double acc = 0.0;
                for (int c = 0; c < cols; ++c) acc += w(r, c) * src[static_cast<std::size_t>(c)];
                dst[static_cast<std::size_t>(r)] = blk == 0 ? acc + b(r) : acc;
            }
        }
        if (l == arch.layer_count()) {
            in = std::move(pre);
            break;
        }
        for (int r = 0; r < rows; ++r) {
            const auto k = static_cast<std::size_t>(r);
            const auto s = detail::activation_derivs(arch.activation, pre[0][k]);
            pre[0][k] = s.s0;
            for (int i = 0; i < d && order != JetOrder::value; ++i) {
                const double a1 = pre[static_cast<std::size_t>(1 + i)][k];
                pre[static_cast<std::size_t>(1 + i)][k] = s.s1 * a1;
                if (order == JetOrder::second) {
                    auto& a2 = pre[static_cast<std::size_t>(1 + d + i)][k];
                    a2 = s.s2 * a1 * a1 + s.s1 * a2;
                }
            }
        }
        in = std::move(pre);
    }

    InputJet jet = InputJet::zero(d);
    jet.value = in[0][0];
    for (int i = 0; i < d && order != JetOrder::value; ++i) {
        jet.d1[static_cast<std::size_t>(i)] = in[static_cast<std::size_t>(1 + i)][0];
        if (order == JetOrder::second) jet.d2[static_cast<std::size_t>(i)] = in[static_cast<std::size_t>(1 + d + i)][0];
    }
    return jet;
}

double forward(const MlpParams& params, std::span<const double> x) {
    return forward_jet(params, x, JetOrder::value).value;
}

}  // namespace hpinn
