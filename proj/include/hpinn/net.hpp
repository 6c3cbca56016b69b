#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "hpinn/rng.hpp"

namespace hpinn {

inline constexpr int kMaxDim = 3;

/// A point of [0,1]^d with d <= kMaxDim. Unused trailing coordinates are zero.
struct Point {
    std::array<double, kMaxDim> x{};
    int dim = 0;

    double operator[](int i) const { return x[static_cast<std::size_t>(i)]; }
    double& operator[](int i) { return x[static_cast<std::size_t>(i)]; }
    std::span<const double> coords() const { return {x.data(), static_cast<std::size_t>(dim)}; }

    friend bool operator==(const Point&, const Point&) = default;
};

Point make_point(std::span<const double> coords);

/// Raised when a non-finite value shows up in a loss, gradient or optimizer update.
class NumericalFault : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Activation { sin, sigmoid, tanh };

std::string_view to_string(Activation a);
/// Throws std::invalid_argument for names outside {sin, sigmoid, tanh}.
Activation parse_activation(std::string_view name);

/// Dense network R^d -> R with activations on hidden layers and a linear output.
struct Architecture {
    int input_dim = 2;
    std::vector<int> hidden_widths;
    Activation activation = Activation::sin;

    static Architecture constant_width(int input_dim, int depth, int width, Activation activation);

    /// Throws std::invalid_argument if the architecture is malformed.
    void validate() const;

    int layer_count() const { return static_cast<int>(hidden_widths.size()) + 1; }
    /// Fan-in of layer l (1-based; layer layer_count() is the output layer).
    int fan_in(int l) const;
    int fan_out(int l) const;

    friend bool operator==(const Architecture&, const Architecture&) = default;
};

/// Sum over layers of N_l (N_{l-1} + 1) with N_0 = d and N_L = 1.
std::size_t param_count(const Architecture& arch);

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// All trainable weights, stored flat: for each layer, W^l row-major then b^l.
class MlpParams {
public:
    MlpParams() = default;
    /// Zero-initialised parameters for `arch`.
    explicit MlpParams(Architecture arch);
    /// Adopts `values`; throws std::invalid_argument if the length is wrong.
    MlpParams(Architecture arch, std::vector<double> values);

    const Architecture& architecture() const { return arch_; }
    std::size_t size() const { return data_.size(); }

    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }

    Eigen::Map<RowMatrix> weights(int l);
    Eigen::Map<const RowMatrix> weights(int l) const;
    Eigen::Map<Eigen::VectorXd> bias(int l);
    Eigen::Map<const Eigen::VectorXd> bias(int l) const;

    std::size_t weight_offset(int l) const { return offsets_[static_cast<std::size_t>(l - 1)]; }
    std::size_t bias_offset(int l) const;

    void set_zero();
    bool all_finite() const;

    friend bool operator==(const MlpParams& a, const MlpParams& b) {
        return a.arch_ == b.arch_ && a.data_ == b.data_;
    }

private:
    Architecture arch_;
    std::vector<double> data_;
    std::vector<std::size_t> offsets_;
};

/// Glorot uniform weights, zero biases.
MlpParams glorot_init(const Architecture& arch, Rng& rng);

inline double glorot_bound(int fan_in, int fan_out) {
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

/// Value, gradient and pure second partials of a scalar field at one point.
struct InputJet {
    int dim = 0;
    double value = 0.0;
    std::array<double, kMaxDim> d1{};
    std::array<double, kMaxDim> d2{};

    static InputJet zero(int dim) {
        InputJet j;
        j.dim = dim;
        return j;
    }
    double laplacian() const;
    bool finite() const;
};

/// How much of the jet a kernel propagates.
enum class JetOrder { value = 0, first = 1, second = 2 };

inline int jet_blocks(JetOrder order, int dim) {
    return 1 + static_cast<int>(order) * dim;
}

double forward(const MlpParams& params, std::span<const double> x);
inline double forward(const MlpParams& params, const Point& p) { return forward(params, p.coords()); }

/// Propagates (z, dz/dx_i, d2z/dx_i^2) for each input direction. The value
/// component is bitwise equal to forward().
InputJet forward_jet(const MlpParams& params, std::span<const double> x, JetOrder order = JetOrder::second);
inline InputJet forward_jet(const MlpParams& params, const Point& p, JetOrder order = JetOrder::second) {
    return forward_jet(params, p.coords(), order);
}

/// Per-point loss term. Receives the network jet at points[index] and must
/// return the contribution to the scalar loss, writing d(contribution)/d(jet)
/// into `adjoint` (pre-zeroed, same dim). Components beyond the requested
/// JetOrder are ignored.
using PointLoss = std::function<double(std::size_t index, const InputJet& jet, InputJet& adjoint)>;

/// Loss sum_i PointLoss(i, jet(points[i])) and, if `gradient` is non-null, its
/// parameter gradient accumulated (+=) into *gradient.
///
/// Batched kernel: points are split into a fixed number of contiguous slots
/// that depends only on points.size(); slots run in parallel (OpenMP) and
/// their partial sums are reduced in slot order, so results do not depend on
/// the thread count.
double param_gradient(const MlpParams& params, std::span<const Point> points, JetOrder order,
                      const PointLoss& loss, MlpParams* gradient);

/// Network values at many points via the batched kernel.
std::vector<double> forward_batch(const MlpParams& params, std::span<const Point> points);

namespace reference {

/// Scalar per-point implementation of hpinn::param_gradient. Same contract,
/// strictly sequential summation in point order.
double param_gradient(const MlpParams& params, std::span<const Point> points, JetOrder order,
                      const PointLoss& loss, MlpParams* gradient);

}  // namespace reference

/// Binary blob: "HPINNMLP" magic, uint32 LE header length, JSON architecture
/// header, then param_count float64 values in little-endian order.
std::vector<unsigned char> serialize(const MlpParams& params);
MlpParams deserialize(std::span<const unsigned char> blob);
void save_params(const MlpParams& params, const std::string& path);
MlpParams load_params(const std::string& path);

}  // namespace hpinn
