#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hpinn/net.hpp"
#include "hpinn/problem.hpp"
#include "hpinn/rng.hpp"

namespace hpinn {

/// One point of the search space, displayed as [alpha, depth, width, activation, w_Gamma].
struct HyperParams {
    double learning_rate = 1e-3;
    int depth = 4;  ///< number of hidden layers, L - 1
    int width = 50;
    Activation activation = Activation::sin;
    std::optional<double> boundary_weight;

    Architecture architecture(int input_dim) const {
        return Architecture::constant_width(input_dim, depth, width, activation);
    }
    std::string to_string() const;

    friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

struct RealRange {
    double lo = 0.0;
    double hi = 1.0;
    bool log_scale = false;
};

struct IntRange {
    int lo = 1;
    int hi = 1;
};

/// One-hot order of the activation block.
inline constexpr std::array<Activation, 3> kActivationOrder = {Activation::sin, Activation::sigmoid, Activation::tanh};

struct SearchSpace {
    RealRange learning_rate{1e-4, 5e-2, true};
    IntRange depth{1, 10};
    IntRange width{5, 500};
    std::optional<RealRange> boundary_weight;

    /// Dirichlet ranges; no boundary weight.
    static SearchSpace dirichlet();
    /// Neumann ranges with w_Gamma in [1, 1e7] (log scale).
    static SearchSpace neumann();
    static SearchSpace for_case(CaseKind kind) {
        return kind == CaseKind::dirichlet2d ? dirichlet() : neumann();
    }

    /// 3 + 3 (Dirichlet) or 4 + 3 (with boundary weight).
    int encoded_dim() const { return boundary_weight ? 7 : 6; }
    /// Throws std::invalid_argument for empty or non-positive log ranges.
    void validate() const;
    bool contains(const HyperParams& hp) const;
};

/// Encoded layout: [alpha, depth, width, (w_Gamma), onehot(sin, sigmoid, tanh)],
/// continuous components in [0,1] (log10 first where flagged). Throws
/// std::out_of_range when hp lies outside the space.
std::vector<double> encode(const HyperParams& hp, const SearchSpace& space);

/// Inverse of encode. Integers are rounded half away from zero and clamped;
/// the activation is the largest one-hot component, ties to the first.
HyperParams decode(std::span<const double> encoded, const SearchSpace& space);

/// Index of the largest component; earliest index wins ties.
std::size_t decode_categorical(std::span<const double> block);

/// Uniform over the space (log-uniform on log-scaled ranges, uniform integers
/// and categories).
HyperParams sample_uniform(const SearchSpace& space, Rng& rng);

}  // namespace hpinn
