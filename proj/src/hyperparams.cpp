#include "hpinn/hyperparams.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hpinn/csv.hpp"

namespace hpinn {

namespace {

double to_unit(double v, const RealRange& r) {
    if (r.log_scale) return (std::log10(v) - std::log10(r.lo)) / (std::log10(r.hi) - std::log10(r.lo));
    return (v - r.lo) / (r.hi - r.lo);
}

double from_unit(double u, const RealRange& r) {
    u = std::clamp(u, 0.0, 1.0);
    if (r.log_scale) {
        const double lo = std::log10(r.lo), hi = std::log10(r.hi);
        return std::clamp(std::pow(10.0, lo + u * (hi - lo)), r.lo, r.hi);
    }
    return r.lo + u * (r.hi - r.lo);
}

double int_to_unit(int v, const IntRange& r) {
    return r.hi == r.lo ? 0.0 : static_cast<double>(v - r.lo) / static_cast<double>(r.hi - r.lo);
}

int int_from_unit(double u, const IntRange& r) {
    const double v = static_cast<double>(r.lo) + std::clamp(u, 0.0, 1.0) * static_cast<double>(r.hi - r.lo);
    return std::clamp(static_cast<int>(std::lround(v)), r.lo, r.hi);
}

bool in_range(double v, const RealRange& r) { return v >= r.lo && v <= r.hi; }

}  // namespace

std::string HyperParams::to_string() const {
    std::ostringstream os;
    os << '[' << format_double(learning_rate) << ", " << depth << ", " << width << ", " << hpinn::to_string(activation);
    if (boundary_weight) os << ", " << format_double(*boundary_weight);
    os << ']';
    return os.str();
}

SearchSpace SearchSpace::dirichlet() { return SearchSpace{{1e-4, 5e-2, true}, {1, 10}, {5, 500}, std::nullopt}; }

SearchSpace SearchSpace::neumann() {
    return SearchSpace{{1e-5, 5e-2, true}, {1, 5}, {5, 500}, RealRange{1.0, 1e7, true}};
}

void SearchSpace::validate() const {
    auto check = [](const RealRange& r, const char* name) {
        if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi) || (r.log_scale && r.lo <= 0.0))
            throw std::invalid_argument(std::string("invalid range for ") + name);
    };
    check(learning_rate, "learning_rate");
    if (boundary_weight) check(*boundary_weight, "boundary_weight");
    if (depth.lo < 1 || depth.lo > depth.hi) throw std::invalid_argument("invalid range for depth");
    if (width.lo < 1 || width.lo > width.hi) throw std::invalid_argument("invalid range for width");
}

bool SearchSpace::contains(const HyperParams& hp) const {
    if (!in_range(hp.learning_rate, learning_rate)) return false;
    if (hp.depth < depth.lo || hp.depth > depth.hi) return false;
    if (hp.width < width.lo || hp.width > width.hi) return false;
    if (boundary_weight.has_value() != hp.boundary_weight.has_value()) return false;
    if (boundary_weight && !in_range(*hp.boundary_weight, *boundary_weight)) return false;
    return true;
}

std::vector<double> encode(const HyperParams& hp, const SearchSpace& space) {
    if (!space.contains(hp)) throw std::out_of_range("hyper-parameters " + hp.to_string() + " lie outside the search space");
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(space.encoded_dim()));
    v.push_back(to_unit(hp.learning_rate, space.learning_rate));
    v.push_back(int_to_unit(hp.depth, space.depth));
    v.push_back(int_to_unit(hp.width, space.width));
    if (space.boundary_weight) v.push_back(to_unit(*hp.boundary_weight, *space.boundary_weight));
    for (const Activation a : kActivationOrder) v.push_back(a == hp.activation ? 1.0 : 0.0);
    return v;
}

std::size_t decode_categorical(std::span<const double> block) {
    if (block.empty()) throw std::invalid_argument("empty categorical block");
    std::size_t best = 0;
    for (std::size_t i = 1; i < block.size(); ++i)
        if (block[i] > block[best]) best = i;
    return best;
}

HyperParams decode(std::span<const double> encoded, const SearchSpace& space) {
    if (static_cast<int>(encoded.size()) != space.encoded_dim())
        throw std::invalid_argument("encoded vector has the wrong dimension");
    HyperParams hp;
    hp.learning_rate = from_unit(encoded[0], space.learning_rate);
    hp.depth = int_from_unit(encoded[1], space.depth);
    hp.width = int_from_unit(encoded[2], space.width);
    std::size_t next = 3;
    if (space.boundary_weight) hp.boundary_weight = from_unit(encoded[next++], *space.boundary_weight);
    hp.activation = kActivationOrder[decode_categorical(encoded.subspan(next, kActivationOrder.size()))];
    return hp;
}

HyperParams sample_uniform(const SearchSpace& space, Rng& rng) {
    HyperParams hp;
    hp.learning_rate = from_unit(rng.uniform(), space.learning_rate);
    hp.depth = space.depth.lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(space.depth.hi - space.depth.lo + 1)));
    hp.width = space.width.lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(space.width.hi - space.width.lo + 1)));
    hp.activation = kActivationOrder[rng.below(kActivationOrder.size())];
    if (space.boundary_weight) hp.boundary_weight = from_unit(rng.uniform(), *space.boundary_weight);
    return hp;
}

}  // namespace hpinn
