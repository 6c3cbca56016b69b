#include "hpinn/sampling.hpp"

#include <cmath>
#include <stdexcept>

#include "hpinn/csv.hpp"

namespace hpinn {

int points_per_dim(double r, int omega) {
    if (!(r > 0.0) || omega < 1) throw std::invalid_argument("points_per_dim needs r > 0 and omega >= 1");
    return static_cast<int>(std::lround(r * static_cast<double>(omega)));
}

double precision_of(int nx, int omega) {
    if (nx < 1 || omega < 1) throw std::invalid_argument("precision_of needs n_x >= 1 and omega >= 1");
    return std::round(10.0 * static_cast<double>(nx) / static_cast<double>(omega)) / 10.0;
}

LevelSize level_size(int level) {
    if (level != 1 && level != 3 && level != 5) throw std::invalid_argument("supported levels are 1, 3 and 5");
    const int n = 10 * (1 << (level - 1));
    return {n, static_cast<std::size_t>(n) * static_cast<std::size_t>(n)};
}

std::vector<Point> sample_domain(std::size_t count, int dim, Rng& rng) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("dimension must be in [1, 3]");
    std::vector<Point> pts(count);
    for (auto& p : pts) {
        p.dim = dim;
        for (int i = 0; i < dim; ++i) p[i] = rng.uniform_open();
    }
    return pts;
}

std::vector<BoundaryPoint> sample_boundary(std::size_t count, int dim, Rng& rng) {
    if (dim != 2 && dim != 3) throw std::invalid_argument("boundary sampling supports d = 2 or 3");
    // All 2d faces of the unit cube have unit area.
    std::vector<BoundaryPoint> pts(count);
    for (auto& bp : pts) {
        const auto face = static_cast<int>(rng.below(static_cast<std::uint64_t>(2 * dim)));
        const int axis = face / 2;
        const int side = face % 2;
        bp.x.dim = dim;
        bp.normal.dim = dim;
        for (int i = 0; i < dim; ++i) bp.x[i] = i == axis ? static_cast<double>(side) : rng.uniform_open();
        bp.normal[axis] = side == 1 ? 1.0 : -1.0;
    }
    return pts;
}

std::string_view to_string(BoundaryCountMode m) { return m == BoundaryCountMode::formula ? "formula" : "paper16"; }

BoundaryCountMode parse_boundary_count_mode(std::string_view name) {
    if (name == "formula") return BoundaryCountMode::formula;
    if (name == "paper16") return BoundaryCountMode::paper16;
    throw std::invalid_argument("unknown boundary count mode '" + std::string(name) + "'");
}

std::size_t neumann_boundary_count(int dim, int nx, BoundaryCountMode mode) {
    if (dim < 1 || nx < 1) throw std::invalid_argument("boundary count needs d >= 1 and n_x >= 1");
    const auto n = static_cast<std::size_t>(nx);
    if (mode == BoundaryCountMode::paper16) {
        if (dim != 3) throw std::invalid_argument("the 16 n_x^2 count is defined for d = 3 only");
        return 16 * n * n;
    }
    std::size_t power = 1;
    for (int i = 0; i < dim - 1; ++i) power *= n;
    return (std::size_t{1} << (dim - 1)) * static_cast<std::size_t>(dim) * power;
}

CollocationSet build_collocation(const ProblemSpec& spec, const SamplingPlan& plan, Rng& rng) {
    CollocationSet sets;
    const int nx_train = plan.level ? level_size(*plan.level).n : points_per_dim(plan.r_train, spec.omega);
    const auto sq = [](int n) { return static_cast<std::size_t>(n) * static_cast<std::size_t>(n); };

    if (spec.dim == 3) {
        sets.domain_train = sample_domain(sq(nx_train), 3, rng);
        sets.boundary_train = sample_boundary(neumann_boundary_count(3, nx_train, plan.boundary_mode), 3, rng);
        sets.domain_test = sets.domain_train;
        sets.boundary_test = sets.boundary_train;
        return sets;
    }

    const int nx_test = points_per_dim(plan.r_test, spec.omega);
    sets.domain_train = sample_domain(sq(nx_train), spec.dim, rng);
    if (spec.has_boundary_term())
        sets.boundary_train = sample_boundary(neumann_boundary_count(spec.dim, nx_train, BoundaryCountMode::formula), spec.dim, rng);
    sets.domain_test = sample_domain(sq(nx_test), spec.dim, rng);
    if (spec.has_boundary_term())
        sets.boundary_test = sample_boundary(neumann_boundary_count(spec.dim, nx_test, BoundaryCountMode::formula), spec.dim, rng);
    return sets;
}

namespace {

std::vector<std::string> coord_header(int dim, const char* prefix) {
    std::vector<std::string> h;
    for (int i = 0; i < dim; ++i) h.push_back(prefix + std::to_string(i));
    return h;
}

}  // namespace

void write_points_csv(const std::string& path, const std::vector<Point>& points) {
    const int dim = points.empty() ? 2 : points.front().dim;
    CsvWriter csv(path, coord_header(dim, "x"));
    for (const auto& p : points) {
        for (int i = 0; i < dim; ++i) csv.cell(p[i]);
        csv.end_row();
    }
}

void write_points_csv(const std::string& path, const std::vector<BoundaryPoint>& points) {
    const int dim = points.empty() ? 2 : points.front().x.dim;
    auto header = coord_header(dim, "x");
    for (auto& h : coord_header(dim, "n")) header.push_back(h);
    CsvWriter csv(path, header);
    for (const auto& p : points) {
        for (int i = 0; i < dim; ++i) csv.cell(p.x[i]);
        for (int i = 0; i < dim; ++i) csv.cell(p.normal[i]);
        csv.end_row();
    }
}

}  // namespace hpinn
