#include "ptme/variation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ptme/error.hpp"
#include "ptme/kdtree.hpp"

namespace ptme {

double sbx_spread(double u, double eta) {
    const double exponent = 1.0 / (eta + 1.0);
    if (u <= 0.5) return std::pow(2.0 * u, exponent);
    return std::pow(1.0 / (2.0 * (1.0 - u)), exponent);
}

double sbx_child(double p1, double p2, double eta, double u, bool mirror) {
    const double beta = sbx_spread(u, eta);
    // 0.5*((1+b)p1 + (1-b)p2) written around the midpoint so equal parents
    // reproduce exactly.
    const double half_gap = 0.5 * beta * (p1 - p2);
    const double mid = 0.5 * (p1 + p2);
    return mirror ? mid - half_gap : mid + half_gap;
}

std::vector<double> sbx_crossover(std::span<const double> p1, std::span<const double> p2, double eta, Rng& rng) {
    if (p1.size() != p2.size()) throw InvalidArgument("sbx: parents differ in dimension");
    std::vector<double> child(p1.size());
    for (std::size_t i = 0; i < p1.size(); ++i) {
        const double u = uniform01(rng);
        const bool mirror = uniform01(rng) < 0.5;
        child[i] = std::clamp(sbx_child(p1[i], p2[i], eta, u, mirror), 0.0, 1.0);
    }
    return child;
}

std::size_t closest_candidate(std::span<const double> candidates, std::span<const double> reference) {
    const std::size_t dim = reference.size();
    if (dim == 0 || candidates.empty() || candidates.size() % dim != 0)
        throw InvalidArgument("tournament: candidate array does not match the task dimension");
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i * dim < candidates.size(); ++i) {
        const double d2 = squared_distance(candidates.data() + i * dim, reference.data(), dim);
        if (d2 < best_d2) {
            best_d2 = d2;
            best = i;
        }
    }
    return best;
}

std::vector<double> tournament_select_task(std::span<const double> reference, std::size_t size, Rng& rng) {
    if (size == 0) throw InvalidArgument("tournament: size must be at least 1");
    const std::size_t dim = reference.size();
    std::vector<double> candidates(size * dim);
    for (double& v : candidates) v = uniform01(rng);
    const std::size_t winner = closest_candidate(candidates, reference);
    return {candidates.begin() + static_cast<std::ptrdiff_t>(winner * dim),
            candidates.begin() + static_cast<std::ptrdiff_t>((winner + 1) * dim)};
}

BanditState::BanditState(std::vector<std::uint32_t> sizes)
    : sizes_(std::move(sizes)), selected_(sizes_.size(), 0), successes_(sizes_.size(), 0) {
    if (sizes_.empty()) throw InvalidArgument("bandit: at least one tournament size is required");
    for (std::size_t i = 0; i < sizes_.size(); ++i) {
        if (sizes_[i] == 0) throw InvalidArgument("bandit: tournament sizes must be positive");
        for (std::size_t j = 0; j < i; ++j)
            if (sizes_[j] == sizes_[i]) throw InvalidArgument("bandit: duplicate tournament size");
    }
}

std::size_t BanditState::arm_of(std::uint32_t size) const {
    const auto it = std::find(sizes_.begin(), sizes_.end(), size);
    if (it == sizes_.end()) throw InvalidArgument("bandit: unknown tournament size " + std::to_string(size));
    return static_cast<std::size_t>(it - sizes_.begin());
}

double BanditState::score(std::size_t arm) const {
    std::uint64_t total = 0;
    for (auto s : selected_) total += s;
    const auto pulls = static_cast<double>(selected_[arm]);
    return static_cast<double>(successes_[arm]) / pulls +
           std::sqrt(2.0 * std::log(static_cast<double>(total)) / pulls);
}

std::uint32_t BanditState::select() const {
    for (std::size_t j = 0; j < sizes_.size(); ++j)
        if (selected_[j] == 0) return sizes_[j];
    std::size_t best = 0;
    double best_score = score(0);
    for (std::size_t j = 1; j < sizes_.size(); ++j) {
        const double s = score(j);
        if (s > best_score) {
            best_score = s;
            best = j;
        }
    }
    return sizes_[best];
}

void BanditState::update(std::uint32_t size, bool success) {
    const std::size_t arm = arm_of(size);
    ++selected_[arm];
    if (success) ++successes_[arm];
}

Eigen::VectorXd LocalLinearModel::predict(std::span<const double> theta) const {
    const auto dim = coefficients.rows() - 1;
    if (static_cast<Eigen::Index>(theta.size()) != dim)
        throw InvalidArgument("regression: task dimension mismatch");
    Eigen::VectorXd augmented(dim + 1);
    for (Eigen::Index j = 0; j < dim; ++j) augmented(j) = theta[static_cast<std::size_t>(j)];
    augmented(dim) = 1.0;
    return coefficients.transpose() * augmented;
}

LocalLinearModel fit_local_linear(std::span<const double> thetas, std::span<const double> solutions,
                                  std::size_t task_dim, std::size_t solution_dim) {
    const std::size_t k = task_dim == 0 ? 0 : thetas.size() / task_dim;
    if (k == 0 || thetas.size() != k * task_dim || solutions.size() != k * solution_dim)
        throw InvalidArgument("regression: inconsistent neighbourhood arrays");
    const auto rows = static_cast<Eigen::Index>(k);
    const auto p = static_cast<Eigen::Index>(task_dim + 1);
    const auto q = static_cast<Eigen::Index>(solution_dim);

    Eigen::MatrixXd design(rows, p);
    Eigen::MatrixXd targets(rows, q);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j + 1 < p; ++j)
            design(i, j) = thetas[static_cast<std::size_t>(i) * task_dim + static_cast<std::size_t>(j)];
        design(i, p - 1) = 1.0;
        for (Eigen::Index j = 0; j < q; ++j)
            targets(i, j) = solutions[static_cast<std::size_t>(i) * solution_dim + static_cast<std::size_t>(j)];
    }

    Eigen::MatrixXd normal = design.transpose() * design;
    normal.diagonal().array() += kRidge;
    LocalLinearModel model;
    model.coefficients = normal.ldlt().solve(design.transpose() * targets);
    const Eigen::RowVectorXd mean = targets.colwise().mean();
    model.variance = (targets.rowwise() - mean).array().square().colwise().mean().transpose();
    return model;
}

std::vector<double> local_linear_candidate(const Archive& archive, std::span<const double> theta,
                                           double sigma_reg, Rng& rng) {
    const Tessellation& tess = archive.tessellation();
    const std::size_t dx = archive.solution_dim();
    const std::size_t dt = archive.task_dim();
    const std::size_t cell = tess.nearest_cell(theta);

    std::vector<double> thetas;
    std::vector<double> solutions;
    auto gather = [&](std::size_t c) {
        if (!archive.filled(c)) return;
        const auto t = archive.theta(c);
        const auto x = archive.solution(c);
        thetas.insert(thetas.end(), t.begin(), t.end());
        solutions.insert(solutions.end(), x.begin(), x.end());
    };
    gather(cell);
    if (tess.has_adjacency())
        for (std::uint32_t n : tess.neighbors(cell)) gather(n);

    std::vector<double> out(dx);
    if (thetas.size() < 2 * dt) {
        for (double& v : out) v = uniform01(rng);
        return out;
    }
    const LocalLinearModel model = fit_local_linear(thetas, solutions, dt, dx);
    const Eigen::VectorXd mean = model.predict(theta);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t j = 0; j < dx; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        const double noise = sigma_reg * std::sqrt(model.variance(jj)) * gauss(rng);
        out[j] = std::clamp(mean(jj) + noise, 0.0, 1.0);
    }
    return out;
}

}  // namespace ptme
