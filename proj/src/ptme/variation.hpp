#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ptme/archive.hpp"
#include "ptme/rng.hpp"

namespace ptme {

// --- SBX ---------------------------------------------------------------------

/// Spread factor of simulated binary crossover for a uniform draw u in [0,1).
double sbx_spread(double u, double eta);

/// One coordinate of an SBX child before clipping; `mirror` picks the child
/// centred on p2 instead of p1.
double sbx_child(double p1, double p2, double eta, double u, bool mirror);

/// Single offspring of p1 and p2 with distribution index eta, clipped to [0,1].
std::vector<double> sbx_crossover(std::span<const double> p1, std::span<const double> p2, double eta,
                                  Rng& rng);

// --- task tournament ------------------------------------------------------------

/// Index of the candidate closest to `reference` (first wins ties).
/// `candidates` is row-major with reference.size() columns.
std::size_t closest_candidate(std::span<const double> candidates, std::span<const double> reference);

/// Draws `size` uniform tasks and keeps the one nearest `reference`.
std::vector<double> tournament_select_task(std::span<const double> reference, std::size_t size, Rng& rng);

// --- UCB1 bandit over tournament sizes --------------------------------------

class BanditState {
public:
    explicit BanditState(std::vector<std::uint32_t> sizes);

    /// Round-robin over arms that were never pulled, then the UCB1 argmax
    /// (ties to the lowest index).
    std::uint32_t select() const;

    /// Counts one pull of `size`, and one success when `success` is set.
    /// Throws InvalidArgument for a size outside the arm list.
    void update(std::uint32_t size, bool success);

    double score(std::size_t arm) const;

    const std::vector<std::uint32_t>& sizes() const { return sizes_; }
    const std::vector<std::uint64_t>& selected() const { return selected_; }
    const std::vector<std::uint64_t>& successes() const { return successes_; }

private:
    std::size_t arm_of(std::uint32_t size) const;

    std::vector<std::uint32_t> sizes_;
    std::vector<std::uint64_t> selected_;
    std::vector<std::uint64_t> successes_;
};

// --- local linear regression ------------------------------------------------------

inline constexpr double kRidge = 1e-8;

/// Affine least-squares map from task to solution over a neighbourhood,
/// plus the per-coordinate population variance of the solutions.
struct LocalLinearModel {
    Eigen::MatrixXd coefficients;  // (dtheta + 1) x dx, last row is the intercept
    Eigen::VectorXd variance;      // dx

    Eigen::VectorXd predict(std::span<const double> theta) const;
};

/// `thetas` is k x dtheta, `solutions` k x dx, both row-major.
LocalLinearModel fit_local_linear(std::span<const double> thetas, std::span<const double> solutions,
                                  std::size_t task_dim, std::size_t solution_dim);

/// Regression candidate for task `theta`: fits the elites of theta's cell and
/// its adjacent cells, predicts, adds sigma_reg-scaled Gaussian noise with the
/// neighbourhood's per-coordinate variance, and clips to [0,1]. Falls back to
/// a uniform solution when fewer than two elites are available.
std::vector<double> local_linear_candidate(const Archive& archive, std::span<const double> theta,
                                           double sigma_reg, Rng& rng);

}  // namespace ptme
