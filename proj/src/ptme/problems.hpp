#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace ptme {

/// A parametric-task fitness function f(x, theta) on [0,1]^dx x [0,1]^dtheta
/// with values in [0,1]. Implementations are stateless after construction and
/// may be evaluated concurrently.
class Problem {
public:
    virtual ~Problem() = default;

    virtual std::string name() const = 0;
    virtual std::size_t solution_dim() const = 0;
    virtual std::size_t task_dim() const = 0;

    /// Throws InvalidArgument on a dimension mismatch.
    double evaluate(std::span<const double> x, std::span<const double> theta) const;

protected:
    virtual double fitness(const double* x, const double* theta) const = 0;
};

// --- 10-DoF planar arm -----------------------------------------------------

inline constexpr std::size_t kArmJoints = 10;

/// End effector of a planar chain rooted at the origin; joint angles are
/// relative and accumulate along the chain.
std::array<double, 2> arm_forward_kinematics(std::span<const double> angles, double segment_length);

/// Task (theta_alpha, theta_L): angular range 0.1 + theta_alpha*(pi - 0.1),
/// total length 0.5 + 0.5*theta_L. Fitness exp(-|ee - (0.5, 0.5)|^2).
double arm_fitness(std::span<const double> x, std::span<const double> theta);

class ArmProblem final : public Problem {
public:
    std::string name() const override { return "arm10"; }
    std::size_t solution_dim() const override { return kArmJoints; }
    std::size_t task_dim() const override { return 2; }

protected:
    double fitness(const double* x, const double* theta) const override;
};

// --- Archery ----------------------------------------------------------------

inline constexpr double kArcheryRingWidth = 0.061;
inline constexpr double kArcherySpeed = 70.0;
inline constexpr double kGravity = 9.81;

/// Squared miss distance in the target plane for a shot (yaw_n, pitch_n) at a
/// target (distance_n, wind_n), all normalized to [0,1].
double archery_miss(std::span<const double> x, std::span<const double> theta);

/// Ring count over ten: a miss below one ring width scores 1.0, each further
/// ring width loses 0.1, floored at 0.
double archery_score(double miss);

double archery_fitness(std::span<const double> x, std::span<const double> theta);

class ArcheryProblem final : public Problem {
public:
    std::string name() const override { return "archery"; }
    std::size_t solution_dim() const override { return 2; }
    std::size_t task_dim() const override { return 2; }

protected:
    double fitness(const double* x, const double* theta) const override;
};

// --- Linear toy (known optimum) ---------------------------------------------

/// f = exp(-|x - (A theta + b)|^2) with a seeded full-rank affine map whose
/// image of [0,1]^dtheta lies inside [0.1, 0.9]^dx.
class LinearToyProblem final : public Problem {
public:
    LinearToyProblem(std::uint64_t seed, std::size_t solution_dim = 3, std::size_t task_dim = 2);

    std::string name() const override;
    std::size_t solution_dim() const override { return static_cast<std::size_t>(offset_.size()); }
    std::size_t task_dim() const override { return static_cast<std::size_t>(map_.cols()); }

    Eigen::VectorXd optimum(std::span<const double> theta) const;
    const Eigen::MatrixXd& map() const { return map_; }
    const Eigen::VectorXd& offset() const { return offset_; }

protected:
    double fitness(const double* x, const double* theta) const override;

private:
    std::uint64_t seed_;
    Eigen::MatrixXd map_;
    Eigen::VectorXd offset_;
};

/// Parses `arm10`, `archery`, `linear_toy(seed)` or `linear_toy(seed,dx,dtheta)`.
std::shared_ptr<const Problem> make_problem(std::string_view spec);

}  // namespace ptme
