#include "ptme/problems.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <vector>

#include "ptme/error.hpp"
#include "ptme/rng.hpp"

namespace ptme {

double Problem::evaluate(std::span<const double> x, std::span<const double> theta) const {
    if (x.size() != solution_dim() || theta.size() != task_dim())
        throw InvalidArgument(name() + ": expected solution of size " + std::to_string(solution_dim()) +
                              " and task of size " + std::to_string(task_dim()));
    return fitness(x.data(), theta.data());
}

std::array<double, 2> arm_forward_kinematics(std::span<const double> angles, double segment_length) {
    double heading = 0.0;
    std::array<double, 2> pos{0.0, 0.0};
    for (double a : angles) {
        heading += a;
        pos[0] += segment_length * std::cos(heading);
        pos[1] += segment_length * std::sin(heading);
    }
    return pos;
}

double arm_fitness(std::span<const double> x, std::span<const double> theta) {
    if (x.size() != kArmJoints || theta.size() != 2)
        throw InvalidArgument("arm10: expected 10 joint commands and a 2-D task");
    const double alpha_max = 0.1 + theta[0] * (std::numbers::pi - 0.1);
    const double total_length = 0.5 + 0.5 * theta[1];
    std::array<double, kArmJoints> angles{};
    for (std::size_t i = 0; i < kArmJoints; ++i) angles[i] = (2.0 * x[i] - 1.0) * alpha_max;
    const auto ee = arm_forward_kinematics(angles, total_length / static_cast<double>(kArmJoints));
    const double dx = ee[0] - 0.5;
    const double dy = ee[1] - 0.5;
    return std::exp(-(dx * dx + dy * dy));
}

double ArmProblem::fitness(const double* x, const double* theta) const {
    return arm_fitness({x, kArmJoints}, {theta, 2});
}

double archery_miss(std::span<const double> x, std::span<const double> theta) {
    if (x.size() != 2 || theta.size() != 2)
        throw InvalidArgument("archery: expected a 2-D shot and a 2-D task");
    constexpr double kMaxAngle = std::numbers::pi / 12.0;
    const double distance = 5.0 + 35.0 * theta[0];
    const double wind = -10.0 + 20.0 * theta[1];
    const double yaw = (2.0 * x[0] - 1.0) * kMaxAngle;
    const double pitch = (2.0 * x[1] - 1.0) * kMaxAngle;

    const double vx = -std::sin(yaw) * kArcherySpeed;
    const double vy = std::cos(yaw) * std::cos(pitch) * kArcherySpeed;
    const double vz = std::cos(yaw) * std::sin(pitch) * kArcherySpeed;
    const double t = distance / vy;  // vy > 0 for |yaw|, |pitch| <= pi/12

    const double lateral = 0.5 * wind * t * t + vx * t;
    const double vertical = -0.5 * kGravity * t * t + vz * t;
    return lateral * lateral + vertical * vertical;
}

double archery_score(double miss) {
    const double rings = std::floor(miss / kArcheryRingWidth);
    if (!(rings < 10.0)) return 0.0;
    return (10.0 - rings) / 10.0;
}

double archery_fitness(std::span<const double> x, std::span<const double> theta) {
    return archery_score(archery_miss(x, theta));
}

double ArcheryProblem::fitness(const double* x, const double* theta) const {
    return archery_fitness({x, 2}, {theta, 2});
}

LinearToyProblem::LinearToyProblem(std::uint64_t seed, std::size_t solution_dim, std::size_t task_dim)
    : seed_(seed) {
    if (solution_dim == 0 || task_dim == 0)
        throw InvalidArgument("linear_toy: dimensions must be positive");
    const auto rows = static_cast<Eigen::Index>(solution_dim);
    const auto cols = static_cast<Eigen::Index>(task_dim);
    constexpr double kRowSpan = 0.6;  // image width per coordinate, inside [0.1, 0.9]
    Rng rng(seed);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    for (int attempt = 0;; ++attempt) {
        map_.resize(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i) {
            for (Eigen::Index j = 0; j < cols; ++j) map_(i, j) = coeff(rng);
            map_.row(i) *= kRowSpan / map_.row(i).cwiseAbs().sum();
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(map_);
        if (lu.rank() == std::min(rows, cols)) break;
        if (attempt > 100) throw NumericalFailure("linear_toy: could not draw a full-rank map");
    }
    offset_.resize(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const double lowest = map_.row(i).cwiseMin(0.0).sum();
        offset_(i) = 0.1 + uniform01(rng) * (0.8 - kRowSpan) - lowest;
    }
}

std::string LinearToyProblem::name() const {
    if (solution_dim() == 3 && task_dim() == 2) return "linear_toy(" + std::to_string(seed_) + ")";
    return "linear_toy(" + std::to_string(seed_) + "," + std::to_string(solution_dim()) + "," +
           std::to_string(task_dim()) + ")";
}

Eigen::VectorXd LinearToyProblem::optimum(std::span<const double> theta) const {
    if (theta.size() != task_dim()) throw InvalidArgument("linear_toy: task dimension mismatch");
    const Eigen::Map<const Eigen::VectorXd> t(theta.data(), static_cast<Eigen::Index>(theta.size()));
    return map_ * t + offset_;
}

double LinearToyProblem::fitness(const double* x, const double* theta) const {
    const Eigen::Map<const Eigen::VectorXd> xs(x, offset_.size());
    const Eigen::Map<const Eigen::VectorXd> t(theta, map_.cols());
    return std::exp(-(xs - (map_ * t + offset_)).squaredNorm());
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::uint64_t parse_uint(std::string_view s, std::string_view what) {
    s = trim(s);
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw InvalidArgument("problem: invalid " + std::string(what) + " '" + std::string(s) + "'");
    return value;
}

}  // namespace

std::shared_ptr<const Problem> make_problem(std::string_view spec) {
    spec = trim(spec);
    if (spec == "arm10") return std::make_shared<ArmProblem>();
    if (spec == "archery") return std::make_shared<ArcheryProblem>();
    constexpr std::string_view kToy = "linear_toy";
    if (spec.substr(0, kToy.size()) == kToy) {
        std::string_view rest = trim(spec.substr(kToy.size()));
        if (rest.empty()) return std::make_shared<LinearToyProblem>(0);
        if (rest.front() != '(' || rest.back() != ')')
            throw InvalidArgument("problem: expected linear_toy(seed[,dx,dtheta]), got '" + std::string(spec) + "'");
        rest = rest.substr(1, rest.size() - 2);
        std::vector<std::string_view> args;
        while (true) {
            const auto comma = rest.find(',');
            args.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (args.size() == 1) return std::make_shared<LinearToyProblem>(parse_uint(args[0], "seed"));
        if (args.size() == 3)
            return std::make_shared<LinearToyProblem>(parse_uint(args[0], "seed"), parse_uint(args[1], "dx"),
                                                      parse_uint(args[2], "dtheta"));
        throw InvalidArgument("problem: linear_toy takes 1 or 3 arguments");
    }
    throw InvalidArgument("problem: unknown problem '" + std::string(spec) + "' (expected arm10, archery, linear_toy(seed))");
}

}  // namespace ptme
