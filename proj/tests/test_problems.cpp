#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ptme/error.hpp"
#include "ptme/problems.hpp"
#include "ptme/rng.hpp"

using namespace ptme;
using std::numbers::pi;

namespace {

// Hand-written ballistics: target-plane offset of a shot, squared.
double ballistic_miss(double yaw_n, double pitch_n, double dist_n, double wind_n) {
    const double d = 5 + 35 * dist_n, w = -10 + 20 * wind_n;
    const double yaw = (2 * yaw_n - 1) * pi / 12, pitch = (2 * pitch_n - 1) * pi / 12;
    const double vx = 70 * -std::sin(yaw), vy = 70 * std::cos(yaw) * std::cos(pitch),
                 vz = 70 * std::cos(yaw) * std::sin(pitch);
    const double t = d / vy;
    const double dx = 0.5 * w * t * t + vx * t, dz = -0.5 * 9.81 * t * t + vz * t;
    return dx * dx + dz * dz;
}

}  // namespace

TEST_CASE("straight arm reaches its full length") {
    const std::vector<double> x(10, 0.5);
    for (double ta : {0.0, 0.3, 1.0}) {
        CHECK(arm_fitness(x, std::vector<double>{ta, 1.0}) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
        CHECK(arm_fitness(x, std::vector<double>{ta, 0.0}) == doctest::Approx(std::exp(-0.25)).epsilon(1e-12));
    }
}

TEST_CASE("forward kinematics examples") {
    std::vector<double> angles(10, 0.0);
    auto p = arm_forward_kinematics(angles, 0.1);
    CHECK(p[0] == doctest::Approx(1.0));
    CHECK(p[1] == doctest::Approx(0.0));

    angles[0] = pi / 2;
    p = arm_forward_kinematics(angles, 0.1);
    CHECK(p[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(1.0));

    // Relative angles +90, -90, ... draw a staircase up then right.
    for (std::size_t i = 0; i < 10; ++i) angles[i] = i % 2 == 0 ? pi / 2 : -pi / 2;
    p = arm_forward_kinematics(angles, 0.1);
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(p[1] == doctest::Approx(0.5));
}

TEST_CASE("arm joint commands span the angular range") {
    // x = 1 on the first joint, 0.5 elsewhere: the chain bends by alpha_max at the base.
    std::vector<double> x(10, 0.5);
    x[0] = 1.0;
    const double alpha = 0.1 + 0.4 * (pi - 0.1), length = 0.5 + 0.5 * 0.6;
    const double ex = length * std::cos(alpha), ey = length * std::sin(alpha);
    const double want = std::exp(-((ex - 0.5) * (ex - 0.5) + (ey - 0.5) * (ey - 0.5)));
    CHECK(arm_fitness(x, std::vector<double>{0.4, 0.6}) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("archery miss matches hand ballistics") {
    Rng rng(12);
    for (int i = 0; i < 2000; ++i) {
        const double a = uniform01(rng), b = uniform01(rng), c = uniform01(rng), d = uniform01(rng);
        CHECK(archery_miss(std::vector<double>{a, b}, std::vector<double>{c, d}) ==
              doctest::Approx(ballistic_miss(a, b, c, d)).epsilon(1e-12));
    }
}

TEST_CASE("archery examples") {
    // 5 m, no wind, level shot: the arrow drops 2.5 cm; squared miss 6.26e-4.
    const double miss = archery_miss(std::vector<double>{0.5, 0.5}, std::vector<double>{0.0, 0.5});
    CHECK(miss == doctest::Approx(0.025026 * 0.025026).epsilon(1e-4));
    CHECK(archery_fitness(std::vector<double>{0.5, 0.5}, std::vector<double>{0.0, 0.5}) == 1.0);
    // 40 m, no wind, pitched fully down: gross miss.
    CHECK(std::sqrt(archery_miss(std::vector<double>{0.5, 0.0}, std::vector<double>{1.0, 0.5})) > 12.0);
    CHECK(archery_fitness(std::vector<double>{0.5, 0.0}, std::vector<double>{1.0, 0.5}) == 0.0);
}

TEST_CASE("archery score steps at each ring width") {
    CHECK(archery_score(0.0) == 1.0);
    for (int k = 1; k <= 10; ++k) {
        const double edge = k * kArcheryRingWidth;
        CHECK(archery_score(edge * (1 - 1e-9)) == doctest::Approx((11 - k) / 10.0));
        CHECK(archery_score(edge * (1 + 1e-9)) == doctest::Approx((10 - k) / 10.0));
    }
    CHECK(archery_score(100.0) == 0.0);
}

TEST_CASE("fitness values are bounded and deterministic") {
    Rng rng(99);
    const std::shared_ptr<const Problem> problems[] = {make_problem("arm10"), make_problem("archery"),
                                                       make_problem("linear_toy(3)")};
    for (const auto& p : problems) {
        std::vector<double> x(p->solution_dim()), t(p->task_dim());
        for (int i = 0; i < 100000 / 3; ++i) {
            for (auto& v : x) v = uniform01(rng);
            for (auto& v : t) v = uniform01(rng);
            const double f = p->evaluate(x, t);
            REQUIRE(f >= 0.0);
            REQUIRE(f <= 1.0);
            if (p->name() == "archery") {
                REQUIRE(std::abs(f * 10 - std::round(f * 10)) < 1e-12);
            }
            if (p->name() == "arm10") REQUIRE(f > 0.0);
            if (i % 1000 == 0) REQUIRE(p->evaluate(x, t) == f);
        }
    }
}

TEST_CASE("linear toy optimum lies inside the cube") {
    const LinearToyProblem toy(5);
    CHECK(toy.solution_dim() == 3);
    CHECK(toy.task_dim() == 2);
    Rng rng(1);
    for (int i = 0; i < 100; ++i) {
        const std::vector<double> theta{uniform01(rng), uniform01(rng)};
        const Eigen::VectorXd opt = toy.optimum(theta);
        CHECK(toy.evaluate(std::vector<double>(opt.data(), opt.data() + 3), theta) == doctest::Approx(1.0));
    }
    // The image of every corner stays in [0.1, 0.9].
    for (double a : {0.0, 1.0})
        for (double b : {0.0, 1.0}) {
            const Eigen::VectorXd opt = toy.optimum(std::vector<double>{a, b});
            for (Eigen::Index j = 0; j < opt.size(); ++j) {
                CHECK(opt[j] >= 0.1 - 1e-12);
                CHECK(opt[j] <= 0.9 + 1e-12);
            }
        }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(toy.map());
    CHECK(lu.rank() == 2);
}

TEST_CASE("linear toy fitness falls off as a Gaussian") {
    const LinearToyProblem toy(2, 1, 1);
    const std::vector<double> theta{0.5};
    const double opt = toy.optimum(theta)[0];
    CHECK(toy.evaluate(std::vector<double>{opt}, theta) == doctest::Approx(1.0));
    const double moved = opt > 0.5 ? opt - 0.5 : opt + 0.5;
    CHECK(toy.evaluate(std::vector<double>{moved}, theta) == doctest::Approx(std::exp(-0.25)));
}

TEST_CASE("linear toy maps depend on the seed only") {
    CHECK(LinearToyProblem(7).map() == LinearToyProblem(7).map());
    CHECK(LinearToyProblem(7).offset() == LinearToyProblem(7).offset());
    CHECK(LinearToyProblem(7).map() != LinearToyProblem(8).map());
}

TEST_CASE("problems are created by name") {
    CHECK(make_problem("arm10")->name() == "arm10");
    CHECK(make_problem("archery")->name() == "archery");
    CHECK(make_problem("linear_toy(4)")->name() == "linear_toy(4)");
    CHECK(make_problem("linear_toy")->name() == "linear_toy(0)");
    auto big = make_problem("linear_toy(4,5,3)");
    CHECK(big->solution_dim() == 5);
    CHECK(big->task_dim() == 3);
    CHECK(make_problem("linear_toy(4, 5, 3)")->name() == big->name());
    for (const char* bad : {"", "arm", "linear_toy()", "linear_toy(x)", "linear_toy(1,0,2)", "linear_toy(1"})
        CHECK_THROWS_AS(make_problem(bad), InvalidArgument);
}

TEST_CASE("evaluate rejects dimension mismatches") {
    const ArmProblem arm;
    CHECK_THROWS_AS(arm.evaluate(std::vector<double>(9, 0.5), std::vector<double>{0.5, 0.5}), InvalidArgument);
    CHECK_THROWS_AS(arm.evaluate(std::vector<double>(10, 0.5), std::vector<double>{0.5}), InvalidArgument);
}
