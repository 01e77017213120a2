#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "property_checks.hpp"
#include "ptme/archive.hpp"
#include "ptme/error.hpp"
#include "ptme/tessellation.hpp"
#include "ptme/variation.hpp"

using namespace ptme;

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

// An archive over a small planar tessellation whose elites follow `map`.
template <class Map>
Archive archive_from(std::size_t cells, std::size_t dx, std::uint64_t seed, Map map) {
    auto tess = std::make_shared<const Tessellation>(Tessellation::build(cells, 2, seed, true));
    Archive a(tess, dx);
    for (std::size_t c = 0; c < cells; ++c) a.set(c, tess->centroid(c), map(tess->centroid(c)), 0.5);
    return a;
}

}  // namespace

TEST_CASE("sbx spread follows the polynomial distribution") {
    const double eta = 10.0;
    CHECK(sbx_spread(0.5, eta) == doctest::Approx(1.0));
    CHECK(sbx_spread(0.25, eta) == doctest::Approx(std::pow(0.5, 1.0 / 11.0)));
    CHECK(sbx_spread(0.75, eta) == doctest::Approx(std::pow(2.0, 1.0 / 11.0)));
    CHECK(sbx_spread(0.0, eta) == 0.0);
}

TEST_CASE("sbx with u = 0.5 reproduces a parent") {
    CHECK(sbx_child(0.3, 0.7, 10.0, 0.5, false) == doctest::Approx(0.3));
    CHECK(sbx_child(0.3, 0.7, 10.0, 0.5, true) == doctest::Approx(0.7));
}

TEST_CASE("identical parents are a fixed point") {
    auto r = checks::sbx_fixed_point(20000, 8);
    INFO(r.detail);
    CHECK(r.passed);
}

TEST_CASE("sbx children are centred on the parent mean") {
    Rng rng(4);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += sbx_child(0.3, 0.7, 10.0, uniform01(rng), uniform01(rng) < 0.5);
    CHECK(std::abs(sum / n - 0.5) < 0.01);
}

TEST_CASE("sbx output stays in the unit cube") {
    Rng rng(5);
    for (int i = 0; i < 20000; ++i) {
        const std::vector<double> a{uniform01(rng), 0.0, 1.0}, b{uniform01(rng), 1.0, uniform01(rng)};
        for (double v : sbx_crossover(a, b, 0.1 + uniform01(rng) * 20, rng)) REQUIRE((v >= 0.0 && v <= 1.0));
    }
}

TEST_CASE("sbx with a huge index stays on the parents") {
    Rng rng(6);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const std::vector<double> a{uniform01(rng)}, b{uniform01(rng)};
        const double c = sbx_crossover(a, b, 1e6, rng)[0];
        worst = std::max(worst, std::min(std::abs(c - a[0]), std::abs(c - b[0])));
    }
    CHECK(worst < 1e-3);
}

TEST_CASE("sbx rejects parents of different length") {
    Rng rng(1);
    CHECK_THROWS_AS(sbx_crossover(std::vector<double>{0.1}, std::vector<double>{0.1, 0.2}, 10, rng), InvalidArgument);
}

TEST_CASE("tournament keeps the closest candidate") {
    const std::vector<double> candidates{0.9, 0.0, 0.1, 0.0};
    CHECK(closest_candidate(candidates, std::vector<double>{0.0, 0.0}) == 1);
    const std::vector<double> tied{0.2, 0.2, 0.8, 0.8};
    CHECK(closest_candidate(tied, std::vector<double>{0.5, 0.5}) == 0);
}

TEST_CASE("larger tournaments land closer to the reference") {
    Rng rng(7);
    const std::vector<double> ref{0.5, 0.5};
    std::vector<double> d1, d500;
    for (int i = 0; i < 1000; ++i) {
        auto a = tournament_select_task(ref, 1, rng), b = tournament_select_task(ref, 500, rng);
        d1.push_back(std::hypot(a[0] - 0.5, a[1] - 0.5));
        d500.push_back(std::hypot(b[0] - 0.5, b[1] - 0.5));
    }
    CHECK(median(d500) < median(d1));
}

TEST_CASE("size-one tournament samples uniformly") {
    Rng rng(8);
    std::vector<int> bins(10, 0);
    const int n = 50000;
    for (int i = 0; i < n; ++i) ++bins[static_cast<std::size_t>(tournament_select_task(std::vector<double>{0.0}, 1, rng)[0] * 10)];
    double chi2 = 0.0;
    for (int b : bins) chi2 += (b - n / 10.0) * (b - n / 10.0) / (n / 10.0);
    CHECK(chi2 < 27.9);  // 99.9% quantile, 9 degrees of freedom
}

TEST_CASE("ucb1 scores match the formula") {
    BanditState b({1, 5});
    b.update(1, true);
    b.update(1, true);
    b.update(5, false);
    b.update(5, false);
    CHECK(b.score(0) == doctest::Approx(1.0 + std::sqrt(2.0 * std::log(4.0) / 2.0)));
    CHECK(b.score(0) == doctest::Approx(2.177).epsilon(1e-3));
    CHECK(b.score(1) == doctest::Approx(1.177).epsilon(1e-3));
    CHECK(b.select() == 1);
}

TEST_CASE("ucb1 warms up round-robin and breaks ties low") {
    BanditState b({1, 5, 10, 50});
    std::vector<std::uint32_t> order;
    for (int i = 0; i < 4; ++i) {
        order.push_back(b.select());
        b.update(order.back(), false);
    }
    CHECK(order == std::vector<std::uint32_t>{1, 5, 10, 50});
    CHECK(b.select() == 1);  // all counters equal
}

TEST_CASE("bandit counters") {
    BanditState b({1, 5});
    b.update(5, true);
    CHECK(b.selected()[1] == 1);
    CHECK(b.successes()[1] == 1);
    b.update(5, false);
    CHECK(b.selected()[1] == 2);
    CHECK(b.successes()[1] == 1);
    CHECK_THROWS_AS(b.update(7, true), InvalidArgument);
    CHECK_THROWS_AS(BanditState(std::vector<std::uint32_t>{}), InvalidArgument);
    CHECK_THROWS_AS(BanditState({0, 1}), InvalidArgument);
    CHECK_THROWS_AS(BanditState({5, 5}), InvalidArgument);

    Rng rng(3);
    BanditState fuzz({1, 5, 10, 50, 100, 500});
    for (int i = 0; i < 100; ++i) fuzz.update(fuzz.sizes()[rng() % 6], uniform01(rng) < 0.5);
    for (std::size_t j = 0; j < 6; ++j) CHECK(fuzz.successes()[j] <= fuzz.selected()[j]);
}

TEST_CASE("ucb1 after warm-up never returns an unpulled arm") {
    BanditState b({1, 5, 10});
    Rng rng(2);
    for (int i = 0; i < 500; ++i) {
        const auto s = b.select();
        if (i >= 3) {
            const auto it = std::find(b.sizes().begin(), b.sizes().end(), s);
            CHECK(b.selected()[static_cast<std::size_t>(it - b.sizes().begin())] > 0);
        }
        b.update(s, uniform01(rng) < 0.3);
    }
}

TEST_CASE("ucb1 concentrates on the best Bernoulli arm") {
    auto r = checks::bandit_best_arm_share(10000, 21);
    INFO(r.detail);
    CHECK(r.passed);
}

TEST_CASE("regression recovers a 1-D affine map") {
    const std::vector<double> thetas{0.1, 0.3, 0.45, 0.7};
    std::vector<double> xs;
    for (double t : thetas) xs.push_back(0.2 + 0.6 * t);
    const auto model = fit_local_linear(thetas, xs, 1, 1);
    CHECK(model.predict(std::vector<double>{0.25})[0] == doctest::Approx(0.35).epsilon(1e-6));
}

TEST_CASE("noise-free regression candidates are exact and deterministic") {
    auto r = checks::regression_affine_recovery(31);
    INFO(r.detail);
    CHECK(r.passed);

    const auto archive = archive_from(40, 2, 3, [](std::span<const double> t) {
        return std::vector<double>{0.3 + 0.2 * t[0], 0.6 - 0.1 * t[1]};
    });
    Rng a(1), b(99);
    const std::vector<double> theta{0.42, 0.17};
    CHECK(local_linear_candidate(archive, theta, 0.0, a) == local_linear_candidate(archive, theta, 0.0, b));
}

TEST_CASE("identical neighbour solutions give a noise-free candidate") {
    const auto archive = archive_from(30, 2, 4, [](std::span<const double>) { return std::vector<double>{0.25, 0.75}; });
    Rng rng(5);
    for (int i = 0; i < 20; ++i) {
        const std::vector<double> theta{uniform01(rng), uniform01(rng)};
        const auto x = local_linear_candidate(archive, theta, 3.0, rng);
        CHECK(x[0] == doctest::Approx(0.25).epsilon(1e-7));
        CHECK(x[1] == doctest::Approx(0.75).epsilon(1e-7));
    }
}

TEST_CASE("regression tracks a noisy affine map") {
    Rng rng(6);
    std::normal_distribution<double> noise(0.0, 0.01);
    std::vector<double> errors;
    for (int trial = 0; trial < 100; ++trial) {
        const double a = uniform01(rng) * 0.4, b = 0.3;
        const auto archive = archive_from(60, 1, 7, [&](std::span<const double> t) {
            return std::vector<double>{a * t[0] + b + 0.2 * a * t[1] + noise(rng)};
        });
        const std::vector<double> theta{uniform01(rng), uniform01(rng)};
        const double truth = a * theta[0] + b + 0.2 * a * theta[1];
        errors.push_back(std::abs(local_linear_candidate(archive, theta, 1.0, rng)[0] - truth));
    }
    CHECK(median(errors) < 0.05);
}

TEST_CASE("regression falls back to uniform sampling with too few elites") {
    auto tess = std::make_shared<const Tessellation>(Tessellation::build(20, 2, 1, true));
    Archive empty(tess, 3);
    Rng rng(2);
    const std::vector<double> theta{0.5, 0.5};
    double sum = 0.0;
    for (int i = 0; i < 2000; ++i)
        for (double v : local_linear_candidate(empty, theta, 0.0, rng)) {
            REQUIRE((v >= 0.0 && v <= 1.0));
            sum += v;
        }
    CHECK(sum / 6000.0 == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("regression candidates are clipped") {
    const auto archive = archive_from(30, 1, 9, [](std::span<const double> t) { return std::vector<double>{t[0] > 0.5 ? 1.0 : 0.0}; });
    Rng rng(10);
    for (int i = 0; i < 2000; ++i) {
        const std::vector<double> theta{uniform01(rng), uniform01(rng)};
        const double v = local_linear_candidate(archive, theta, 5.0, rng)[0];
        REQUIRE((v >= 0.0 && v <= 1.0));
    }
}
