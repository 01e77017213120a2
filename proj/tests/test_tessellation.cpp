#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <set>

#include "property_checks.hpp"
#include "ptme/delaunay.hpp"
#include "ptme/error.hpp"
#include "ptme/kdtree.hpp"
#include "ptme/tessellation.hpp"

using namespace ptme;

namespace {

std::vector<double> random_points(std::size_t n, std::size_t dim, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> p(n * dim);
    for (auto& v : p) v = uniform01(rng);
    return p;
}

std::size_t scan_nearest(const std::vector<double>& pts, std::size_t dim, const double* q) {
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i * dim < pts.size(); ++i) {
        double d2 = 0.0;
        for (std::size_t j = 0; j < dim; ++j) d2 += (pts[i * dim + j] - q[j]) * (pts[i * dim + j] - q[j]);
        if (d2 < best_d2) {
            best_d2 = d2;
            best = i;
        }
    }
    return best;
}

// Gaussian elimination with partial pivoting; the oracle avoids the library's
// own linear algebra.
bool solve(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double>& x) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        if (std::abs(a[piv][c]) < 1e-14) return false;
        std::swap(a[c], a[piv]);
        std::swap(b[c], b[piv]);
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    x.assign(n, 0.0);
    for (std::size_t c = n; c-- > 0;) {
        double s = b[c];
        for (std::size_t k = c + 1; k < n; ++k) s -= a[c][k] * x[k];
        x[c] = s / a[c][c];
    }
    return true;
}

// Delaunay edges by definition: the edges of every simplex whose
// circumsphere contains no other point.
std::set<Edge> empty_sphere_edges(const std::vector<double>& pts, std::size_t dim) {
    const std::size_t n = pts.size() / dim;
    std::set<Edge> edges;
    std::vector<std::size_t> idx(dim + 1);
    auto visit = [&](auto&& self, std::size_t start, std::size_t depth) -> void {
        if (depth == dim + 1) {
            // |c - p0|^2 = |c - pi|^2  ->  2 (pi - p0) . c = |pi|^2 - |p0|^2
            std::vector<std::vector<double>> a(dim, std::vector<double>(dim));
            std::vector<double> b(dim), c;
            const double* p0 = &pts[idx[0] * dim];
            for (std::size_t i = 0; i < dim; ++i) {
                const double* pi = &pts[idx[i + 1] * dim];
                double rhs = 0.0;
                for (std::size_t j = 0; j < dim; ++j) {
                    a[i][j] = 2.0 * (pi[j] - p0[j]);
                    rhs += pi[j] * pi[j] - p0[j] * p0[j];
                }
                b[i] = rhs;
            }
            if (!solve(a, b, c)) return;
            const double r2 = squared_distance(c.data(), p0, dim);
            for (std::size_t q = 0; q < n; ++q) {
                if (std::find(idx.begin(), idx.end(), q) != idx.end()) continue;
                if (squared_distance(c.data(), &pts[q * dim], dim) < r2 * (1 - 1e-12)) return;
            }
            for (std::size_t i = 0; i <= dim; ++i)
                for (std::size_t j = i + 1; j <= dim; ++j)
                    edges.emplace(static_cast<std::uint32_t>(std::min(idx[i], idx[j])),
                                  static_cast<std::uint32_t>(std::max(idx[i], idx[j])));
            return;
        }
        for (std::size_t i = start; i < n; ++i) {
            idx[depth] = i;
            self(self, i + 1, depth + 1);
        }
    };
    visit(visit, 0, 0);
    return edges;
}

bool connected(const Adjacency& adj) {
    if (adj.empty()) return true;
    std::vector<char> seen(adj.size(), 0);
    std::queue<std::size_t> q;
    q.push(0);
    seen[0] = 1;
    std::size_t count = 1;
    while (!q.empty()) {
        const std::size_t c = q.front();
        q.pop();
        for (auto nb : adj[c])
            if (!seen[nb]) {
                seen[nb] = 1;
                ++count;
                q.push(nb);
            }
    }
    return count == adj.size();
}

bool symmetric_without_loops(const Adjacency& adj) {
    for (std::size_t i = 0; i < adj.size(); ++i)
        for (auto j : adj[i]) {
            if (j == i) return false;
            if (std::find(adj[j].begin(), adj[j].end(), i) == adj[j].end()) return false;
        }
    return true;
}

}  // namespace

TEST_CASE("kd-tree nearest agrees with a linear scan") {
    for (std::size_t dim : {1u, 2u, 3u, 6u}) {
        for (std::size_t n : {1u, 2u, 9u, 100u, 1000u}) {
            auto pts = random_points(n, dim, n * 7 + dim);
            // Duplicated points exercise the lowest-index tie rule.
            if (n > 2) std::copy_n(pts.begin(), dim, pts.begin() + static_cast<std::ptrdiff_t>((n - 1) * dim));
            KdTree tree(pts, dim);
            Rng rng(dim * 1000 + n);
            std::vector<double> q(dim);
            for (int t = 0; t < 300; ++t) {
                for (auto& v : q) v = uniform01(rng) * 1.2 - 0.1;
                if (t % 3 == 0) std::copy_n(pts.begin() + static_cast<std::ptrdiff_t>((rng() % n) * dim), dim, q.begin());
                REQUIRE(tree.nearest(q) == scan_nearest(pts, dim, q.data()));
            }
        }
    }
}

TEST_CASE("kd-tree k nearest matches a sorted scan") {
    const std::size_t dim = 2, n = 300;
    auto pts = random_points(n, dim, 11);
    KdTree tree(pts, dim);
    const double q[2] = {0.3, 0.6};
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return squared_distance(&pts[a * dim], q, dim) < squared_distance(&pts[b * dim], q, dim);
    });
    auto got = tree.k_nearest(q, 12);
    CHECK(std::vector<std::size_t>(order.begin(), order.begin() + 12) == got);
}

TEST_CASE("cvt single cell sits at the centre of the square") {
    Rng rng(3);
    auto c = cvt_centroids(1, 2, rng);
    REQUIRE(c.size() == 2);
    CHECK(std::abs(c[0] - 0.5) < 0.02);
    CHECK(std::abs(c[1] - 0.5) < 0.02);
}

TEST_CASE("1-D cvt converges to equispaced midpoints for n <= 16") {
    for (std::size_t n = 1; n <= 16; ++n) {
        Rng rng(100 + n);
        auto c = cvt_centroids(n, 1, rng);
        std::sort(c.begin(), c.end());
        for (std::size_t i = 0; i < n; ++i) {
            INFO("n=" << n << " i=" << i);
            CHECK(std::abs(c[i] - (2.0 * static_cast<double>(i) + 1.0) / (2.0 * static_cast<double>(n))) < 0.02);
        }
    }
}

TEST_CASE("cvt with 200 cells covers the square") {
    Rng rng(5);
    auto c = cvt_centroids(200, 2, rng);
    for (double v : c) REQUIRE((v >= 0.0 && v <= 1.0));
    Rng probe(6);
    double worst = 0.0;
    for (int t = 0; t < 10000; ++t) {
        const double q[2] = {uniform01(probe), uniform01(probe)};
        worst = std::max(worst, std::sqrt(squared_distance(&c[scan_nearest(c, 2, q) * 2], q, 2)));
    }
    CHECK(worst < 0.12);
}

TEST_CASE("cvt is deterministic and rejects empty shapes") {
    Rng a(9), b(9);
    CHECK(cvt_centroids(50, 3, a) == cvt_centroids(50, 3, b));
    Rng r(1);
    CHECK_THROWS_AS(cvt_centroids(0, 2, r), InvalidArgument);
    CHECK_THROWS_AS(cvt_centroids(5, 0, r), InvalidArgument);
    CHECK_THROWS_AS(Tessellation::build(0, 2, 0, false), InvalidArgument);
}

TEST_CASE("nearest cell examples and tie-breaking") {
    Tessellation t(1, {0.2, 0.8}, {}, 0);
    const double a[1] = {0.3}, b[1] = {0.5};
    CHECK(t.nearest_cell(a) == 0);
    CHECK(t.nearest_cell(b) == 0);
    const double wrong[2] = {0.1, 0.1};
    CHECK_THROWS_AS(t.nearest_cell(wrong), InvalidArgument);
}

TEST_CASE("nearest cell is exact on random tessellations") {
    auto r = checks::nearest_neighbor_exactness(10, 1000, 42);
    INFO(r.detail);
    CHECK(r.passed);
}

TEST_CASE("three points in the plane form one triangle") {
    const std::vector<double> pts = {0.1, 0.1, 0.9, 0.2, 0.4, 0.8};
    auto e = delaunay_edges(pts, 2);
    CHECK(e == std::vector<Edge>{{0, 1}, {0, 2}, {1, 2}});
}

TEST_CASE("unit square corners triangulate symmetrically") {
    const std::vector<double> pts = {0, 0, 1, 0, 1, 1, 0, 1};
    auto adj = build_adjacency(pts, 2, 1);
    CHECK(symmetric_without_loops(adj));
    for (const auto& nb : adj) CHECK(nb.size() >= 2);
}

TEST_CASE("delaunay edges match the empty-circumsphere definition") {
    SUBCASE("2-D") {
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            auto pts = random_points(60, 2, seed);
            auto got = delaunay_edges(pts, 2);
            auto want = empty_sphere_edges(pts, 2);
            CHECK(std::set<Edge>(got.begin(), got.end()) == want);
        }
    }
    SUBCASE("3-D") {
        for (std::uint64_t seed : {4u, 5u}) {
            auto pts = random_points(22, 3, seed);
            auto got = delaunay_edges(pts, 3);
            auto want = empty_sphere_edges(pts, 3);
            CHECK(std::set<Edge>(got.begin(), got.end()) == want);
        }
    }
    SUBCASE("1-D chain") {
        const std::vector<double> pts = {0.5, 0.1, 0.9, 0.3};
        CHECK(delaunay_edges(pts, 1) == std::vector<Edge>{{0, 2}, {0, 3}, {1, 3}});
    }
}

TEST_CASE("planar adjacency of 200 cells has mean degree near six") {
    auto t = Tessellation::build(200, 2, 17, true);
    std::size_t total = 0;
    for (std::size_t i = 0; i < t.size(); ++i) total += t.neighbors(i).size();
    const double mean = static_cast<double>(total) / 200.0;
    CHECK(mean >= 4.0);
    CHECK(mean <= 8.0);
}

TEST_CASE("adjacency is symmetric, loop-free and connected") {
    for (std::size_t dim : {1u, 2u, 3u, 4u}) {
        for (std::size_t n : {2u, 3u, 5u, 40u, 150u}) {
            auto t = Tessellation::build(n, dim, n + dim, true);
            INFO("dim=" << dim << " n=" << n);
            CHECK(symmetric_without_loops(t.adjacency()));
            CHECK(connected(t.adjacency()));
            for (std::size_t i = 0; i < n; ++i) CHECK(!t.neighbors(i).empty());
        }
    }
}

TEST_CASE("degenerate point sets are rejected") {
    const std::vector<double> collinear = {0.1, 0.1, 0.5, 0.5, 0.9, 0.9};
    CHECK_THROWS_AS(build_adjacency(collinear, 2, 0), DegenerateGeometry);
    const std::vector<double> two = {0.1, 0.1, 0.5, 0.5};
    CHECK_THROWS_AS(build_adjacency(two, 2, 0), DegenerateGeometry);
}

TEST_CASE("tessellations round-trip through JSON") {
    auto t = Tessellation::build(30, 2, 8, true);
    auto back = tessellation_from_json(to_json(t));
    CHECK(back.dim() == t.dim());
    CHECK(back.seed() == t.seed());
    CHECK(back.centroids() == t.centroids());
    CHECK(back.adjacency() == t.adjacency());
}

TEST_CASE("tessellation construction validates its inputs") {
    CHECK_THROWS_AS(Tessellation(2, {0.5, 1.5}, {}, 0), InvalidArgument);
    CHECK_THROWS_AS(Tessellation(1, {0.2, 0.8}, {{1}, {}}, 0), InvalidArgument);
    CHECK_THROWS_AS(Tessellation(1, {0.2, 0.8}, {{0}, {1}}, 0), InvalidArgument);
}
