#include "ptme/tessellation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ptme/delaunay.hpp"
#include "ptme/error.hpp"

namespace ptme {

namespace {

// Latin hypercube start: every coordinate hits each of the n strata once, so
// the generators begin spread out and Lloyd does not stall in a clumped
// local minimum.
std::vector<double> latin_hypercube(std::size_t n, std::size_t dim, Rng& rng) {
    std::vector<double> points(n * dim);
    std::vector<std::size_t> strata(n);
    for (std::size_t j = 0; j < dim; ++j) {
        std::iota(strata.begin(), strata.end(), std::size_t{0});
        std::shuffle(strata.begin(), strata.end(), rng);
        for (std::size_t i = 0; i < n; ++i)
            points[i * dim + j] = (static_cast<double>(strata[i]) + uniform01(rng)) / static_cast<double>(n);
    }
    return points;
}

}  // namespace

std::vector<double> cvt_centroids(std::size_t n, std::size_t dim, Rng& rng, const CvtOptions& options) {
    if (n == 0) throw InvalidArgument("cvt: cell count must be positive");
    if (dim == 0) throw InvalidArgument("cvt: dimension must be positive");

    const std::size_t sample_count = std::max(options.samples_per_cell * n, std::max(options.min_samples, n));
    std::vector<double> samples(sample_count * dim);
    for (double& v : samples) v = uniform01(rng);

    std::vector<double> centroids = latin_hypercube(n, dim, rng);
    std::vector<double> sums(n * dim);
    std::vector<std::size_t> counts(n);

    for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
        const KdTree tree(centroids, dim);
        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t s = 0; s < sample_count; ++s) {
            const double* p = samples.data() + s * dim;
            const std::size_t c = tree.nearest(p);
            ++counts[c];
            for (std::size_t j = 0; j < dim; ++j) sums[c * dim + j] += p[j];
        }
        double max_shift2 = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
            if (counts[c] == 0) continue;  // empty region keeps its generator
            double shift2 = 0.0;
            for (std::size_t j = 0; j < dim; ++j) {
                const double updated = sums[c * dim + j] / static_cast<double>(counts[c]);
                const double d = updated - centroids[c * dim + j];
                shift2 += d * d;
                centroids[c * dim + j] = updated;
            }
            max_shift2 = std::max(max_shift2, shift2);
        }
        if (std::sqrt(max_shift2) < options.tolerance) break;
    }
    return centroids;
}

namespace {

void check_affine_span(std::span<const double> centroids, std::size_t dim) {
    const std::size_t n = centroids.size() / dim;
    if (n < dim + 1)
        throw DegenerateGeometry("adjacency: " + std::to_string(n) + " centroids cannot span " +
                                 std::to_string(dim) + " dimensions");
    Eigen::MatrixXd diffs(static_cast<Eigen::Index>(n - 1), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            diffs(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j)) =
                centroids[i * dim + j] - centroids[j];
    Eigen::FullPivLU<Eigen::MatrixXd> lu(diffs);
    lu.setThreshold(1e-12);
    if (static_cast<std::size_t>(lu.rank()) < dim)
        throw DegenerateGeometry("adjacency: centroids are not affinely independent");
}

Adjacency from_edges(std::size_t n, const std::vector<Edge>& edges) {
    Adjacency adj(n);
    for (const auto& [a, b] : edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    for (auto& list : adj) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    return adj;
}

Adjacency complete_graph(std::size_t n) {
    Adjacency adj(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) adj[i].push_back(static_cast<std::uint32_t>(j));
    return adj;
}

}  // namespace

Adjacency build_adjacency(std::span<const double> centroids, std::size_t dim, std::uint64_t jitter_seed) {
    if (dim == 0 || centroids.size() % dim != 0)
        throw InvalidArgument("adjacency: centroid array does not match the dimension");
    check_affine_span(centroids, dim);
    const std::size_t n = centroids.size() / dim;

    if (dim <= 3) {
        Rng rng(jitter_seed);
        std::uniform_real_distribution<double> noise(-1e-9, 1e-9);
        std::vector<double> jittered(centroids.begin(), centroids.end());
        for (double& v : jittered) v += noise(rng);
        return from_edges(n, delaunay_edges(jittered, dim));
    }

    // High-dimensional fallback: symmetric k-nearest neighbours.
    const std::size_t k = std::min(2 * (dim + 1), n - 1);
    const KdTree tree(centroids, dim);
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j : tree.k_nearest(centroids.data() + i * dim, k + 1)) {
            if (j == i) continue;
            edges.emplace_back(static_cast<std::uint32_t>(std::min(i, j)),
                               static_cast<std::uint32_t>(std::max(i, j)));
        }
    }
    return from_edges(n, edges);
}

Tessellation::Tessellation(std::size_t dim, std::vector<double> centroids, Adjacency adjacency,
                           std::uint64_t seed)
    : dim_(dim), centroids_(std::move(centroids)), adjacency_(std::move(adjacency)), seed_(seed) {
    if (dim_ == 0) throw InvalidArgument("tessellation: dimension must be positive");
    if (centroids_.empty() || centroids_.size() % dim_ != 0)
        throw InvalidArgument("tessellation: centroid array does not match the dimension");
    for (double v : centroids_)
        if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("tessellation: centroid outside [0,1]");
    const std::size_t n = size();
    if (!adjacency_.empty()) {
        if (adjacency_.size() != n) throw InvalidArgument("tessellation: adjacency size differs from cell count");
        for (std::size_t i = 0; i < n; ++i)
            for (std::uint32_t j : adjacency_[i]) {
                if (j >= n || j == i) throw InvalidArgument("tessellation: invalid neighbour index");
                const auto& back = adjacency_[j];
                if (std::find(back.begin(), back.end(), i) == back.end())
                    throw InvalidArgument("tessellation: adjacency is not symmetric");
            }
    }
    index_ = KdTree(centroids_, dim_);
}

Tessellation Tessellation::build(std::size_t n, std::size_t dim, std::uint64_t seed, bool with_adjacency) {
    Rng rng(seed);
    std::vector<double> centroids = cvt_centroids(n, dim, rng);
    Adjacency adjacency;
    if (with_adjacency) {
        adjacency = n <= dim + 1 ? complete_graph(n)
                                 : build_adjacency(centroids, dim, derive_seed(seed, 0xADu));
    }
    return Tessellation(dim, std::move(centroids), std::move(adjacency), seed);
}

std::size_t Tessellation::nearest_cell(std::span<const double> theta) const {
    if (theta.size() != dim_)
        throw InvalidArgument("nearest_cell: expected a " + std::to_string(dim_) + "-dimensional task, got " +
                              std::to_string(theta.size()));
    return index_.nearest(theta.data());
}

nlohmann::json to_json(const Tessellation& tess) {
    nlohmann::json doc;
    doc["dim"] = tess.dim();
    doc["seed"] = tess.seed();
    auto& centroids = doc["centroids"] = nlohmann::json::array();
    for (std::size_t i = 0; i < tess.size(); ++i) {
        const auto c = tess.centroid(i);
        centroids.push_back(std::vector<double>(c.begin(), c.end()));
    }
    doc["adjacency"] = tess.adjacency();
    return doc;
}

Tessellation tessellation_from_json(const nlohmann::json& doc) {
    try {
        const auto dim = doc.at("dim").get<std::size_t>();
        const auto seed = doc.at("seed").get<std::uint64_t>();
        std::vector<double> flat;
        for (const auto& row : doc.at("centroids")) {
            const auto values = row.get<std::vector<double>>();
            if (values.size() != dim) throw ParseError("tessellation: centroid row has the wrong dimension");
            flat.insert(flat.end(), values.begin(), values.end());
        }
        Adjacency adjacency;
        if (doc.contains("adjacency")) adjacency = doc.at("adjacency").get<Adjacency>();
        return Tessellation(dim, std::move(flat), std::move(adjacency), seed);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("tessellation: ") + e.what());
    }
}

}  // namespace ptme
