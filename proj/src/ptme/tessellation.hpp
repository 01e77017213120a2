#pragma once

#include <cstddef>
#include <cstdint>
#include <json.hpp>
#include <span>
#include <vector>

#include "ptme/kdtree.hpp"
#include "ptme/rng.hpp"

namespace ptme {

using Adjacency = std::vector<std::vector<std::uint32_t>>;

struct CvtOptions {
    std::size_t samples_per_cell = 100;
    std::size_t min_samples = 100000;
    std::size_t max_iterations = 50;
    double tolerance = 1e-4;  // stop once no centroid moves farther than this
};

/// Lloyd iterations on uniform samples of [0,1]^dim, started from a Latin
/// hypercube. Returns n*dim values,
/// row-major.
std::vector<double> cvt_centroids(std::size_t n, std::size_t dim, Rng& rng,
                                  const CvtOptions& options = {});

/// Cell adjacency: Delaunay edges for dim <= 3, otherwise the symmetric
/// closure of the 2*(dim+1) nearest centroids. Points are perturbed by
/// uniform noise of magnitude 1e-9 (drawn from `jitter_seed`) before
/// triangulating so cocircular inputs stay well defined.
///
/// Throws DegenerateGeometry when fewer than dim+1 affinely independent
/// centroids exist.
Adjacency build_adjacency(std::span<const double> centroids, std::size_t dim,
                          std::uint64_t jitter_seed);

/// A partition of [0,1]^dim into Voronoi cells around fixed centroids.
/// Immutable once constructed.
class Tessellation {
public:
    Tessellation(std::size_t dim, std::vector<double> centroids, Adjacency adjacency,
                 std::uint64_t seed);

    /// CVT centroids from `seed`. With `with_adjacency`, cell neighbours are
    /// computed as well; tessellations with at most dim+1 cells use the
    /// complete graph, which is what a single simplex triangulates to.
    static Tessellation build(std::size_t n, std::size_t dim, std::uint64_t seed,
                              bool with_adjacency);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return dim_ == 0 ? 0 : centroids_.size() / dim_; }
    std::uint64_t seed() const { return seed_; }

    std::span<const double> centroid(std::size_t cell) const {
        return {centroids_.data() + cell * dim_, dim_};
    }
    const std::vector<double>& centroids() const { return centroids_; }

    bool has_adjacency() const { return !adjacency_.empty(); }
    const std::vector<std::uint32_t>& neighbors(std::size_t cell) const { return adjacency_[cell]; }
    const Adjacency& adjacency() const { return adjacency_; }

    /// Exact nearest centroid; equal distances go to the lowest index.
    std::size_t nearest_cell(std::span<const double> theta) const;

private:
    std::size_t dim_;
    std::vector<double> centroids_;
    Adjacency adjacency_;
    std::uint64_t seed_;
    KdTree index_;
};

nlohmann::json to_json(const Tessellation& tess);
Tessellation tessellation_from_json(const nlohmann::json& doc);

}  // namespace ptme
