#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace ptme {

using Edge = std::pair<std::uint32_t, std::uint32_t>;

/// Edges (i < j, sorted, unique) of the Delaunay triangulation of a point set
/// in 1, 2 or 3 dimensions, via incremental Bowyer-Watson insertion inside a
/// large enclosing simplex.
///
/// Expects points in general position; callers perturb cocircular inputs.
std::vector<Edge> delaunay_edges(std::span<const double> points, std::size_t dim);

}  // namespace ptme
