#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ptme {

inline double squared_distance(const double* a, const double* b, std::size_t dim) {
    double acc = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
        const double d = a[j] - b[j];
        acc += d * d;
    }
    return acc;
}

/// Static k-d tree over a flat row-major point array.
///
/// Queries are exact: the result always equals the argmin of a linear scan,
/// with equal distances resolved towards the lowest point index.
class KdTree {
public:
    KdTree() = default;
    KdTree(std::span<const double> points, std::size_t dim);

    std::size_t nearest(std::span<const double> query) const { return nearest(query.data()); }
    std::size_t nearest(const double* query) const;

    /// Indices of the k nearest points, closest first (ties by index).
    std::vector<std::size_t> k_nearest(const double* query, std::size_t k) const;

    std::size_t size() const { return ids_.size(); }
    std::size_t dim() const { return dim_; }

private:
    struct Node {
        std::uint32_t begin;
        std::uint32_t end;
        std::int32_t left;   // -1 for leaves
        std::int32_t right;
        std::uint32_t axis;
        double split;
    };

    std::int32_t build(std::uint32_t begin, std::uint32_t end);
    void search(std::int32_t node, const double* q, double& best_d2, std::size_t& best) const;

    std::size_t dim_ = 0;
    std::vector<double> points_;       // permuted copy, leaf-contiguous
    std::vector<std::uint32_t> ids_;   // original index of each permuted row
    std::vector<Node> nodes_;
};

}  // namespace ptme
