#include "ptme/kdtree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "ptme/error.hpp"

namespace ptme {

namespace {
constexpr std::uint32_t kLeafSize = 8;
}

KdTree::KdTree(std::span<const double> points, std::size_t dim) : dim_(dim) {
    if (dim == 0 || points.size() % dim != 0)
        throw InvalidArgument("kd-tree: point array size is not a multiple of the dimension");
    const std::size_t n = points.size() / dim;
    ids_.resize(n);
    std::iota(ids_.begin(), ids_.end(), 0u);
    // Build over the original layout, then lay the rows out in leaf order.
    points_.assign(points.begin(), points.end());
    if (n > 0) build(0, static_cast<std::uint32_t>(n));
    std::vector<double> permuted(points.size());
    for (std::size_t i = 0; i < n; ++i)
        std::copy_n(points.data() + ids_[i] * dim, dim, permuted.data() + i * dim);
    points_ = std::move(permuted);
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
    const auto index = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(Node{begin, end, -1, -1, 0, 0.0});
    if (end - begin <= kLeafSize) return index;

    // split on the axis of largest spread
    std::uint32_t axis = 0;
    double widest = -1.0;
    for (std::uint32_t j = 0; j < dim_; ++j) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::uint32_t i = begin; i < end; ++i) {
            const double v = points_[ids_[i] * dim_ + j];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo > widest) {
            widest = hi - lo;
            axis = j;
        }
    }
    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(ids_.begin() + begin, ids_.begin() + mid, ids_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                         return points_[a * dim_ + axis] < points_[b * dim_ + axis];
                     });
    const double split = points_[ids_[mid] * dim_ + axis];
    const std::int32_t left = build(begin, mid);
    const std::int32_t right = build(mid, end);
    nodes_[index].left = left;
    nodes_[index].right = right;
    nodes_[index].axis = axis;
    nodes_[index].split = split;
    return index;
}

void KdTree::search(std::int32_t node_index, const double* q, double& best_d2,
                    std::size_t& best) const {
    const Node& node = nodes_[node_index];
    if (node.left < 0) {
        for (std::uint32_t i = node.begin; i < node.end; ++i) {
            const double d2 = squared_distance(points_.data() + i * dim_, q, dim_);
            if (d2 < best_d2 || (d2 == best_d2 && ids_[i] < best)) {
                best_d2 = d2;
                best = ids_[i];
            }
        }
        return;
    }
    const double diff = q[node.axis] - node.split;
    const std::int32_t near = diff < 0.0 ? node.left : node.right;
    const std::int32_t far = diff < 0.0 ? node.right : node.left;
    search(near, q, best_d2, best);
    // <= keeps equidistant candidates reachable for the index tie-break
    if (diff * diff <= best_d2) search(far, q, best_d2, best);
}

std::size_t KdTree::nearest(const double* query) const {
    if (ids_.empty()) throw InvalidArgument("kd-tree: query on an empty tree");
    double best_d2 = std::numeric_limits<double>::infinity();
    std::size_t best = std::numeric_limits<std::size_t>::max();
    search(0, query, best_d2, best);
    return best;
}

std::vector<std::size_t> KdTree::k_nearest(const double* query, std::size_t k) const {
    const std::size_t n = ids_.size();
    std::vector<std::pair<double, std::size_t>> all(n);
    for (std::size_t i = 0; i < n; ++i)
        all[i] = {squared_distance(points_.data() + i * dim_, query, dim_), ids_[i]};
    k = std::min(k, n);
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end());
    std::vector<std::size_t> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = all[i].second;
    return out;
}

}  // namespace ptme
