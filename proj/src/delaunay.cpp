#include "ptme/delaunay.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "ptme/error.hpp"

namespace ptme {

namespace {

constexpr std::size_t kMaxDim = 3;
// Half-width of the enclosing simplex, in units of the normalized bounding box.
constexpr double kSuperScale = 1e3;

using Coord = std::array<double, kMaxDim>;

struct Simplex {
    std::array<std::uint32_t, kMaxDim + 1> v{};
    Coord center{};
    double r2 = 0.0;
    bool flat = false;
};

class BowyerWatson {
public:
    BowyerWatson(std::vector<Coord> vertices, std::size_t dim) : dim_(dim), verts_(std::move(vertices)) {}

    void seed_simplex(std::array<std::uint32_t, kMaxDim + 1> v) { simplices_.push_back(make(v)); }

    void insert(std::uint32_t p) {
        const Coord& q = verts_[p];
        std::map<std::array<std::uint32_t, kMaxDim>, int> facets;
        std::size_t keep = 0;
        for (std::size_t s = 0; s < simplices_.size(); ++s) {
            const Simplex& simplex = simplices_[s];
            if (!contains(simplex, q)) {
                simplices_[keep++] = simplex;
                continue;
            }
            for (std::size_t drop = 0; drop <= dim_; ++drop) {
                std::array<std::uint32_t, kMaxDim> f{};
                f.fill(std::numeric_limits<std::uint32_t>::max());
                std::size_t k = 0;
                for (std::size_t i = 0; i <= dim_; ++i)
                    if (i != drop) f[k++] = simplex.v[i];
                std::sort(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(dim_));
                ++facets[f];
            }
        }
        simplices_.resize(keep);
        for (const auto& [f, count] : facets) {
            if (count != 1) continue;
            std::array<std::uint32_t, kMaxDim + 1> v{};
            for (std::size_t i = 0; i < dim_; ++i) v[i] = f[i];
            v[dim_] = p;
            simplices_.push_back(make(v));
        }
    }

    const std::vector<Simplex>& simplices() const { return simplices_; }

private:
    bool contains(const Simplex& s, const Coord& q) const {
        if (s.flat) return true;
        double d2 = 0.0;
        for (std::size_t j = 0; j < dim_; ++j) {
            const double d = q[j] - s.center[j];
            d2 += d * d;
        }
        return d2 < s.r2;
    }

    Simplex make(const std::array<std::uint32_t, kMaxDim + 1>& v) const {
        Simplex s;
        s.v = v;
        const Coord& o = verts_[v[0]];
        Eigen::MatrixXd a(dim_, dim_);
        Eigen::VectorXd rhs(dim_);
        for (std::size_t i = 0; i < dim_; ++i) {
            double sq = 0.0;
            for (std::size_t j = 0; j < dim_; ++j) {
                const double e = verts_[v[i + 1]][j] - o[j];
                a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = e;
                sq += e * e;
            }
            rhs(static_cast<Eigen::Index>(i)) = 0.5 * sq;
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
        if (!lu.isInvertible()) {
            s.flat = true;
            return s;
        }
        const Eigen::VectorXd y = lu.solve(rhs);
        s.r2 = y.squaredNorm();
        for (std::size_t j = 0; j < dim_; ++j) s.center[j] = o[j] + y(static_cast<Eigen::Index>(j));
        if (!std::isfinite(s.r2)) s.flat = true;
        return s;
    }

    std::size_t dim_;
    std::vector<Coord> verts_;
    std::vector<Simplex> simplices_;
};

std::vector<Edge> chain_edges(std::span<const double> points) {
    std::vector<std::uint32_t> order(points.size());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return points[a] < points[b]; });
    std::vector<Edge> edges;
    for (std::size_t i = 1; i < order.size(); ++i)
        edges.emplace_back(std::min(order[i - 1], order[i]), std::max(order[i - 1], order[i]));
    std::sort(edges.begin(), edges.end());
    return edges;
}

}  // namespace

std::vector<Edge> delaunay_edges(std::span<const double> points, std::size_t dim) {
    if (dim == 0 || dim > kMaxDim)
        throw InvalidArgument("delaunay: dimension must be 1, 2 or 3");
    if (points.size() % dim != 0)
        throw InvalidArgument("delaunay: point array size is not a multiple of the dimension");
    const std::size_t n = points.size() / dim;
    if (dim == 1) return chain_edges(points);

    // Normalize into the unit box so the enclosing simplex has a fixed scale.
    Coord lo{}, hi{};
    lo.fill(std::numeric_limits<double>::infinity());
    hi.fill(-std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < dim; ++j) {
            lo[j] = std::min(lo[j], points[i * dim + j]);
            hi[j] = std::max(hi[j], points[i * dim + j]);
        }
    double extent = 0.0;
    for (std::size_t j = 0; j < dim; ++j) extent = std::max(extent, hi[j] - lo[j]);
    if (!(extent > 0.0)) throw DegenerateGeometry("delaunay: all points coincide");

    std::vector<Coord> verts(n + dim + 1);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < dim; ++j) verts[i][j] = (points[i * dim + j] - lo[j]) / extent;

    // Enclosing simplex {y : y_j >= -R, sum_j (y_j + R) <= L} with L chosen so
    // it strictly contains the unit box.
    const double big = kSuperScale;
    const double side = static_cast<double>(dim) * (1.0 + big) + big;
    std::array<std::uint32_t, kMaxDim + 1> super{};
    for (std::size_t k = 0; k <= dim; ++k) {
        Coord c{};
        for (std::size_t j = 0; j < dim; ++j) c[j] = -big;
        if (k > 0) c[k - 1] += side;
        verts[n + k] = c;
        super[k] = static_cast<std::uint32_t>(n + k);
    }

    BowyerWatson bw(std::move(verts), dim);
    bw.seed_simplex(super);
    for (std::size_t i = 0; i < n; ++i) bw.insert(static_cast<std::uint32_t>(i));

    std::vector<Edge> edges;
    for (const Simplex& s : bw.simplices())
        for (std::size_t a = 0; a <= dim; ++a)
            for (std::size_t b = a + 1; b <= dim; ++b) {
                const std::uint32_t u = s.v[a], w = s.v[b];
                if (u < n && w < n) edges.emplace_back(std::min(u, w), std::max(u, w));
            }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

}  // namespace ptme
