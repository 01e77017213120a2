#include "ptme/archive.hpp"

#include <algorithm>
#include <numeric>

#include "ptme/error.hpp"

namespace ptme {

Archive::Archive(std::shared_ptr<const Tessellation> tessellation, std::size_t solution_dim)
    : tessellation_(std::move(tessellation)), solution_dim_(solution_dim) {
    if (!tessellation_) throw InvalidArgument("archive: missing tessellation");
    task_dim_ = tessellation_->dim();
    const std::size_t n = tessellation_->size();
    thetas_.assign(n * task_dim_, 0.0);
    solutions_.assign(n * solution_dim_, 0.0);
    fitness_.assign(n, 0.0);
    filled_.assign(n, 0);
}

void Archive::set(std::size_t cell, std::span<const double> theta, std::span<const double> x, double f) {
    if (cell >= size()) throw InvalidArgument("archive: cell index out of range");
    if (theta.size() != task_dim_ || x.size() != solution_dim_)
        throw InvalidArgument("archive: elite dimensions do not match the archive");
    std::copy(theta.begin(), theta.end(), thetas_.begin() + static_cast<std::ptrdiff_t>(cell * task_dim_));
    std::copy(x.begin(), x.end(), solutions_.begin() + static_cast<std::ptrdiff_t>(cell * solution_dim_));
    fitness_[cell] = f;
    filled_[cell] = 1;
}

bool Archive::try_insert(std::size_t cell, std::span<const double> theta, std::span<const double> x, double f) {
    if (cell >= size()) throw InvalidArgument("archive: cell index out of range");
    if (!(f >= fitness_[cell])) return false;
    set(cell, theta, x, f);
    return true;
}

std::size_t Archive::filled_count() const {
    return static_cast<std::size_t>(std::count(filled_.begin(), filled_.end(), 1));
}

}  // namespace ptme
