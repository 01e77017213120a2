#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "ptme/tessellation.hpp"

namespace ptme {

/// One elite slot per tessellation cell. Empty cells report fitness 0.
class Archive {
public:
    Archive(std::shared_ptr<const Tessellation> tessellation, std::size_t solution_dim);

    std::size_t size() const { return fitness_.size(); }
    std::size_t task_dim() const { return task_dim_; }
    std::size_t solution_dim() const { return solution_dim_; }
    const Tessellation& tessellation() const { return *tessellation_; }
    const std::shared_ptr<const Tessellation>& tessellation_ptr() const { return tessellation_; }

    bool filled(std::size_t cell) const { return filled_[cell] != 0; }
    double fitness(std::size_t cell) const { return fitness_[cell]; }
    std::span<const double> theta(std::size_t cell) const {
        return {thetas_.data() + cell * task_dim_, task_dim_};
    }
    std::span<const double> solution(std::size_t cell) const {
        return {solutions_.data() + cell * solution_dim_, solution_dim_};
    }

    /// Unconditionally stores an elite.
    void set(std::size_t cell, std::span<const double> theta, std::span<const double> x, double f);

    /// Replaces the cell's elite iff f >= its current fitness (ties replace).
    bool try_insert(std::size_t cell, std::span<const double> theta, std::span<const double> x, double f);

    std::size_t filled_count() const;

private:
    std::shared_ptr<const Tessellation> tessellation_;
    std::size_t task_dim_;
    std::size_t solution_dim_;
    std::vector<double> thetas_;
    std::vector<double> solutions_;
    std::vector<double> fitness_;
    std::vector<unsigned char> filled_;
};

}  // namespace ptme
