#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "latticefbm/error.hpp"

namespace latticefbm {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Uniform time grid t_k = t_start + k*step, k = 0..count-1.
struct TimeGrid {
  double t_start = 0.0;
  double step = 1.0;
  std::size_t count = 0;

  double time(std::size_t k) const { return t_start + static_cast<double>(k) * step; }
  double t_end() const { return time(count - 1); }

  /// Grid covering [a, b] with the given step. Throws unless (b - a) is an
  /// integer multiple of the step (relative tolerance 1e-9).
  static TimeGrid covering(double a, double b, double step) {
    require(step > 0.0 && std::isfinite(step), "grid step must be positive");
    require(b >= a, "grid end must not precede grid start");
    const double cells = (b - a) / step;
    const double rounded = std::round(cells);
    require(std::abs(cells - rounded) <= 1e-9 * std::max(1.0, cells),
            "interval length must be an integer multiple of the grid step");
    return TimeGrid{a, step, static_cast<std::size_t>(rounded) + 1};
  }
};

/// Grid-sampled function [t_start, t_end] -> R^N. Row k holds the node values
/// at t_k. Entries are finite and there are at least two grid points.
class SampledPath {
 public:
  SampledPath() = default;

  SampledPath(double t_start, double step, RowMatrix values)
      : t_start_(t_start), step_(step), values_(std::move(values)) {
    require(step_ > 0.0 && std::isfinite(step_), "path step must be positive");
    require(values_.rows() >= 2, "a sampled path needs at least 2 grid points");
    require(values_.cols() >= 1, "a sampled path needs at least one node");
    require(values_.allFinite(), "sampled path contains non-finite entries");
  }

  static SampledPath zeros(const TimeGrid& grid, std::size_t nodes) {
    return SampledPath(grid.t_start, grid.step,
                       RowMatrix::Zero(static_cast<Eigen::Index>(grid.count),
                                       static_cast<Eigen::Index>(nodes)));
  }

  /// Samples fn(t) (an Eigen vector of length nodes) on the grid.
  template <class Fn>
  static SampledPath from_function(const TimeGrid& grid, std::size_t nodes, Fn&& fn) {
    RowMatrix v(static_cast<Eigen::Index>(grid.count), static_cast<Eigen::Index>(nodes));
    for (std::size_t k = 0; k < grid.count; ++k) {
      v.row(static_cast<Eigen::Index>(k)) = fn(grid.time(k)).transpose();
    }
    return SampledPath(grid.t_start, grid.step, std::move(v));
  }

  std::size_t size() const { return static_cast<std::size_t>(values_.rows()); }
  std::size_t nodes() const { return static_cast<std::size_t>(values_.cols()); }
  double t_start() const { return t_start_; }
  double t_end() const { return time(size() - 1); }
  double step() const { return step_; }
  double time(std::size_t k) const { return t_start_ + static_cast<double>(k) * step_; }
  TimeGrid grid() const { return TimeGrid{t_start_, step_, size()}; }

  const RowMatrix& values() const { return values_; }

  Eigen::VectorXd at_index(std::size_t k) const {
    return values_.row(static_cast<Eigen::Index>(k)).transpose();
  }
  double operator()(std::size_t k, std::size_t node) const {
    return values_(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(node));
  }

  bool on_grid(double t) const {
    const double x = (t - t_start_) / step_;
    const double k = std::round(x);
    return std::abs(x - k) <= 1e-9 * std::max(1.0, std::abs(x)) && k >= 0.0 &&
           k <= static_cast<double>(size() - 1);
  }

  /// Index of grid time t. HorizonError when t lies outside the window,
  /// DomainError when it lies inside but off the grid.
  std::size_t index_of(double t) const {
    const double x = (t - t_start_) / step_;
    const double k = std::round(x);
    const double tol = 1e-9 * std::max(1.0, std::abs(x));
    if (k < 0.0 || k > static_cast<double>(size() - 1) || x < -tol ||
        x > static_cast<double>(size() - 1) + tol) {
      throw HorizonError("time " + std::to_string(t) + " outside sampled window [" +
                         std::to_string(t_start_) + ", " + std::to_string(t_end()) + "]");
    }
    require(std::abs(x - k) <= tol, "time " + std::to_string(t) + " is not a grid point");
    return static_cast<std::size_t>(k);
  }

  Eigen::VectorXd at(double t) const { return at_index(index_of(t)); }

  /// Restriction to the grid points of [a, b].
  SampledPath window(double a, double b) const {
    const std::size_t i = index_of(a);
    const std::size_t j = index_of(b);
    require(j > i, "window must contain at least 2 grid points");
    return slice(i, j);
  }

  /// Rows first..last inclusive.
  SampledPath slice(std::size_t first, std::size_t last) const {
    require(last > first && last < size(), "invalid slice bounds");
    const auto rows = static_cast<Eigen::Index>(last - first + 1);
    return SampledPath(time(first), step_,
                       values_.middleRows(static_cast<Eigen::Index>(first), rows));
  }

  /// Every stride-th grid point.
  SampledPath subsample(std::size_t stride) const {
    require(stride >= 1 && (size() - 1) % stride == 0,
            "subsample stride must divide the number of cells");
    const std::size_t m = (size() - 1) / stride + 1;
    RowMatrix v(static_cast<Eigen::Index>(m), values_.cols());
    for (std::size_t k = 0; k < m; ++k) {
      v.row(static_cast<Eigen::Index>(k)) = values_.row(static_cast<Eigen::Index>(k * stride));
    }
    return SampledPath(t_start_, step_ * static_cast<double>(stride), std::move(v));
  }

  SampledPath node(std::size_t i) const {
    require(i < nodes(), "node index out of range");
    return SampledPath(t_start_, step_, values_.col(static_cast<Eigen::Index>(i)));
  }

  bool same_grid(const SampledPath& other) const {
    return size() == other.size() &&
           std::abs(step_ - other.step_) <= 1e-12 * step_ &&
           std::abs(t_start_ - other.t_start_) <= 1e-9 * step_;
  }

  SampledPath operator+(const SampledPath& o) const {
    require(same_grid(o) && nodes() == o.nodes(), "path grids differ");
    return SampledPath(t_start_, step_, values_ + o.values_);
  }
  SampledPath operator-(const SampledPath& o) const {
    require(same_grid(o) && nodes() == o.nodes(), "path grids differ");
    return SampledPath(t_start_, step_, values_ - o.values_);
  }
  SampledPath operator*(double c) const { return SampledPath(t_start_, step_, values_ * c); }

 private:
  double t_start_ = 0.0;
  double step_ = 1.0;
  RowMatrix values_;
};

inline SampledPath operator*(double c, const SampledPath& p) { return p * c; }

}  // namespace latticefbm
