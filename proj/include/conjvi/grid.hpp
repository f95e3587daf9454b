#pragma once

#include <span>
#include <variant>
#include <vector>

namespace conjvi {

// Axis-aligned box, the hull of a point set or a constraint region.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t dim() const { return lo.size(); }
  bool contains(std::span<const double> p, double slack = 0.0) const;
  // Euclidean length of the width vector.
  double diameter() const;
  double width(std::size_t axis) const { return hi[axis] - lo[axis]; }
};

// Cartesian product of sorted 1D coordinate vectors. Flat indexing is
// row-major: the last axis varies fastest.
class Grid {
 public:
  Grid() = default;
  // Throws if any axis has fewer than 2 points or is not strictly increasing.
  explicit Grid(std::vector<std::vector<double>> axes);

  std::size_t dim() const { return axes_.size(); }
  std::size_t size() const { return total_; }
  std::size_t axis_size(std::size_t i) const { return axes_[i].size(); }
  const std::vector<double>& axis(std::size_t i) const { return axes_[i]; }
  const std::vector<std::vector<double>>& axes() const { return axes_; }

  Box hull_box() const;

  // Writes the coordinates of the flat-index-th point into out (size dim()).
  void point(std::size_t flat, std::span<double> out) const;
  std::vector<double> point(std::size_t flat) const;

  std::size_t flatten(std::span<const std::size_t> multi) const;
  void unflatten(std::size_t flat, std::span<std::size_t> multi) const;

  // Index j in [0, axis_size-2] of the cell [t_j, t_{j+1}] used for the query
  // coordinate q (clamped to the boundary cells outside the hull).
  std::size_t cell_index(std::size_t axis, double q) const;

  // Largest cell width along an axis.
  double max_spacing(std::size_t axis) const;
  bool axis_uniform(std::size_t axis) const { return uniform_[axis]; }

 private:
  std::vector<std::vector<double>> axes_;
  std::vector<std::size_t> strides_;
  std::vector<bool> uniform_;
  std::vector<double> inv_step_;  // valid where uniform_
  std::size_t total_ = 0;
};

// Finite point set with no grid structure.
struct ScatteredSet {
  // points.size() = count, each of dimension dim.
  std::size_t dim = 0;
  std::vector<std::vector<double>> points;

  std::size_t size() const { return points.size(); }
  Box hull_box() const;
  // Throws on empty or duplicate points.
  void validate() const;
};

using Domain = std::variant<Grid, ScatteredSet>;

std::size_t domain_size(const Domain& d);
std::size_t domain_dim(const Domain& d);
void domain_point(const Domain& d, std::size_t i, std::span<double> out);

// Real values attached to a finite point set. Entries may be +infinity to
// encode points outside the effective domain.
class GridFn {
 public:
  GridFn() = default;
  GridFn(Grid grid, std::vector<double> values);
  GridFn(ScatteredSet pts, std::vector<double> values);
  GridFn(Domain domain, std::vector<double> values);

  bool grid_like() const { return std::holds_alternative<Grid>(domain_); }
  const Grid& grid() const;  // throws when the domain is scattered
  const ScatteredSet& scattered() const;
  const Domain& domain() const { return domain_; }

  std::size_t size() const { return values_.size(); }
  std::size_t dim() const { return domain_dim(domain_); }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  void point(std::size_t i, std::span<double> out) const {
    domain_point(domain_, i, out);
  }

  bool all_finite() const;
  std::size_t finite_count() const;
  double min_finite() const;
  double max_finite() const;
  // max finite - min finite; throws when the effective domain is empty.
  double range() const;

 private:
  void check() const;

  Domain domain_;
  std::vector<double> values_;
};

// Per-axis interval of attainable slopes.
struct SlopeBox {
  std::vector<double> lo;
  std::vector<double> hi;
  std::size_t dim() const { return lo.size(); }
};

// Sup-norm distance between two value vectors of equal length.
double sup_norm_diff(std::span<const double> a, std::span<const double> b);

}  // namespace conjvi
