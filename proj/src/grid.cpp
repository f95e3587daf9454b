#include "conjvi/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace conjvi {

bool Box::contains(std::span<const double> p, double slack) const {
  if (p.size() != lo.size()) return false;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < lo[i] - slack || p[i] > hi[i] + slack) return false;
  }
  return true;
}

double Box::diameter() const {
  double s = 0;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    const double w = hi[i] - lo[i];
    s += w * w;
  }
  return std::sqrt(s);
}

Grid::Grid(std::vector<std::vector<double>> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw std::invalid_argument("Grid: no axes");
  total_ = 1;
  uniform_.resize(axes_.size());
  inv_step_.resize(axes_.size(), 0.0);
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    const auto& t = axes_[i];
    if (t.size() < 2) throw std::invalid_argument("Grid: axis needs >= 2 points");
    for (std::size_t j = 0; j + 1 < t.size(); ++j) {
      if (!(t[j] < t[j + 1])) {
        throw std::invalid_argument("Grid: axis coordinates must be strictly increasing");
      }
      if (!std::isfinite(t[j])) throw std::invalid_argument("Grid: non-finite coordinate");
    }
    if (!std::isfinite(t.back())) throw std::invalid_argument("Grid: non-finite coordinate");
    total_ *= t.size();

    const double step = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    bool uni = true;
    for (std::size_t j = 0; j + 1 < t.size(); ++j) {
      if (std::abs((t[j + 1] - t[j]) - step) > 1e-12 * std::max(1.0, std::abs(step))) {
        uni = false;
        break;
      }
    }
    uniform_[i] = uni;
    if (uni) inv_step_[i] = 1.0 / step;
  }
  strides_.assign(axes_.size(), 1);
  for (std::size_t i = axes_.size(); i-- > 1;) {
    strides_[i - 1] = strides_[i] * axes_[i].size();
  }
}

Box Grid::hull_box() const {
  Box b;
  b.lo.reserve(dim());
  b.hi.reserve(dim());
  for (const auto& t : axes_) {
    b.lo.push_back(t.front());
    b.hi.push_back(t.back());
  }
  return b;
}

void Grid::point(std::size_t flat, std::span<double> out) const {
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    const std::size_t idx = (flat / strides_[i]) % axes_[i].size();
    out[i] = axes_[i][idx];
  }
}

std::vector<double> Grid::point(std::size_t flat) const {
  std::vector<double> p(dim());
  point(flat, p);
  return p;
}

std::size_t Grid::flatten(std::span<const std::size_t> multi) const {
  std::size_t flat = 0;
  for (std::size_t i = 0; i < axes_.size(); ++i) flat += multi[i] * strides_[i];
  return flat;
}

void Grid::unflatten(std::size_t flat, std::span<std::size_t> multi) const {
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    multi[i] = (flat / strides_[i]) % axes_[i].size();
  }
}

std::size_t Grid::cell_index(std::size_t axis, double q) const {
  const auto& t = axes_[axis];
  const std::size_t last_cell = t.size() - 2;
  if (q <= t.front()) return 0;
  if (q >= t[last_cell]) return last_cell;
  if (uniform_[axis]) {
    const auto j = static_cast<std::size_t>((q - t.front()) * inv_step_[axis]);
    // Guard against round-off at cell boundaries.
    if (j > 0 && q < t[j]) return j - 1;
    if (j < last_cell && q >= t[j + 1]) return j + 1;
    return std::min(j, last_cell);
  }
  const auto it = std::upper_bound(t.begin(), t.end(), q);
  return static_cast<std::size_t>(it - t.begin()) - 1;
}

double Grid::max_spacing(std::size_t axis) const {
  const auto& t = axes_[axis];
  double h = 0;
  for (std::size_t j = 0; j + 1 < t.size(); ++j) h = std::max(h, t[j + 1] - t[j]);
  return h;
}

Box ScatteredSet::hull_box() const {
  if (points.empty()) throw std::invalid_argument("ScatteredSet: empty");
  Box b{points.front(), points.front()};
  for (const auto& p : points) {
    for (std::size_t i = 0; i < dim; ++i) {
      b.lo[i] = std::min(b.lo[i], p[i]);
      b.hi[i] = std::max(b.hi[i], p[i]);
    }
  }
  return b;
}

void ScatteredSet::validate() const {
  if (points.empty()) throw std::invalid_argument("ScatteredSet: empty");
  for (const auto& p : points) {
    if (p.size() != dim) throw std::invalid_argument("ScatteredSet: dimension mismatch");
  }
  // O(n^2) duplicate scan; scattered sets are small in practice.
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if (points[i] == points[j]) {
        throw std::invalid_argument("ScatteredSet: duplicate point");
      }
    }
  }
}

std::size_t domain_size(const Domain& d) {
  return std::visit([](const auto& s) { return s.size(); }, d);
}

std::size_t domain_dim(const Domain& d) {
  return std::visit([](const auto& s) { return s.dim(); }, d);
}

namespace {
struct PointVisitor {
  std::size_t i;
  std::span<double> out;
  void operator()(const Grid& g) const { g.point(i, out); }
  void operator()(const ScatteredSet& s) const {
    const auto& p = s.points[i];
    std::copy(p.begin(), p.end(), out.begin());
  }
};
}  // namespace

void domain_point(const Domain& d, std::size_t i, std::span<double> out) {
  std::visit(PointVisitor{i, out}, d);
}

GridFn::GridFn(Grid grid, std::vector<double> values)
    : domain_(std::move(grid)), values_(std::move(values)) {
  check();
}

GridFn::GridFn(ScatteredSet pts, std::vector<double> values)
    : domain_(std::move(pts)), values_(std::move(values)) {
  std::get<ScatteredSet>(domain_).validate();
  check();
}

GridFn::GridFn(Domain domain, std::vector<double> values)
    : domain_(std::move(domain)), values_(std::move(values)) {
  if (const auto* s = std::get_if<ScatteredSet>(&domain_)) s->validate();
  check();
}

void GridFn::check() const {
  if (values_.size() != domain_size(domain_)) {
    throw std::invalid_argument("GridFn: values length != domain cardinality");
  }
  for (double v : values_) {
    if (std::isnan(v) || v == -std::numeric_limits<double>::infinity()) {
      throw std::invalid_argument("GridFn: values must be finite or +inf");
    }
  }
}

const Grid& GridFn::grid() const {
  if (const auto* g = std::get_if<Grid>(&domain_)) return *g;
  throw std::invalid_argument("GridFn: domain is not grid-like");
}

const ScatteredSet& GridFn::scattered() const {
  if (const auto* s = std::get_if<ScatteredSet>(&domain_)) return *s;
  throw std::invalid_argument("GridFn: domain is not scattered");
}

bool GridFn::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

std::size_t GridFn::finite_count() const {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(),
                    [](double v) { return std::isfinite(v); }));
}

double GridFn::min_finite() const {
  double m = std::numeric_limits<double>::infinity();
  for (double v : values_) {
    if (std::isfinite(v)) m = std::min(m, v);
  }
  if (!std::isfinite(m)) throw std::invalid_argument("GridFn: empty effective domain");
  return m;
}

double GridFn::max_finite() const {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : values_) {
    if (std::isfinite(v)) m = std::max(m, v);
  }
  if (!std::isfinite(m)) throw std::invalid_argument("GridFn: empty effective domain");
  return m;
}

double GridFn::range() const { return max_finite() - min_finite(); }

double sup_norm_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("sup_norm_diff: size mismatch");
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace conjvi
