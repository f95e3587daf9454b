#include "conjvi/grid_builder.hpp"

#include <cmath>
#include <stdexcept>

#include "conjvi/dual_transform.hpp"

namespace conjvi {

namespace {

constexpr double kDegenerateHalfWidth = 1e-8;

std::vector<double> uniform_axis(double lo, double hi, std::size_t count) {
  std::vector<double> t(count);
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t j = 0; j < count; ++j) {
    t[j] = lo + step * static_cast<double>(j);
  }
  t.back() = hi;  // exact endpoint
  return t;
}

void widen_if_degenerate(double& lo, double& hi) {
  if (hi - lo <= 0.0) {
    lo -= kDegenerateHalfWidth;
    hi += kDegenerateHalfWidth;
  }
}

}  // namespace

Grid build_uniform_box_grid(const Box& box, std::size_t points_per_axis) {
  if (points_per_axis < 2) {
    throw std::invalid_argument("build_uniform_box_grid: points_per_axis < 2");
  }
  std::vector<std::vector<double>> axes;
  axes.reserve(box.dim());
  for (std::size_t i = 0; i < box.dim(); ++i) {
    if (!(box.lo[i] < box.hi[i])) {
      throw std::invalid_argument("build_uniform_box_grid: degenerate box axis");
    }
    axes.push_back(uniform_axis(box.lo[i], box.hi[i], points_per_axis));
  }
  return Grid(std::move(axes));
}

Grid build_V(const GridFn& ci) {
  const Grid& u = ci.grid();
  const SlopeBox sr = slope_range(ci);
  std::vector<std::vector<double>> axes;
  axes.reserve(u.dim());
  for (std::size_t j = 0; j < u.dim(); ++j) {
    double lo = sr.lo[j];
    double hi = sr.hi[j];
    widen_if_degenerate(lo, hi);
    const std::size_t inner = u.axis_size(j);
    const double step = (hi - lo) / static_cast<double>(inner - 1);
    // Inner grid spans the slope range; one extra point per side keeps the
    // subgrid hull covering it.
    std::vector<double> t;
    t.reserve(inner + 2);
    t.push_back(lo - step);
    for (double v : uniform_axis(lo, hi, inner)) t.push_back(v);
    t.push_back(hi + step);
    axes.push_back(std::move(t));
  }
  return Grid(std::move(axes));
}

Grid build_Z(const std::vector<std::vector<double>>& fs_images,
             std::size_t points_per_axis) {
  if (fs_images.empty()) throw std::invalid_argument("build_Z: no images");
  if (points_per_axis < 2) throw std::invalid_argument("build_Z: points_per_axis < 2");
  const std::size_t n = fs_images.front().size();
  Box box{fs_images.front(), fs_images.front()};
  for (const auto& p : fs_images) {
    if (p.size() != n) throw std::invalid_argument("build_Z: image dimension mismatch");
    for (std::size_t i = 0; i < n; ++i) {
      box.lo[i] = std::min(box.lo[i], p[i]);
      box.hi[i] = std::max(box.hi[i], p[i]);
    }
  }
  std::vector<std::vector<double>> axes;
  axes.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double lo = box.lo[i];
    double hi = box.hi[i];
    widen_if_degenerate(lo, hi);
    axes.push_back(uniform_axis(lo, hi, points_per_axis));
  }
  return Grid(std::move(axes));
}

namespace {

Grid build_Y_from_range(double r, const Grid& state_grid, const YGridSpec& spec) {
  if (spec.alpha <= 0) throw std::invalid_argument("build_Y: alpha must be positive");
  if (spec.points_per_axis < 2) throw std::invalid_argument("build_Y: points_per_axis < 2");
  std::vector<std::vector<double>> axes;
  axes.reserve(state_grid.dim());
  const Box hull = state_grid.hull_box();
  for (std::size_t i = 0; i < state_grid.dim(); ++i) {
    const double width = hull.width(i);
    if (!(width > 0)) throw std::invalid_argument("build_Y: zero-width state axis");
    double endpoint = spec.alpha * r / width;
    double lo = -endpoint;
    double hi = endpoint;
    widen_if_degenerate(lo, hi);
    axes.push_back(uniform_axis(lo, hi, spec.points_per_axis));
  }
  return Grid(std::move(axes));
}

}  // namespace

Grid build_Y_static(const GridFn& cs, const GridFn& ci, double gamma,
                    const Grid& state_grid, const YGridSpec& spec) {
  const double r = (ci.range() + gamma * cs.range()) / (1.0 - gamma);
  return build_Y_from_range(r, state_grid, spec);
}

Grid build_Y_dynamic(const GridFn& ci, const GridFn& j_current, double gamma,
                     const Grid& state_grid, const YGridSpec& spec) {
  const double r = ci.range() + gamma * j_current.range();
  return build_Y_from_range(r, state_grid, spec);
}

}  // namespace conjvi
