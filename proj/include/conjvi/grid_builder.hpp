#pragma once

#include <vector>

#include "conjvi/grid.hpp"

namespace conjvi {

enum class YGridMode { kStatic, kDynamic };

struct YGridSpec {
  YGridMode mode = YGridMode::kStatic;
  double alpha = 1.0;
  std::size_t points_per_axis = 2;
};

// Uniform grid whose hull equals the box. Throws on degenerate boxes or
// points_per_axis < 2.
Grid build_uniform_box_grid(const Box& box, std::size_t points_per_axis);

// Input dual grid: per axis, an inner uniform grid with the same cardinality
// as the input grid spans the sampled slope range of ci, then one extra point
// is added on each side at the same resolution. Zero-width slope ranges are
// widened symmetrically by 1e-8.
Grid build_V(const GridFn& ci);

// State-image dual grid: uniform grid over the bounding box of the supplied
// drift images, degenerate axes widened as in build_V.
Grid build_Z(const std::vector<std::vector<double>>& fs_images,
             std::size_t points_per_axis);

// Static state dual grid. Symmetric per axis with endpoints +-alpha*R/delta_i,
// where R = (rng(ci) + gamma*rng(cs)) / (1 - gamma) and delta_i is the axis-i
// width of the state grid hull.
Grid build_Y_static(const GridFn& cs, const GridFn& ci, double gamma,
                    const Grid& state_grid, const YGridSpec& spec);

// Per-iteration state dual grid with R = rng(ci) + gamma*rng(j_current).
Grid build_Y_dynamic(const GridFn& ci, const GridFn& j_current, double gamma,
                     const Grid& state_grid, const YGridSpec& spec);

}  // namespace conjvi
