#pragma once

#include <span>

#include "conjvi/grid.hpp"

namespace conjvi {

// Discrete Legendre-Fenchel conjugate by direct enumeration:
//   out(y) = max over primal points x of <x,y> - h(x),
// skipping +inf entries. Works for grid-like and scattered primal domains;
// O(primal * dual). This is the reference the fast transform is checked
// against.
GridFn conjugate_bruteforce(const GridFn& h, const Grid& duals);

// Linear-time Legendre transform over a grid-like primal domain and grid-like
// dual domain. For n > 1 the transform factorizes into dimension-by-dimension
// 1D passes; each 1D pass is a lower-convex-hull extraction followed by a
// merged scan of the sorted dual slopes, linear in (primal + dual) axis
// lengths. Throws when the primal domain is not grid-like.
GridFn llt(const GridFn& h, const Grid& duals);

// Multilinear interpolation inside the hull box, multilinear extrapolation
// using the nearest boundary cell outside it. Exact on grid nodes. Requires
// all values finite.
double lerp_extend(const GridFn& h, std::span<const double> query);

// lerp_extend with the query clamped to the hull box first. A convex
// combination of node values, hence non-expansive.
double lerp_clamped(const GridFn& h, std::span<const double> query);

// Value at the Euclidean-nearest domain point. Ties resolve to the smallest
// flattened/point index.
double nn_extend(const GridFn& h, std::span<const double> query);

// Per-axis attainable-slope interval of a grid function: minimum first
// forward difference to maximum last backward difference over all 1D slices.
// Exact L(h) for convex data; a heuristic proxy otherwise.
SlopeBox slope_range(const GridFn& h);

}  // namespace conjvi
