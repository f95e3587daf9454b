#include "conjvi/dual_transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "conjvi/util.hpp"

namespace conjvi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Absolute cross-product tolerance for dropping collinear hull points.
constexpr double kHullTol = 1e-12;

// One 1D conjugate pass: out(s) = max_j { s * xs[j] - vals[j] } over the
// finite entries. vals is strided; non-finite entries are skipped. Returns
// -inf for every dual slope when the slice has no finite entry.
//
// Only the vertices of the lower convex hull of (x, v) can attain the max,
// and the optimal vertex index is nondecreasing in s, so one merged sweep
// over (hull edges, sorted duals) suffices.
struct ConjScratch {
  std::vector<double> hx, hv;
};

void conjugate_1d(std::span<const double> xs, const double* vals,
                  std::size_t stride, std::span<const double> duals,
                  double* out, std::size_t out_stride, ConjScratch& scratch) {
  auto& hx = scratch.hx;
  auto& hv = scratch.hv;
  hx.clear();
  hv.clear();

  for (std::size_t j = 0; j < xs.size(); ++j) {
    const double v = vals[j * stride];
    if (!std::isfinite(v)) continue;
    // Lower hull: pop while the middle point is on or above the new chord.
    while (hx.size() >= 2) {
      const double x1 = hx[hx.size() - 2], v1 = hv[hv.size() - 2];
      const double x2 = hx.back(), v2 = hv.back();
      const double cross = (x2 - x1) * (v - v1) - (v2 - v1) * (xs[j] - x1);
      if (cross <= kHullTol) {
        hx.pop_back();
        hv.pop_back();
      } else {
        break;
      }
    }
    hx.push_back(xs[j]);
    hv.push_back(v);
  }

  if (hx.empty()) {
    for (std::size_t k = 0; k < duals.size(); ++k) out[k * out_stride] = -kInf;
    return;
  }

  std::size_t k = 0;  // current hull vertex
  for (std::size_t d = 0; d < duals.size(); ++d) {
    const double s = duals[d];
    // Advance while the outgoing edge slope is below s. Compare via the
    // cross-multiplied form: (v_{k+1} - v_k) < s * (x_{k+1} - x_k).
    while (k + 1 < hx.size() && hv[k + 1] - hv[k] < s * (hx[k + 1] - hx[k])) {
      ++k;
    }
    out[d * out_stride] = s * hx[k] - hv[k];
  }
}

void check_dual_grid(const GridFn& h, const Grid& duals) {
  if (duals.dim() != h.dim()) {
    throw std::invalid_argument("conjugate: dual grid dimension mismatch");
  }
}

}  // namespace

GridFn conjugate_bruteforce(const GridFn& h, const Grid& duals) {
  check_dual_grid(h, duals);
  if (h.finite_count() == 0) {
    throw std::invalid_argument("conjugate_bruteforce: empty effective domain");
  }
  const std::size_t n = h.dim();
  const std::size_t primal_count = h.size();
  std::vector<double> out(duals.size(), -kInf);

  // Materialize primal points once; the double loop is the hot part.
  std::vector<double> pts(primal_count * n);
  for (std::size_t i = 0; i < primal_count; ++i) {
    h.point(i, std::span<double>(pts.data() + i * n, n));
  }

  parallel_for_each(duals.size(), 1024, [&](std::size_t dy) {
    std::vector<double> y(n);
    duals.point(dy, y);
    double best = -kInf;
    for (std::size_t i = 0; i < primal_count; ++i) {
      const double v = h[i];
      if (!std::isfinite(v)) continue;
      double dot = 0;
      for (std::size_t d = 0; d < n; ++d) dot += pts[i * n + d] * y[d];
      best = std::max(best, dot - v);
    }
    out[dy] = best;
  });
  return GridFn(duals, std::move(out));
}

GridFn llt(const GridFn& h, const Grid& duals) {
  check_dual_grid(h, duals);
  if (!h.grid_like()) {
    throw std::invalid_argument(
        "llt: primal domain is not grid-like; use conjugate_bruteforce");
  }
  if (h.finite_count() == 0) {
    throw std::invalid_argument("llt: empty effective domain");
  }
  const Grid& primal = h.grid();
  const std::size_t n = primal.dim();

  // Tensor sweep along axis k = 0..n-1, replacing the primal axis with the
  // dual axis. After pass k the buffer holds
  //   t_k(y_1..y_k, x_{k+1}..x_n) = max_{x_1..x_k} sum_{i<=k} x_i y_i - h(x),
  // so passes after the first conjugate the negated buffer. Intermediate
  // -inf entries mark slices whose effective domain is empty; they re-enter
  // the next pass as skipped (+inf after negation) entries.
  std::vector<std::size_t> shape(n);
  for (std::size_t i = 0; i < n; ++i) shape[i] = primal.axis_size(i);
  std::vector<double> cur = h.values();

  for (std::size_t axis = 0; axis < n; ++axis) {
    const auto& xs = primal.axis(axis);
    const auto& ss = duals.axis(axis);
    const double sign = axis == 0 ? 1.0 : -1.0;

    std::size_t inner = 1;  // product of extents after `axis` (fast strides)
    for (std::size_t i = axis + 1; i < n; ++i) inner *= shape[i];
    std::size_t outer = 1;  // product of extents before `axis`
    for (std::size_t i = 0; i < axis; ++i) outer *= shape[i];

    std::vector<double> next(outer * ss.size() * inner);
    const std::size_t slice_count = outer * inner;

    parallel_for(slice_count, 4096, [&](std::size_t begin, std::size_t end) {
      ConjScratch scratch;
      std::vector<double> slice(xs.size());
      for (std::size_t s = begin; s < end; ++s) {
        const std::size_t o = s / inner;
        const std::size_t r = s % inner;
        const double* src = cur.data() + (o * xs.size()) * inner + r;
        for (std::size_t j = 0; j < xs.size(); ++j) {
          slice[j] = sign * src[j * inner];
        }
        double* dst = next.data() + (o * ss.size()) * inner + r;
        conjugate_1d(xs, slice.data(), 1, ss, dst, inner, scratch);
      }
    });

    shape[axis] = ss.size();
    cur = std::move(next);
  }

  for (double v : cur) {
    if (!std::isfinite(v)) {
      throw std::logic_error("llt: non-finite conjugate output");
    }
  }
  return GridFn(duals, std::move(cur));
}

namespace {

// Shared cell/weight setup for the lerp variants. Weights are not clamped;
// callers clamp the query when they need interpolation only.
double lerp_eval(const Grid& g, const std::vector<double>& values,
                 std::span<const double> q) {
  const std::size_t n = g.dim();
  if (n > 16) throw std::invalid_argument("lerp: dimension too large");
  std::size_t base[16];
  std::size_t step[16];
  double w[16];

  std::size_t stride = 1;
  for (std::size_t i = n; i-- > 0;) {
    const auto& t = g.axis(i);
    const std::size_t j = g.cell_index(i, q[i]);
    base[i] = j * stride;
    step[i] = stride;
    w[i] = (q[i] - t[j]) / (t[j + 1] - t[j]);
    stride *= t.size();
  }

  std::size_t origin = 0;
  for (std::size_t i = 0; i < n; ++i) origin += base[i];

  double acc = 0;
  const std::size_t corners = std::size_t{1} << n;
  for (std::size_t c = 0; c < corners; ++c) {
    double weight = 1;
    std::size_t idx = origin;
    for (std::size_t i = 0; i < n; ++i) {
      if (c & (std::size_t{1} << i)) {
        weight *= w[i];
        idx += step[i];
      } else {
        weight *= 1.0 - w[i];
      }
    }
    acc += weight * values[idx];
  }
  return acc;
}

}  // namespace

double lerp_extend(const GridFn& h, std::span<const double> query) {
  const Grid& g = h.grid();
  if (query.size() != g.dim()) throw std::invalid_argument("lerp: query dimension mismatch");
  return lerp_eval(g, h.values(), query);
}

double lerp_clamped(const GridFn& h, std::span<const double> query) {
  const Grid& g = h.grid();
  if (query.size() != g.dim()) throw std::invalid_argument("lerp: query dimension mismatch");
  double q[16];
  const std::size_t n = g.dim();
  if (n > 16) throw std::invalid_argument("lerp: dimension too large");
  for (std::size_t i = 0; i < n; ++i) {
    q[i] = std::clamp(query[i], g.axis(i).front(), g.axis(i).back());
  }
  return lerp_eval(g, h.values(), std::span<const double>(q, n));
}

double nn_extend(const GridFn& h, std::span<const double> query) {
  if (query.size() != h.dim()) throw std::invalid_argument("nn_extend: query dimension mismatch");
  if (h.grid_like()) {
    const Grid& g = h.grid();
    // Squared distance separates per axis; smallest flattened index wins ties
    // by taking the lower coordinate index on every axis.
    std::size_t flat = 0;
    std::size_t stride = 1;
    std::vector<std::size_t> pick(g.dim());
    for (std::size_t i = 0; i < g.dim(); ++i) {
      const auto& t = g.axis(i);
      const std::size_t j = g.cell_index(i, query[i]);
      const double dlo = std::abs(query[i] - t[j]);
      const double dhi = std::abs(t[j + 1] - query[i]);
      pick[i] = dlo <= dhi ? j : j + 1;
    }
    for (std::size_t i = g.dim(); i-- > 0;) {
      flat += pick[i] * stride;
      stride *= g.axis_size(i);
    }
    return h[flat];
  }
  const auto& pts = h.scattered().points;
  double best = kInf;
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double d = 0;
    for (std::size_t k = 0; k < query.size(); ++k) {
      const double diff = pts[i][k] - query[k];
      d += diff * diff;
    }
    if (d < best) {
      best = d;
      best_i = i;
    }
  }
  return h[best_i];
}

SlopeBox slope_range(const GridFn& h) {
  const Grid& g = h.grid();
  if (!h.all_finite()) throw std::invalid_argument("slope_range: values must be finite");
  const std::size_t n = g.dim();
  SlopeBox box;
  box.lo.assign(n, kInf);
  box.hi.assign(n, -kInf);
  const auto& vals = h.values();

  for (std::size_t axis = 0; axis < n; ++axis) {
    const auto& t = g.axis(axis);
    const std::size_t len = t.size();
    std::size_t inner = 1;
    for (std::size_t i = axis + 1; i < n; ++i) inner *= g.axis_size(i);
    std::size_t outer = g.size() / (len * inner);

    const double first_dt = t[1] - t[0];
    const double last_dt = t[len - 1] - t[len - 2];
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t r = 0; r < inner; ++r) {
        const double* src = vals.data() + (o * len) * inner + r;
        const double fwd = (src[inner] - src[0]) / first_dt;
        const double bwd = (src[(len - 1) * inner] - src[(len - 2) * inner]) / last_dt;
        box.lo[axis] = std::min(box.lo[axis], fwd);
        box.hi[axis] = std::max(box.hi[axis], bwd);
      }
    }
  }
  return box;
}

}  // namespace conjvi
