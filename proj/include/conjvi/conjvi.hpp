#pragma once

#include <optional>

#include "conjvi/grid.hpp"
#include "conjvi/grid_builder.hpp"
#include "conjvi/problem.hpp"
#include "conjvi/vi.hpp"

namespace conjvi {

struct ConjVIConfig {
  Grid state_grid;
  Domain inputs;
  YGridSpec y_spec;
  std::size_t z_points_per_axis = 2;
  ExtensionChoice extension = ExtensionChoice::kInterp;
  double termination_bound = 1e-3;  // e_t
  std::size_t max_iters = 10000;
  bool use_analytic_ci_conj = false;
  bool deterministic_shortcut = true;
};

// Scaled expectation filter: eps(x) = gamma * sum_w p(w) * extend(J)(x + w).
// Reduces to gamma * J when the disturbance support is the origin and the
// shortcut is enabled.
GridFn expectation_filter(const GridFn& j, const Disturbance& dist, double gamma,
                          ExtensionChoice ext, bool deterministic_shortcut = true);

// Precomputed pieces of the conjugate-domain backup that do not change with J.
struct DCdpContext {
  Grid y;                                // state dual grid (rebuilt when dynamic)
  Grid z;                                // drift-image dual grid
  std::optional<GridFn> ci_conj;         // discrete conjugate of C_i over V
  bool analytic_ci_conj = false;         // use problem's analytic conjugate
  std::vector<std::vector<double>> fs_images;  // f_s over the state grid
};

// Builds V (when needed), the discrete conjugate of the input cost, the Z
// grid, and the static Y grid.
DCdpContext make_dcdp_context(const ControlProblem& p, const ConjVIConfig& cfg);

// One application of the conjugate-domain Bellman backup:
//   (i)  eps = scaled expectation filter of J on the state grid,
//   (ii) conjugate eps onto Y,
//   (iii) phi(y) = C_i-conjugate at -B^T y plus the eps conjugate,
//   (iv) conjugate phi onto Z,
//   (v)  out(x) = C_s(x) + interpolation of the phi conjugate at f_s(x).
// Throws when the hull of Z fails to contain some drift image.
GridFn d_cdp_apply(const ControlProblem& p, const GridFn& j,
                   const ConjVIConfig& cfg, const DCdpContext& ctx);

// Full conjugate value iteration: initialization, static or per-iteration Y
// construction, and the fixed-point loop with the sup-norm termination test.
// Divergence (residual above 1e6 x the first residual) raises an error.
SolverReport conjvi_solve(const ControlProblem& p, const ConjVIConfig& cfg);

// Discretization-error certificate. All terms are nonnegative; Lipschitz
// estimates come from finite differences of the sampled data, so the bound is
// labeled estimated.
struct ErrorCertificate {
  double e_u = 0, e_v = 0, e_x = 0, e_y_bound = 0, e_z = 0;
  double e_d = 0;                 // e_u + e_v + e_x + e_y_bound + e_z
  double e_e = 0, e_t = 0;
  double fixed_point_bound = 0;   // (gamma*(e_e + e_t) + e_d) / (1 - gamma)

  // Constants and distances entering the terms.
  double gamma = 0;
  double b_norm = 0;
  double diam_y = 0, diam_x_box = 0, diam_u_box = 0, diam_u_d = 0, diam_fs = 0;
  double lip_ci = 0, lip_j = 0;
  double dh_u = 0, dh_x = 0, dh_v = 0, dh_y = 0, dh_z = 0;
};

struct CertificateInputs {
  Grid state_grid;
  Domain inputs;           // U^d
  std::optional<Grid> v;   // absent with an analytic input-cost conjugate
  Grid y;
  Grid z;
  GridFn j;                // iterate used for the Lip(J) estimate
  double e_e = 0;
  double e_t = 0;
  bool analytic_ci_conj = false;
  // Optional overrides for the estimated quantities.
  std::optional<double> lip_ci, lip_j, dh_u;
};

ErrorCertificate compute_error_certificate(const ControlProblem& p,
                                           const CertificateInputs& in);

// One-sided Hausdorff distance from a box to a grid contained in it
// (closed form: boundary margins and half cell widths per axis).
double hausdorff_box_to_grid(const Box& box, const Grid& g);

// One-sided Hausdorff distance from a finite point list to a grid.
double hausdorff_points_to_grid(const std::vector<std::vector<double>>& pts,
                                const Grid& g);

}  // namespace conjvi
