#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "conjvi/grid.hpp"

namespace conjvi {

// Input-affine dynamics x+ = f_s(x) + B u + w.
struct Dynamics {
  std::size_t state_dim = 0;
  std::size_t input_dim = 0;
  // State drift, possibly nonlinear; writes f_s(x) into out.
  std::function<void(std::span<const double>, std::span<double>)> drift;
  // Input channel matrix, row-major state_dim x input_dim.
  std::vector<double> b;

  void eval_drift(std::span<const double> x, std::span<double> out) const {
    drift(x, out);
  }
  // out += B * u
  void add_bu(std::span<const double> u, std::span<double> out) const;
  // out = B^T * y
  void bt_mul(std::span<const double> y, std::span<double> out) const;
  // Spectral norm of B (largest singular value).
  double b_norm2() const;
};

// Separable stage cost C(x, u) = C_s(x) + C_i(u).
struct StageCost {
  std::function<double(std::span<const double>)> state_cost;
  std::function<double(std::span<const double>)> input_cost;
  // Analytic convex conjugate of the input cost over its constraint box, when
  // available.
  std::function<double(std::span<const double>)> input_cost_conjugate;

  bool has_analytic_conjugate() const {
    return static_cast<bool>(input_cost_conjugate);
  }
};

// Finite-support disturbance with a probability mass function.
struct Disturbance {
  std::vector<std::vector<double>> support;
  std::vector<double> pmf;

  static Disturbance deterministic(std::size_t dim);
  bool is_zero_point() const;  // support == { 0 }
  void validate(std::size_t state_dim) const;
};

struct ControlProblem {
  std::string name;
  Dynamics dynamics;
  StageCost cost;
  Box state_box;
  Box input_box;
  Disturbance disturbance;
  double gamma = 0.0;

  std::size_t state_dim() const { return dynamics.state_dim; }
  std::size_t input_dim() const { return dynamics.input_dim; }

  // Throws when basic invariants fail (gamma range, box shapes, pmf).
  void validate() const;

  // next = f_s(x) + B u + w
  void step(std::span<const double> x, std::span<const double> u,
            std::span<const double> w, std::span<double> next) const;
};

// Indices of the inputs u in `inputs` with f_s(x) + B u + w inside the state
// box for every disturbance support point. May be empty.
std::vector<std::size_t> admissible_inputs(const ControlProblem& p,
                                           std::span<const double> x,
                                           const Domain& inputs);

// Same admissibility test for a single precomputed drift image and B*u.
bool input_admissible(const ControlProblem& p, std::span<const double> fs_x,
                      std::span<const double> bu);

using Overrides = std::map<std::string, double>;

// Registry of the benchmark problems. Names:
//   synthetic, synthetic-det, pendulum, pendulum-det,
//   batch-reactor, batch-reactor-lipschitz.
// The pendulum (alpha12, alpha21, alpha22, beta) and batch-reactor (a11..a44,
// b11..b42) parameters come from overrides; defaults documented in the README
// are used when absent. batch-reactor-lipschitz takes `eta` (default 0.01).
ControlProblem builtin_problem(const std::string& name,
                               const Overrides& overrides = {});

// The per-axis hull of the paper-style discrete state space for a builtin
// problem; equals the state box except where a strict subset is required for
// feasibility of the discretization.
Box builtin_state_grid_box(const std::string& name);

}  // namespace conjvi
