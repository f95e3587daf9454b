#pragma once

#include <string>
#include <vector>

#include "conjvi/grid.hpp"
#include "conjvi/problem.hpp"

namespace conjvi {

// Extension operator turning grid values into a function on the continuous
// state space. Clamped interpolation and nearest-neighbor are non-expansive;
// interpolation with extrapolation is not, so fixed-point convergence is not
// guaranteed with it.
enum class ExtensionChoice {
  kInterp,        // multilinear interpolation, query clamped to the hull box
  kInterpExtrap,  // multilinear interpolation and extrapolation
  kNearest,       // nearest-neighbor
};

ExtensionChoice extension_from_string(const std::string& s);
std::string to_string(ExtensionChoice e);
bool extension_non_expansive(ExtensionChoice e);

// Evaluate the chosen extension of h at q.
double extend(const GridFn& h, std::span<const double> q, ExtensionChoice e);

struct SolverReport {
  std::size_t iterations = 0;           // k_t
  std::vector<double> residuals;        // ||J_{k+1} - J_k||_inf per iteration
  std::vector<double> wall_times;       // seconds around the operator body
  GridFn final;
  bool converged = false;

  double total_time() const;
};

// Raised when some state has an empty admissible input set.
struct InfeasibleStateError : std::runtime_error {
  explicit InfeasibleStateError(const std::string& msg) : std::runtime_error(msg) {}
};

// One application of the discretized Bellman backup: for each state-grid
// point, the minimum over admissible discrete inputs of
//   C(x, u) + gamma * sum_w p(w) * extend(J)(f_s(x) + B u + w).
// Inadmissible inputs are excluded; ties resolve to the smallest input index.
GridFn d_dp_apply(const ControlProblem& p, const GridFn& j,
                  const Domain& inputs, ExtensionChoice ext);

struct ViOptions {
  double termination_bound = 1e-3;  // e_t
  std::size_t max_iters = 10000;
  // When set, replaces the standard start (J = 0, J+ = C_s - min C_i).
  std::optional<GridFn> init;
};

// Fixed-point loop for d_dp_apply with the sup-norm termination test.
SolverReport vi_solve(const ControlProblem& p, const Grid& state_grid,
                      const Domain& inputs, ExtensionChoice ext,
                      const ViOptions& opts);

// Samples a scalar function over a grid.
GridFn sample_on_grid(const Grid& g,
                      const std::function<double(std::span<const double>)>& f);

// Samples a scalar function over any finite domain.
GridFn sample_on_domain(const Domain& d,
                        const std::function<double(std::span<const double>)>& f);

}  // namespace conjvi
