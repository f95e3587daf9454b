#pragma once

#include <cstdint>
#include <optional>

#include "conjvi/grid.hpp"
#include "conjvi/problem.hpp"
#include "conjvi/vi.hpp"

namespace conjvi {

// Greedy control map over a solved value function.
struct Policy {
  const ControlProblem* problem = nullptr;
  GridFn value;
  ExtensionChoice extension = ExtensionChoice::kInterp;
  Domain inputs;
};

// argmin over admissible discrete inputs of
//   C(x, u) + gamma * sum_w p(w) * extend(value)(f(x, u) + w),
// ties to the smallest input index. Throws InfeasibleStateError when the
// admissible set is empty.
std::vector<double> greedy_action(const Policy& pol, std::span<const double> x);
std::size_t greedy_action_index(const Policy& pol, std::span<const double> x);

struct RolloutRequest {
  // Explicit initial states, or a count of uniform draws inside the state
  // grid hull.
  std::optional<std::vector<std::vector<double>>> initial_states;
  std::size_t count = 0;
  std::size_t horizon = 1;  // T
  std::uint64_t seed = 0;
};

struct RolloutReport {
  // Discounted cumulative cost per trajectory (gamma^t weighting); entries of
  // infeasible trajectories hold the partial sum and are excluded from the
  // mean.
  std::vector<double> costs;
  std::vector<bool> infeasible;   // greedy step failed; excluded from mean
  std::vector<bool> left_box;     // state left the constraint box; flagged only
  double mean = 0;
  double stddev = 0;
  std::size_t horizon = 0;
  std::uint64_t seed = 0;

  std::size_t infeasible_count() const;
  std::size_t left_box_count() const;
};

// Rolls out the greedy policy. Disturbances are drawn from the problem's pmf
// with a per-trajectory deterministic stream derived from (seed, index), so
// reports are reproducible bit for bit.
RolloutReport rollout(const Policy& pol, const RolloutRequest& req);

}  // namespace conjvi
