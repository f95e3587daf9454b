#include "conjvi/policy.hpp"

#include <cmath>
#include <sstream>

#include "conjvi/util.hpp"

namespace conjvi {

namespace {

std::string format_point(std::span<const double> x) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

}  // namespace

std::size_t greedy_action_index(const Policy& pol, std::span<const double> x) {
  const ControlProblem& p = *pol.problem;
  const std::size_t n = p.state_dim();
  const std::size_t m = p.input_dim();
  std::vector<double> fs(n), u(m), bu(n), q(n);
  p.dynamics.eval_drift(x, fs);

  const std::size_t u_count = domain_size(pol.inputs);
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_i = u_count;
  for (std::size_t ui = 0; ui < u_count; ++ui) {
    domain_point(pol.inputs, ui, u);
    std::fill(bu.begin(), bu.end(), 0.0);
    p.dynamics.add_bu(u, bu);
    if (!input_admissible(p, fs, bu)) continue;
    double expect = 0;
    for (std::size_t wi = 0; wi < p.disturbance.support.size(); ++wi) {
      for (std::size_t d = 0; d < n; ++d) {
        q[d] = fs[d] + bu[d] + p.disturbance.support[wi][d];
      }
      expect += p.disturbance.pmf[wi] * extend(pol.value, q, pol.extension);
    }
    const double total = p.cost.input_cost(u) + p.gamma * expect;
    if (total < best) {
      best = total;
      best_i = ui;
    }
  }
  if (best_i == u_count) {
    throw InfeasibleStateError("greedy_action: no admissible input at state " +
                               format_point(x));
  }
  return best_i;
}

std::vector<double> greedy_action(const Policy& pol, std::span<const double> x) {
  std::vector<double> u(pol.problem->input_dim());
  domain_point(pol.inputs, greedy_action_index(pol, x), u);
  return u;
}

std::size_t RolloutReport::infeasible_count() const {
  std::size_t c = 0;
  for (bool f : infeasible) c += f ? 1 : 0;
  return c;
}

std::size_t RolloutReport::left_box_count() const {
  std::size_t c = 0;
  for (bool f : left_box) c += f ? 1 : 0;
  return c;
}

RolloutReport rollout(const Policy& pol, const RolloutRequest& req) {
  const ControlProblem& p = *pol.problem;
  const std::size_t n = p.state_dim();
  if (req.horizon < 1) throw std::invalid_argument("rollout: horizon must be >= 1");

  const std::size_t count =
      req.initial_states ? req.initial_states->size() : req.count;
  if (count == 0) throw std::invalid_argument("rollout: no trajectories requested");

  const Box hull = pol.value.grid().hull_box();
  std::vector<double> cdf(p.disturbance.pmf.size());
  double acc = 0;
  for (std::size_t i = 0; i < cdf.size(); ++i) {
    acc += p.disturbance.pmf[i];
    cdf[i] = acc;
  }

  RolloutReport report;
  report.costs.assign(count, 0.0);
  report.infeasible.assign(count, false);
  report.left_box.assign(count, false);
  report.horizon = req.horizon;
  report.seed = req.seed;

  std::vector<char> infeasible_flags(count, 0);
  std::vector<char> left_box_flags(count, 0);

  parallel_for_each(count, 4, [&](std::size_t traj) {
    Rng rng(req.seed, traj);
    std::vector<double> x(n);
    if (req.initial_states) {
      x = (*req.initial_states)[traj];
    } else {
      for (std::size_t d = 0; d < n; ++d) x[d] = rng.next_in(hull.lo[d], hull.hi[d]);
    }
    double cost = 0;
    double discount = 1.0;
    std::vector<double> u(p.input_dim()), next(n);
    for (std::size_t t = 0; t < req.horizon; ++t) {
      std::size_t ui;
      try {
        ui = greedy_action_index(pol, x);
      } catch (const InfeasibleStateError&) {
        infeasible_flags[traj] = 1;
        break;
      }
      domain_point(pol.inputs, ui, u);
      cost += discount * (p.cost.state_cost(x) + p.cost.input_cost(u));
      discount *= p.gamma;
      const std::size_t wi = rng.next_index(cdf);
      p.step(x, u, p.disturbance.support[wi], next);
      x = next;
      if (!p.state_box.contains(x)) left_box_flags[traj] = 1;
    }
    report.costs[traj] = cost;
  });

  for (std::size_t i = 0; i < count; ++i) {
    report.infeasible[i] = infeasible_flags[i] != 0;
    report.left_box[i] = left_box_flags[i] != 0;
  }

  double sum = 0;
  std::size_t included = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (report.infeasible[i]) continue;
    sum += report.costs[i];
    ++included;
  }
  report.mean = included ? sum / static_cast<double>(included) : 0.0;
  double var = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (report.infeasible[i]) continue;
    const double d = report.costs[i] - report.mean;
    var += d * d;
  }
  report.stddev = included > 1 ? std::sqrt(var / static_cast<double>(included - 1)) : 0.0;
  return report;
}

}  // namespace conjvi
