#include "conjvi/vi.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "conjvi/dual_transform.hpp"
#include "conjvi/util.hpp"

namespace conjvi {

ExtensionChoice extension_from_string(const std::string& s) {
  if (s == "interp") return ExtensionChoice::kInterp;
  if (s == "interp-extrap") return ExtensionChoice::kInterpExtrap;
  if (s == "nearest") return ExtensionChoice::kNearest;
  throw std::invalid_argument("unknown extension '" + s + "'");
}

std::string to_string(ExtensionChoice e) {
  switch (e) {
    case ExtensionChoice::kInterp: return "interp";
    case ExtensionChoice::kInterpExtrap: return "interp-extrap";
    case ExtensionChoice::kNearest: return "nearest";
  }
  return "?";
}

bool extension_non_expansive(ExtensionChoice e) {
  return e != ExtensionChoice::kInterpExtrap;
}

double extend(const GridFn& h, std::span<const double> q, ExtensionChoice e) {
  switch (e) {
    case ExtensionChoice::kInterp: return lerp_clamped(h, q);
    case ExtensionChoice::kInterpExtrap: return lerp_extend(h, q);
    case ExtensionChoice::kNearest: return nn_extend(h, q);
  }
  throw std::logic_error("extend: bad extension choice");
}

double SolverReport::total_time() const {
  double t = 0;
  for (double w : wall_times) t += w;
  return t;
}

namespace {

std::string format_point(std::span<const double> x) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

}  // namespace

GridFn d_dp_apply(const ControlProblem& p, const GridFn& j,
                  const Domain& inputs, ExtensionChoice ext) {
  const Grid& xg = j.grid();
  const std::size_t n = p.state_dim();
  const std::size_t m = p.input_dim();
  const std::size_t x_count = xg.size();
  const std::size_t u_count = domain_size(inputs);
  const auto& w_support = p.disturbance.support;
  const auto& pmf = p.disturbance.pmf;

  // Hoist the per-state drift and per-input channel products out of the
  // x-by-u scan.
  std::vector<double> fs(x_count * n);
  std::vector<double> xbuf(n);
  for (std::size_t xi = 0; xi < x_count; ++xi) {
    xg.point(xi, xbuf);
    p.dynamics.eval_drift(xbuf, std::span<double>(fs.data() + xi * n, n));
  }
  std::vector<double> bu(u_count * n, 0.0);
  std::vector<double> ci(u_count);
  {
    std::vector<double> u(m);
    for (std::size_t ui = 0; ui < u_count; ++ui) {
      domain_point(inputs, ui, u);
      p.dynamics.add_bu(u, std::span<double>(bu.data() + ui * n, n));
      ci[ui] = p.cost.input_cost(u);
    }
  }

  std::vector<double> out(x_count);
  std::vector<int> infeasible(x_count, 0);

  parallel_for_each(x_count, 64, [&](std::size_t xi) {
    const double* fsx = fs.data() + xi * n;
    double q[16];
    double best = std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t ui = 0; ui < u_count; ++ui) {
      const double* buu = bu.data() + ui * n;
      double expect = 0;
      bool ok = true;
      for (std::size_t wi = 0; wi < w_support.size(); ++wi) {
        const double* w = w_support[wi].data();
        for (std::size_t d = 0; d < n; ++d) {
          const double c = fsx[d] + buu[d] + w[d];
          if (c < p.state_box.lo[d] || c > p.state_box.hi[d]) {
            ok = false;
            break;
          }
          q[d] = c;
        }
        if (!ok) break;
        expect += pmf[wi] * extend(j, std::span<const double>(q, n), ext);
      }
      if (!ok) continue;
      any = true;
      const double total = ci[ui] + p.gamma * expect;
      if (total < best) best = total;
    }
    if (!any) {
      infeasible[xi] = 1;
      return;
    }
    std::vector<double> x(n);
    xg.point(xi, x);
    out[xi] = p.cost.state_cost(x) + best;
  });

  for (std::size_t xi = 0; xi < x_count; ++xi) {
    if (infeasible[xi]) {
      throw InfeasibleStateError("d_dp_apply: no admissible input at state " +
                                 format_point(xg.point(xi)));
    }
  }
  return GridFn(xg, std::move(out));
}

SolverReport vi_solve(const ControlProblem& p, const Grid& state_grid,
                      const Domain& inputs, ExtensionChoice ext,
                      const ViOptions& opts) {
  if (!(opts.termination_bound > 0)) {
    throw std::invalid_argument("vi_solve: termination bound must be > 0");
  }
  using clock = std::chrono::steady_clock;

  GridFn j(state_grid, std::vector<double>(state_grid.size(), 0.0));
  GridFn j_next = [&] {
    if (opts.init) return *opts.init;
    const GridFn ci = sample_on_domain(inputs, p.cost.input_cost);
    const double ci_min = ci.min_finite();
    GridFn cs = sample_on_grid(state_grid, p.cost.state_cost);
    for (double& v : cs.values()) v -= ci_min;
    return cs;
  }();

  SolverReport report;
  while (sup_norm_diff(j_next.values(), j.values()) >= opts.termination_bound) {
    if (report.iterations >= opts.max_iters) break;
    j = j_next;
    const auto t0 = clock::now();
    j_next = d_dp_apply(p, j, inputs, ext);
    const auto t1 = clock::now();
    ++report.iterations;
    report.wall_times.push_back(std::chrono::duration<double>(t1 - t0).count());
    report.residuals.push_back(sup_norm_diff(j_next.values(), j.values()));
  }
  report.converged =
      !report.residuals.empty() && report.residuals.back() < opts.termination_bound;
  if (report.residuals.empty()) {
    // Initial guess already within the bound.
    report.converged = true;
  }
  report.final = std::move(j_next);
  return report;
}

GridFn sample_on_grid(const Grid& g,
                      const std::function<double(std::span<const double>)>& f) {
  std::vector<double> vals(g.size());
  std::vector<double> x(g.dim());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.point(i, x);
    vals[i] = f(x);
  }
  return GridFn(g, std::move(vals));
}

GridFn sample_on_domain(const Domain& d,
                        const std::function<double(std::span<const double>)>& f) {
  const std::size_t count = domain_size(d);
  std::vector<double> vals(count);
  std::vector<double> x(domain_dim(d));
  for (std::size_t i = 0; i < count; ++i) {
    domain_point(d, i, x);
    vals[i] = f(x);
  }
  return GridFn(d, std::move(vals));
}

}  // namespace conjvi
