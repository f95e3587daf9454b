#include "conjvi/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace conjvi {

void Dynamics::add_bu(std::span<const double> u, std::span<double> out) const {
  for (std::size_t i = 0; i < state_dim; ++i) {
    double acc = 0;
    for (std::size_t j = 0; j < input_dim; ++j) acc += b[i * input_dim + j] * u[j];
    out[i] += acc;
  }
}

void Dynamics::bt_mul(std::span<const double> y, std::span<double> out) const {
  for (std::size_t j = 0; j < input_dim; ++j) {
    double acc = 0;
    for (std::size_t i = 0; i < state_dim; ++i) acc += b[i * input_dim + j] * y[i];
    out[j] = acc;
  }
}

double Dynamics::b_norm2() const {
  // Largest eigenvalue of B^T B via cyclic Jacobi; m is tiny in practice.
  const std::size_t m = input_dim;
  std::vector<double> a(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double acc = 0;
      for (std::size_t k = 0; k < state_dim; ++k) {
        acc += b[k * input_dim + i] * b[k * input_dim + j];
      }
      a[i * m + j] = acc;
    }
  }
  for (int sweep = 0; sweep < 50; ++sweep) {
    double off = 0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) off += std::abs(a[i * m + j]);
    }
    if (off < 1e-14) break;
    for (std::size_t p = 0; p < m; ++p) {
      for (std::size_t q = p + 1; q < m; ++q) {
        const double apq = a[p * m + q];
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a[q * m + q] - a[p * m + p]) / (2 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1.0 / std::sqrt(t * t + 1);
        const double s = t * c;
        for (std::size_t k = 0; k < m; ++k) {
          const double akp = a[k * m + p];
          const double akq = a[k * m + q];
          a[k * m + p] = c * akp - s * akq;
          a[k * m + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < m; ++k) {
          const double apk = a[p * m + k];
          const double aqk = a[q * m + k];
          a[p * m + k] = c * apk - s * aqk;
          a[q * m + k] = s * apk + c * aqk;
        }
      }
    }
  }
  double lam = 0;
  for (std::size_t i = 0; i < m; ++i) lam = std::max(lam, a[i * m + i]);
  return std::sqrt(std::max(0.0, lam));
}

Disturbance Disturbance::deterministic(std::size_t dim) {
  Disturbance d;
  d.support.push_back(std::vector<double>(dim, 0.0));
  d.pmf.push_back(1.0);
  return d;
}

bool Disturbance::is_zero_point() const {
  if (support.size() != 1) return false;
  for (double v : support.front()) {
    if (v != 0.0) return false;
  }
  return true;
}

void Disturbance::validate(std::size_t state_dim) const {
  if (support.empty()) throw std::invalid_argument("Disturbance: empty support");
  if (support.size() != pmf.size()) {
    throw std::invalid_argument("Disturbance: support/pmf size mismatch");
  }
  double total = 0;
  for (double p : pmf) {
    if (p < 0) throw std::invalid_argument("Disturbance: negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("Disturbance: pmf does not sum to 1");
  }
  for (const auto& w : support) {
    if (w.size() != state_dim) {
      throw std::invalid_argument("Disturbance: support dimension mismatch");
    }
  }
}

void ControlProblem::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("ControlProblem: gamma must lie in (0,1)");
  }
  if (state_box.dim() != state_dim() || input_box.dim() != input_dim()) {
    throw std::invalid_argument("ControlProblem: box dimension mismatch");
  }
  for (std::size_t i = 0; i < state_box.dim(); ++i) {
    if (state_box.lo[i] > state_box.hi[i]) {
      throw std::invalid_argument("ControlProblem: empty state box");
    }
  }
  for (std::size_t i = 0; i < input_box.dim(); ++i) {
    if (input_box.lo[i] > input_box.hi[i]) {
      throw std::invalid_argument("ControlProblem: empty input box");
    }
  }
  disturbance.validate(state_dim());
  if (dynamics.b.size() != state_dim() * input_dim()) {
    throw std::invalid_argument("ControlProblem: B shape mismatch");
  }
}

void ControlProblem::step(std::span<const double> x, std::span<const double> u,
                          std::span<const double> w, std::span<double> next) const {
  dynamics.eval_drift(x, next);
  dynamics.add_bu(u, next);
  for (std::size_t i = 0; i < state_dim(); ++i) next[i] += w[i];
}

bool input_admissible(const ControlProblem& p, std::span<const double> fs_x,
                      std::span<const double> bu) {
  const std::size_t n = p.state_dim();
  for (const auto& w : p.disturbance.support) {
    for (std::size_t i = 0; i < n; ++i) {
      const double next = fs_x[i] + bu[i] + w[i];
      if (next < p.state_box.lo[i] || next > p.state_box.hi[i]) return false;
    }
  }
  return true;
}

std::vector<std::size_t> admissible_inputs(const ControlProblem& p,
                                           std::span<const double> x,
                                           const Domain& inputs) {
  const std::size_t n = p.state_dim();
  const std::size_t m = p.input_dim();
  std::vector<double> fs(n);
  p.dynamics.eval_drift(x, fs);

  std::vector<std::size_t> out;
  std::vector<double> u(m), bu(n);
  const std::size_t count = domain_size(inputs);
  for (std::size_t k = 0; k < count; ++k) {
    domain_point(inputs, k, u);
    std::fill(bu.begin(), bu.end(), 0.0);
    p.dynamics.add_bu(u, bu);
    if (input_admissible(p, fs, bu)) out.push_back(k);
  }
  return out;
}

namespace {

double sq_norm(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x * x;
  return s;
}

double override_or(const Overrides& o, const std::string& key, double fallback) {
  auto it = o.find(key);
  return it == o.end() ? fallback : it->second;
}

// Example 1: linear system with quadratic state cost and exponential input
// cost. All parameters fixed.
ControlProblem make_synthetic(bool stochastic) {
  ControlProblem p;
  p.name = stochastic ? "synthetic" : "synthetic-det";
  p.dynamics.state_dim = 2;
  p.dynamics.input_dim = 2;
  const std::vector<double> a = {2, 1, 1, 3};
  p.dynamics.drift = [a](std::span<const double> x, std::span<double> out) {
    out[0] = a[0] * x[0] + a[1] * x[1];
    out[1] = a[2] * x[0] + a[3] * x[1];
  };
  p.dynamics.b = {1, 1, 1, 2};
  p.cost.state_cost = [](std::span<const double> x) { return 10.0 * sq_norm(x); };
  p.cost.input_cost = [](std::span<const double> u) {
    return std::exp(std::abs(u[0])) + std::exp(std::abs(u[1])) - 2.0;
  };
  // Conjugate of sum_j (e^{|t|} - 1) over [-2, 2]^2, separable per coordinate.
  p.cost.input_cost_conjugate = [](std::span<const double> v) {
    auto conj1 = [](double s) {
      const double a = std::abs(s);
      if (a <= 1.0) return -1.0;
      if (a <= std::exp(2.0)) return a * std::log(a) - a;
      return 2.0 * a - std::exp(2.0);
    };
    return 2.0 + conj1(v[0]) + conj1(v[1]);
  };
  p.state_box = Box{{-1, -1}, {1, 1}};
  p.input_box = Box{{-2, -2}, {2, 2}};
  if (stochastic) {
    p.disturbance.support = {{0, 0}, {0.05, 0}, {-0.05, 0}};
    p.disturbance.pmf = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  } else {
    p.disturbance = Disturbance::deterministic(2);
  }
  p.gamma = 0.95;
  return p;
}

// Example 2: inverted pendulum with Euler-discretized nonlinear drift. The
// alpha/beta parameters are not fixed by the benchmark description; defaults
// correspond to tau = 0.05, g/l = 9.8, damping 2, torque gain 2.
ControlProblem make_pendulum(bool stochastic, const Overrides& o) {
  ControlProblem p;
  p.name = stochastic ? "pendulum" : "pendulum-det";
  p.dynamics.state_dim = 2;
  p.dynamics.input_dim = 1;
  const double a12 = override_or(o, "alpha12", 0.05);
  const double a21 = override_or(o, "alpha21", 0.49);
  const double a22 = override_or(o, "alpha22", 0.90);
  const double beta = override_or(o, "beta", 0.10);
  p.dynamics.drift = [a12, a21, a22](std::span<const double> x, std::span<double> out) {
    out[0] = x[0] + a12 * x[1];
    out[1] = a21 * std::sin(x[0]) + a22 * x[1];
  };
  p.dynamics.b = {0, beta};
  p.cost.state_cost = [](std::span<const double> x) { return sq_norm(x); };
  p.cost.input_cost = [](std::span<const double> u) { return sq_norm(u); };
  const double pi = std::acos(-1.0);
  p.state_box = Box{{-pi / 3, -pi}, {pi / 3, pi}};
  p.input_box = Box{{-3}, {3}};
  if (stochastic) {
    const double w1 = 0.025 * pi / 3, w2 = 0.025 * pi;
    for (double f1 : {0.0, w1, -w1, 2 * w1, -2 * w1}) {
      for (double f2 : {0.0, w2, -w2, 2 * w2, -2 * w2}) {
        p.disturbance.support.push_back({f1, f2});
        p.disturbance.pmf.push_back(1.0 / 25);
      }
    }
  } else {
    p.disturbance = Disturbance::deterministic(2);
  }
  p.gamma = 0.95;
  return p;
}

// Example 3: four-state, two-input unstable batch reactor, deterministic
// linear dynamics. A and B default to the Euler discretization (step 0.05) of
// the standard continuous-time benchmark model; override a11..a44, b11..b42
// to change them.
ControlProblem make_batch_reactor(bool lipschitz_cost, const Overrides& o) {
  ControlProblem p;
  p.name = lipschitz_cost ? "batch-reactor-lipschitz" : "batch-reactor";
  p.dynamics.state_dim = 4;
  p.dynamics.input_dim = 2;
  const double h = 0.05;
  const double ac[16] = {1.38,   -0.2077, 6.715,  -5.676,  //
                         -0.5814, -4.29,  0.0,    0.675,   //
                         1.067,  4.273,  -6.654, 5.893,   //
                         0.048,  4.273,  1.343,  -2.104};
  const double bc[8] = {0.0, 0.0, 5.679, 0.0, 1.136, -3.146, 1.136, 0.0};
  std::vector<double> a(16);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double euler = (i == j ? 1.0 : 0.0) + h * ac[i * 4 + j];
      const std::string key = "a" + std::to_string(i + 1) + std::to_string(j + 1);
      a[i * 4 + j] = override_or(o, key, euler);
    }
  }
  p.dynamics.b.resize(8);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 2; ++j) {
      const std::string key = "b" + std::to_string(i + 1) + std::to_string(j + 1);
      p.dynamics.b[i * 2 + j] = override_or(o, key, h * bc[i * 2 + j]);
    }
  }
  p.dynamics.drift = [a](std::span<const double> x, std::span<double> out) {
    for (std::size_t i = 0; i < 4; ++i) {
      double acc = 0;
      for (std::size_t j = 0; j < 4; ++j) acc += a[i * 4 + j] * x[j];
      out[i] = acc;
    }
  };
  if (lipschitz_cost) {
    const double eta = override_or(o, "eta", 0.01);
    if (eta <= 0) throw std::invalid_argument("batch-reactor-lipschitz: eta must be > 0");
    p.cost.state_cost = [eta](std::span<const double> x) {
      double s = -4.0 / (1.0 + eta);
      for (double xi : x) s += 1.0 / (1.0 + eta - std::abs(xi));
      return s;
    };
    p.cost.input_cost = [eta](std::span<const double> u) {
      double s = -2.0 / (2.0 + eta);
      for (double uj : u) s += 1.0 / (2.0 + eta - std::abs(uj));
      return s;
    };
  } else {
    p.cost.state_cost = [](std::span<const double> x) { return 2.0 * sq_norm(x); };
    p.cost.input_cost = [](std::span<const double> u) { return sq_norm(u); };
  }
  p.state_box = Box{{-2, -2, -2, -2}, {2, 2, 2, 2}};
  p.input_box = Box{{-2, -2}, {2, 2}};
  p.disturbance = Disturbance::deterministic(4);
  p.gamma = 0.95;
  return p;
}

}  // namespace

ControlProblem builtin_problem(const std::string& name, const Overrides& overrides) {
  ControlProblem p;
  if (name == "synthetic") {
    p = make_synthetic(true);
  } else if (name == "synthetic-det") {
    p = make_synthetic(false);
  } else if (name == "pendulum") {
    p = make_pendulum(true, overrides);
  } else if (name == "pendulum-det") {
    p = make_pendulum(false, overrides);
  } else if (name == "batch-reactor") {
    p = make_batch_reactor(false, overrides);
  } else if (name == "batch-reactor-lipschitz") {
    p = make_batch_reactor(true, overrides);
  } else {
    throw std::invalid_argument("builtin_problem: unknown name '" + name + "'");
  }
  p.validate();
  return p;
}

Box builtin_state_grid_box(const std::string& name) {
  const double pi = std::acos(-1.0);
  if (name == "synthetic" || name == "synthetic-det") {
    return Box{{-1, -1}, {1, 1}};
  }
  if (name == "pendulum" || name == "pendulum-det") {
    // Strict subset of the state box so that every grid point keeps an
    // admissible input under the full disturbance support.
    return Box{{-pi / 4, -pi}, {pi / 4, pi}};
  }
  if (name == "batch-reactor" || name == "batch-reactor-lipschitz") {
    return Box{{-1, -1, -1, -1}, {1, 1, 1, 1}};
  }
  throw std::invalid_argument("builtin_state_grid_box: unknown name '" + name + "'");
}

}  // namespace conjvi
