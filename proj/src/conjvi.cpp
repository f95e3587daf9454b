#include "conjvi/conjvi.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "conjvi/dual_transform.hpp"
#include "conjvi/util.hpp"

namespace conjvi {

GridFn expectation_filter(const GridFn& j, const Disturbance& dist, double gamma,
                          ExtensionChoice ext, bool deterministic_shortcut) {
  const Grid& xg = j.grid();
  if (deterministic_shortcut && dist.is_zero_point()) {
    std::vector<double> vals = j.values();
    for (double& v : vals) v *= gamma;
    return GridFn(xg, std::move(vals));
  }
  const std::size_t n = xg.dim();
  std::vector<double> out(xg.size());
  parallel_for_each(xg.size(), 2048, [&](std::size_t xi) {
    double x[16];
    double q[16];
    xg.point(xi, std::span<double>(x, n));
    double acc = 0;
    for (std::size_t wi = 0; wi < dist.support.size(); ++wi) {
      for (std::size_t d = 0; d < n; ++d) q[d] = x[d] + dist.support[wi][d];
      acc += dist.pmf[wi] * extend(j, std::span<const double>(q, n), ext);
    }
    out[xi] = gamma * acc;
  });
  return GridFn(xg, std::move(out));
}

DCdpContext make_dcdp_context(const ControlProblem& p, const ConjVIConfig& cfg) {
  DCdpContext ctx;

  if (cfg.use_analytic_ci_conj) {
    if (!p.cost.has_analytic_conjugate()) {
      throw std::invalid_argument(
          "conjvi: analytic input-cost conjugate requested but not supplied");
    }
    ctx.analytic_ci_conj = true;
  } else {
    const GridFn ci = sample_on_domain(cfg.inputs, p.cost.input_cost);
    if (!ci.grid_like()) {
      throw std::invalid_argument(
          "conjvi: scattered input sets need an analytic input-cost conjugate");
    }
    const Grid v = build_V(ci);
    ctx.ci_conj = llt(ci, v);
  }

  // Drift images define Z; they are also reused every iteration in step (v).
  const Grid& xg = cfg.state_grid;
  ctx.fs_images.resize(xg.size());
  std::vector<double> x(xg.dim());
  for (std::size_t i = 0; i < xg.size(); ++i) {
    xg.point(i, x);
    ctx.fs_images[i].resize(xg.dim());
    p.dynamics.eval_drift(x, ctx.fs_images[i]);
  }
  ctx.z = build_Z(ctx.fs_images, cfg.z_points_per_axis);

  if (cfg.y_spec.mode == YGridMode::kStatic) {
    const GridFn cs = sample_on_grid(xg, p.cost.state_cost);
    const GridFn ci = sample_on_domain(cfg.inputs, p.cost.input_cost);
    ctx.y = build_Y_static(cs, ci, p.gamma, xg, cfg.y_spec);
  }
  return ctx;
}

GridFn d_cdp_apply(const ControlProblem& p, const GridFn& j,
                   const ConjVIConfig& cfg, const DCdpContext& ctx) {
  const Grid& xg = j.grid();
  const std::size_t n = xg.dim();
  const std::size_t y_count = ctx.y.size();

  const GridFn eps = expectation_filter(j, p.disturbance, p.gamma, cfg.extension,
                                        cfg.deterministic_shortcut);
  const GridFn eps_conj = llt(eps, ctx.y);

  std::vector<double> phi_vals(y_count);
  parallel_for_each(y_count, 2048, [&](std::size_t yi) {
    double y[16];
    double v[16];
    ctx.y.point(yi, std::span<double>(y, n));
    for (std::size_t d = 0; d < n; ++d) y[d] = -y[d];
    p.dynamics.bt_mul(std::span<const double>(y, n),
                      std::span<double>(v, p.input_dim()));
    const std::span<const double> vq(v, p.input_dim());
    const double ci_star = ctx.analytic_ci_conj
                               ? p.cost.input_cost_conjugate(vq)
                               : lerp_extend(*ctx.ci_conj, vq);
    phi_vals[yi] = ci_star + eps_conj[yi];
  });
  const GridFn phi(ctx.y, std::move(phi_vals));
  const GridFn phi_conj = llt(phi, ctx.z);

  const Box z_hull = ctx.z.hull_box();
  std::vector<double> out(xg.size());
  std::vector<int> bad(xg.size(), 0);
  parallel_for_each(xg.size(), 2048, [&](std::size_t xi) {
    const auto& fsx = ctx.fs_images[xi];
    if (!z_hull.contains(fsx, 1e-9)) {
      bad[xi] = 1;
      return;
    }
    out[xi] = lerp_extend(phi_conj, fsx);
  });
  for (std::size_t xi = 0; xi < xg.size(); ++xi) {
    if (bad[xi]) {
      std::ostringstream os;
      os << "d_cdp_apply: Z hull does not contain the drift image of state index "
         << xi;
      throw std::logic_error(os.str());
    }
  }
  std::vector<double> x(n);
  for (std::size_t xi = 0; xi < xg.size(); ++xi) {
    xg.point(xi, x);
    out[xi] += p.cost.state_cost(x);
  }
  return GridFn(xg, std::move(out));
}

SolverReport conjvi_solve(const ControlProblem& p, const ConjVIConfig& cfg) {
  if (!(cfg.termination_bound > 0)) {
    throw std::invalid_argument("conjvi_solve: termination bound must be > 0");
  }
  using clock = std::chrono::steady_clock;

  ConjVIConfig local = cfg;
  DCdpContext ctx = make_dcdp_context(p, local);

  const Grid& xg = local.state_grid;
  const GridFn ci = sample_on_domain(local.inputs, p.cost.input_cost);
  const GridFn cs = sample_on_grid(xg, p.cost.state_cost);
  const bool dynamic_y = local.y_spec.mode == YGridMode::kDynamic;

  GridFn j(xg, std::vector<double>(xg.size(), 0.0));
  GridFn j_next = [&] {
    GridFn f = cs;
    const double ci_min = ci.min_finite();
    for (double& v : f.values()) v -= ci_min;
    return f;
  }();

  SolverReport report;
  while (sup_norm_diff(j_next.values(), j.values()) >= local.termination_bound) {
    if (report.iterations >= local.max_iters) break;
    j = j_next;
    const auto t0 = clock::now();
    if (dynamic_y) {
      ctx.y = build_Y_dynamic(ci, j, p.gamma, xg, local.y_spec);
    }
    j_next = d_cdp_apply(p, j, local, ctx);
    const auto t1 = clock::now();
    ++report.iterations;
    report.wall_times.push_back(std::chrono::duration<double>(t1 - t0).count());
    report.residuals.push_back(sup_norm_diff(j_next.values(), j.values()));
    if (report.residuals.back() > 1e6 * report.residuals.front()) {
      std::ostringstream os;
      os << "conjvi_solve: diverging after " << report.iterations
         << " iterations (residual " << report.residuals.back() << " vs initial "
         << report.residuals.front() << ")";
      throw std::runtime_error(os.str());
    }
  }
  report.converged =
      report.residuals.empty() ||
      report.residuals.back() < local.termination_bound;
  report.final = std::move(j_next);
  return report;
}

double hausdorff_box_to_grid(const Box& box, const Grid& g) {
  if (box.dim() != g.dim()) {
    throw std::invalid_argument("hausdorff_box_to_grid: dimension mismatch");
  }
  double acc = 0;
  for (std::size_t i = 0; i < g.dim(); ++i) {
    const auto& t = g.axis(i);
    double d = g.max_spacing(i) * 0.5;
    d = std::max(d, t.front() - box.lo[i]);
    d = std::max(d, box.hi[i] - t.back());
    d = std::max(d, 0.0);
    acc += d * d;
  }
  return std::sqrt(acc);
}

double hausdorff_points_to_grid(const std::vector<std::vector<double>>& pts,
                                const Grid& g) {
  double worst = 0;
  for (const auto& p : pts) {
    double acc = 0;
    for (std::size_t i = 0; i < g.dim(); ++i) {
      const auto& t = g.axis(i);
      const std::size_t c = g.cell_index(i, p[i]);
      const double d = std::min(std::abs(p[i] - t[c]), std::abs(t[c + 1] - p[i]));
      acc += d * d;
    }
    worst = std::max(worst, acc);
  }
  return std::sqrt(worst);
}

namespace {

// Max absolute finite-difference quotient between adjacent nodes; a lower
// estimate of the true Lipschitz constant.
double lip_estimate(const GridFn& h) {
  if (h.grid_like()) {
    const Grid& g = h.grid();
    const auto& vals = h.values();
    double lip = 0;
    for (std::size_t axis = 0; axis < g.dim(); ++axis) {
      const auto& t = g.axis(axis);
      std::size_t inner = 1;
      for (std::size_t i = axis + 1; i < g.dim(); ++i) inner *= g.axis_size(i);
      const std::size_t outer = g.size() / (t.size() * inner);
      for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t r = 0; r < inner; ++r) {
          const double* src = vals.data() + (o * t.size()) * inner + r;
          for (std::size_t k = 0; k + 1 < t.size(); ++k) {
            const double q = std::abs(src[(k + 1) * inner] - src[k * inner]) /
                             (t[k + 1] - t[k]);
            lip = std::max(lip, q);
          }
        }
      }
    }
    return lip;
  }
  // Scattered: all pairs.
  const auto& pts = h.scattered().points;
  double lip = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t k = i + 1; k < pts.size(); ++k) {
      double d2 = 0;
      for (std::size_t d = 0; d < pts[i].size(); ++d) {
        const double diff = pts[i][d] - pts[k][d];
        d2 += diff * diff;
      }
      if (d2 == 0) continue;
      lip = std::max(lip, std::abs(h[i] - h[k]) / std::sqrt(d2));
    }
  }
  return lip;
}

double domain_bbox_diameter(const Domain& d) {
  return std::visit([](const auto& s) { return s.hull_box().diameter(); }, d);
}

// Sup over the box of the distance to a scattered set, probed on a fine
// lattice; only used when the input set is not grid-like.
double hausdorff_box_to_points(const Box& box, const ScatteredSet& pts) {
  const std::size_t n = box.dim();
  std::size_t per_axis = 1;
  switch (n) {
    case 1: per_axis = 4096; break;
    case 2: per_axis = 64; break;
    case 3: per_axis = 16; break;
    default: per_axis = 8; break;
  }
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= per_axis;
  std::vector<double> q(n);
  double worst = 0;
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = rem % per_axis;
      rem /= per_axis;
      q[i] = box.lo[i] + (box.hi[i] - box.lo[i]) *
                             (per_axis == 1 ? 0.5
                                            : static_cast<double>(k) /
                                                  static_cast<double>(per_axis - 1));
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : pts.points) {
      double d2 = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const double diff = p[i] - q[i];
        d2 += diff * diff;
      }
      best = std::min(best, d2);
    }
    worst = std::max(worst, best);
  }
  return std::sqrt(worst);
}

}  // namespace

ErrorCertificate compute_error_certificate(const ControlProblem& p,
                                           const CertificateInputs& in) {
  ErrorCertificate cert;
  cert.gamma = p.gamma;
  cert.e_e = in.e_e;
  cert.e_t = in.e_t;
  cert.b_norm = p.dynamics.b_norm2();
  cert.diam_y = in.y.hull_box().diameter();
  cert.diam_x_box = p.state_box.diameter();
  cert.diam_u_box = p.input_box.diameter();
  cert.diam_u_d = domain_bbox_diameter(in.inputs);

  const GridFn ci = sample_on_domain(in.inputs, p.cost.input_cost);
  cert.lip_ci = in.lip_ci.value_or(lip_estimate(ci));
  cert.lip_j = in.lip_j.value_or(lip_estimate(in.j));

  if (in.dh_u) {
    cert.dh_u = *in.dh_u;
  } else if (const auto* ug = std::get_if<Grid>(&in.inputs)) {
    cert.dh_u = hausdorff_box_to_grid(p.input_box, *ug);
  } else {
    cert.dh_u = hausdorff_box_to_points(p.input_box, std::get<ScatteredSet>(in.inputs));
  }
  cert.dh_x = hausdorff_box_to_grid(p.state_box, in.state_grid);
  cert.dh_y = hausdorff_box_to_grid(in.y.hull_box(), in.y);
  if (in.v) cert.dh_v = hausdorff_box_to_grid(in.v->hull_box(), *in.v);

  // Drift images of the discrete state space drive the Z term and the e_y
  // constant.
  std::vector<std::vector<double>> images(in.state_grid.size());
  std::vector<double> x(in.state_grid.dim());
  Box img_box;
  for (std::size_t i = 0; i < in.state_grid.size(); ++i) {
    in.state_grid.point(i, x);
    images[i].resize(x.size());
    p.dynamics.eval_drift(x, images[i]);
    if (i == 0) {
      img_box = Box{images[0], images[0]};
    } else {
      for (std::size_t d = 0; d < x.size(); ++d) {
        img_box.lo[d] = std::min(img_box.lo[d], images[i][d]);
        img_box.hi[d] = std::max(img_box.hi[d], images[i][d]);
      }
    }
  }
  cert.diam_fs = img_box.diameter();
  cert.dh_z = hausdorff_points_to_grid(images, in.z);

  if (in.analytic_ci_conj) {
    cert.e_u = 0;
    cert.e_v = 0;
  } else {
    cert.e_u = (cert.b_norm * cert.diam_y + cert.lip_ci) * cert.dh_u;
    cert.e_v = cert.diam_u_d * cert.dh_v;
  }
  cert.e_x = (cert.diam_y + p.gamma * cert.lip_j) * cert.dh_x;
  cert.e_y_bound =
      (cert.diam_fs + cert.diam_x_box + cert.b_norm * cert.diam_u_box) * cert.dh_y;
  cert.e_z = cert.diam_y * cert.dh_z;
  cert.e_d = cert.e_u + cert.e_v + cert.e_x + cert.e_y_bound + cert.e_z;
  cert.fixed_point_bound =
      (p.gamma * (cert.e_e + cert.e_t) + cert.e_d) / (1.0 - p.gamma);
  return cert;
}

}  // namespace conjvi
