#include "trichain/pde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace trichain {

namespace {

constexpr double kNegativityScale = 1e-10;

double max_abs_value(const Field& f) {
  double m = 0.0;
  for (double x : f.values) m = std::max(m, std::abs(x));
  return m;
}

double min_value(const Field& f) {
  double m = f.values.empty() ? 0.0 : f.values[0];
  for (double x : f.values) m = std::min(m, x);
  return m;
}

double max_value(const Field& f) {
  double m = f.values.empty() ? 0.0 : f.values[0];
  for (double x : f.values) m = std::max(m, x);
  return m;
}

bool all_finite(const Field& f) {
  for (double x : f.values) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void check_shape(const GridSpec& g, const Field& f, const char* what) {
  const int ny = g.dim == 2 ? g.ny : 1;
  if (f.nx != g.nx || f.ny != ny ||
      f.values.size() != static_cast<size_t>(g.num_nodes())) {
    std::ostringstream msg;
    msg << what << " field shape (" << f.nx << "x" << f.ny << ") does not match grid (" << g.nx
        << "x" << ny << ")";
    throw std::invalid_argument(msg.str());
  }
}

void zero_boundary(const GridSpec& g, Field& f) {
  if (g.dim == 1) {
    f.values.front() = 0.0;
    f.values.back() = 0.0;
    return;
  }
  for (int i = 0; i < g.nx; ++i) {
    f.at(i, 0) = 0.0;
    f.at(i, g.ny - 1) = 0.0;
  }
  for (int j = 0; j < g.ny; ++j) {
    f.at(0, j) = 0.0;
    f.at(g.nx - 1, j) = 0.0;
  }
}

}  // namespace

const char* to_string(BoundaryKind bc) {
  switch (bc) {
    case BoundaryKind::Neumann: return "neumann";
    case BoundaryKind::Dirichlet: return "dirichlet";
  }
  return "unknown";
}

const char* to_string(PdeStatus s) {
  switch (s) {
    case PdeStatus::ReachedTEnd: return "reached_t_end";
    case PdeStatus::BlowUpDetected: return "blowup_detected";
    case PdeStatus::Diverged: return "diverged";
  }
  return "unknown";
}

double GridSpec::stable_dt_bound() const {
  const double dmax = std::max({d1, d2, d3});
  double h = dx();
  if (dim == 2) h = std::min(h, dy());
  return h * h / (2.0 * dim * dmax);
}

void GridSpec::validate() const {
  if (dim != 1 && dim != 2) throw std::invalid_argument("grid dim must be 1 or 2");
  if (!(Lx > 0.0) || (dim == 2 && !(Ly > 0.0))) {
    throw std::invalid_argument("domain lengths must be > 0");
  }
  if (nx < 3 || (dim == 2 && ny < 3)) {
    throw std::invalid_argument("grid needs at least 3 nodes per axis");
  }
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (!(d1 > 0.0) || !(d2 > 0.0) || !(d3 > 0.0)) {
    throw std::invalid_argument("diffusion coefficients must be > 0");
  }
  const double bound = stable_dt_bound();
  if (dt > bound) {
    std::ostringstream msg;
    msg << "dt = " << dt << " violates the explicit stability bound dx^2/(2*dim*max(d)) = "
        << bound;
    throw std::invalid_argument(msg.str());
  }
}

void RunControl::validate() const {
  if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be > 0");
  if (!(sample_stride > 0.0)) throw std::invalid_argument("sample_stride must be > 0");
  if (!(blowup_threshold > 0.0)) throw std::invalid_argument("blowup_threshold must be > 0");
}

Field Field::constant(const GridSpec& g, double value) {
  Field f;
  f.nx = g.nx;
  f.ny = g.dim == 2 ? g.ny : 1;
  f.values.assign(static_cast<size_t>(g.num_nodes()), value);
  return f;
}

Field laplacian(const GridSpec& g, const Field& f) {
  check_shape(g, f, "laplacian");
  Field out;
  out.nx = f.nx;
  out.ny = f.ny;
  out.values.assign(f.values.size(), 0.0);

  const bool neumann = g.bc == BoundaryKind::Neumann;
  const double inv_dx2 = 1.0 / (g.dx() * g.dx());
  if (g.dim == 1) {
    const int n = g.nx;
    for (int i = 0; i < n; ++i) {
      if (!neumann && (i == 0 || i == n - 1)) continue;  // held boundary
      const int im = i == 0 ? 1 : i - 1;  // mirror ghost at the ends
      const int ip = i == n - 1 ? n - 2 : i + 1;
      out.values[i] = (f.values[im] - 2.0 * f.values[i] + f.values[ip]) * inv_dx2;
    }
    return out;
  }

  const double inv_dy2 = 1.0 / (g.dy() * g.dy());
  for (int j = 0; j < g.ny; ++j) {
    const bool j_edge = (j == 0 || j == g.ny - 1);
    const int jm = j == 0 ? 1 : j - 1;
    const int jp = j == g.ny - 1 ? g.ny - 2 : j + 1;
    for (int i = 0; i < g.nx; ++i) {
      const bool i_edge = (i == 0 || i == g.nx - 1);
      if (!neumann && (i_edge || j_edge)) continue;
      const int im = i == 0 ? 1 : i - 1;
      const int ip = i == g.nx - 1 ? g.nx - 2 : i + 1;
      const double center = f.at(i, j);
      out.at(i, j) = (f.at(im, j) - 2.0 * center + f.at(ip, j)) * inv_dx2 +
                     (f.at(i, jm) - 2.0 * center + f.at(i, jp)) * inv_dy2;
    }
  }
  return out;
}

FieldNorms field_norms(const GridSpec& g, const Field& f) {
  check_shape(g, f, "norms");
  FieldNorms out;
  const double dx = g.dx();
  const double area = g.dim == 2 ? g.Lx * g.Ly : g.Lx;
  double sum1 = 0.0, sum2 = 0.0;
  if (g.dim == 1) {
    for (int i = 0; i < g.nx; ++i) {
      const double w = (i == 0 || i == g.nx - 1) ? 0.5 * dx : dx;
      const double a = std::abs(f.values[i]);
      out.linf = std::max(out.linf, a);
      sum1 += a * w;
      sum2 += a * a * w;
    }
  } else {
    const double dy = g.dy();
    for (int j = 0; j < g.ny; ++j) {
      const double wy = (j == 0 || j == g.ny - 1) ? 0.5 * dy : dy;
      for (int i = 0; i < g.nx; ++i) {
        const double wx = (i == 0 || i == g.nx - 1) ? 0.5 * dx : dx;
        const double a = std::abs(f.at(i, j));
        out.linf = std::max(out.linf, a);
        sum1 += a * (wx * wy);
        sum2 += a * a * (wx * wy);
      }
    }
  }
  out.l1 = sum1 / area;
  out.l2 = std::sqrt(sum2 / area);
  return out;
}

double discrete_mass(const GridSpec& g, const Field& f) {
  check_shape(g, f, "mass");
  const double dx = g.dx();
  double sum = 0.0;
  if (g.dim == 1) {
    for (int i = 0; i < g.nx; ++i) {
      sum += f.values[i] * ((i == 0 || i == g.nx - 1) ? 0.5 * dx : dx);
    }
    return sum;
  }
  const double dy = g.dy();
  for (int j = 0; j < g.ny; ++j) {
    const double wy = (j == 0 || j == g.ny - 1) ? 0.5 * dy : dy;
    for (int i = 0; i < g.nx; ++i) {
      const double wx = (i == 0 || i == g.nx - 1) ? 0.5 * dx : dx;
      sum += f.at(i, j) * wx * wy;
    }
  }
  return sum;
}

namespace {

enum class SweepMode { EulerStep, RhsOnly };

PdeState sweep(const GridSpec& g, const ModelParams& p, const PdeState& state, SweepMode mode,
               bool with_reactions, long* clamp_count) {
  check_shape(g, state.u, "u");
  check_shape(g, state.v, "v");
  check_shape(g, state.r, "r");

  // Negativity floors: values in (-1e-10*scale, 0) count as zero for the
  // reaction evaluation; the stored field keeps them.
  const double floor_u = -kNegativityScale * std::max(1.0, max_abs_value(state.u));
  const double floor_v = -kNegativityScale * std::max(1.0, max_abs_value(state.v));
  const double floor_r = -kNegativityScale * std::max(1.0, max_abs_value(state.r));
  long clamped = 0;
  auto for_reaction = [&clamped](double x, double floor_at) {
    if (x < 0.0 && x > floor_at) {
      ++clamped;
      return 0.0;
    }
    return x;
  };

  const bool euler = mode == SweepMode::EulerStep;
  PdeState next;
  if (euler) {
    // Unvisited (held Dirichlet) boundary nodes keep their values.
    next.u = state.u;
    next.v = state.v;
    next.r = state.r;
  } else {
    next.u = Field::constant(g, 0.0);
    next.v = Field::constant(g, 0.0);
    next.r = Field::constant(g, 0.0);
  }

  const bool neumann = g.bc == BoundaryKind::Neumann;
  const double dt = g.dt;
  const double inv_dx2 = 1.0 / (g.dx() * g.dx());
  const double inv_dy2 = g.dim == 2 ? 1.0 / (g.dy() * g.dy()) : 0.0;
  const int ny = g.dim == 2 ? g.ny : 1;

  for (int j = 0; j < ny; ++j) {
    const bool j_edge = g.dim == 2 && (j == 0 || j == ny - 1);
    const int jm = j == 0 ? 1 : j - 1;
    const int jp = j == ny - 1 ? ny - 2 : j + 1;
    for (int i = 0; i < g.nx; ++i) {
      const bool i_edge = (i == 0 || i == g.nx - 1);
      if (!neumann && (i_edge || j_edge)) continue;  // Dirichlet: held
      const int im = i == 0 ? 1 : i - 1;
      const int ip = i == g.nx - 1 ? g.nx - 2 : i + 1;

      const double uc = state.u.at(i, j);
      const double vc = state.v.at(i, j);
      const double rc = state.r.at(i, j);

      double lap_u = (state.u.at(im, j) - 2.0 * uc + state.u.at(ip, j)) * inv_dx2;
      double lap_v = (state.v.at(im, j) - 2.0 * vc + state.v.at(ip, j)) * inv_dx2;
      double lap_r = (state.r.at(im, j) - 2.0 * rc + state.r.at(ip, j)) * inv_dx2;
      if (g.dim == 2) {
        lap_u += (state.u.at(i, jm) - 2.0 * uc + state.u.at(i, jp)) * inv_dy2;
        lap_v += (state.v.at(i, jm) - 2.0 * vc + state.v.at(i, jp)) * inv_dy2;
        lap_r += (state.r.at(i, jm) - 2.0 * rc + state.r.at(i, jp)) * inv_dy2;
      }

      double du = g.d1 * lap_u;
      double dv = g.d2 * lap_v;
      double dr = g.d3 * lap_r;
      if (with_reactions) {
        const State s{for_reaction(uc, floor_u), for_reaction(vc, floor_v),
                      for_reaction(rc, floor_r)};
        const Rates rates = eval_rhs(p, s);
        du += rates.du;
        dv += rates.dv;
        dr += rates.dr;
      }
      if (euler) {
        next.u.at(i, j) = uc + dt * du;
        next.v.at(i, j) = vc + dt * dv;
        next.r.at(i, j) = rc + dt * dr;
      } else {
        next.u.at(i, j) = du;
        next.v.at(i, j) = dv;
        next.r.at(i, j) = dr;
      }
    }
  }
  if (clamp_count) *clamp_count += clamped;
  return next;
}

}  // namespace

PdeState semi_discrete_rhs(const GridSpec& g, const ModelParams& p, const PdeState& state,
                           bool with_reactions, long* clamp_count) {
  return sweep(g, p, state, SweepMode::RhsOnly, with_reactions, clamp_count);
}

PdeState step(const GridSpec& g, const ModelParams& p, const PdeState& state,
              bool with_reactions, long* clamp_count) {
  return sweep(g, p, state, SweepMode::EulerStep, with_reactions, clamp_count);
}

PdeState step_rk4(const GridSpec& g, const ModelParams& p, const PdeState& state,
                  bool with_reactions) {
  const double dt = g.dt;
  auto blend = [&](const PdeState& base, double h, const PdeState& slope) {
    PdeState out;
    out.u = base.u;
    out.v = base.v;
    out.r = base.r;
    for (size_t i = 0; i < out.u.values.size(); ++i) {
      out.u.values[i] += h * slope.u.values[i];
      out.v.values[i] += h * slope.v.values[i];
      out.r.values[i] += h * slope.r.values[i];
    }
    return out;
  };

  const PdeState k1 = semi_discrete_rhs(g, p, state, with_reactions);
  const PdeState k2 = semi_discrete_rhs(g, p, blend(state, dt / 2.0, k1), with_reactions);
  const PdeState k3 = semi_discrete_rhs(g, p, blend(state, dt / 2.0, k2), with_reactions);
  const PdeState k4 = semi_discrete_rhs(g, p, blend(state, dt, k3), with_reactions);

  PdeState next;
  next.u = state.u;
  next.v = state.v;
  next.r = state.r;
  for (size_t i = 0; i < next.u.values.size(); ++i) {
    next.u.values[i] += dt / 6.0 * (k1.u.values[i] + 2.0 * k2.u.values[i] +
                                    2.0 * k3.u.values[i] + k4.u.values[i]);
    next.v.values[i] += dt / 6.0 * (k1.v.values[i] + 2.0 * k2.v.values[i] +
                                    2.0 * k3.v.values[i] + k4.v.values[i]);
    next.r.values[i] += dt / 6.0 * (k1.r.values[i] + 2.0 * k2.r.values[i] +
                                    2.0 * k3.r.values[i] + k4.r.values[i]);
  }
  return next;
}

PdeRunResult run(const ModelParams& p, const GridSpec& g, const PdeState& init,
                 const RunControl& control) {
  p.validate();
  g.validate();
  control.validate();
  check_shape(g, init.u, "u");
  check_shape(g, init.v, "v");
  check_shape(g, init.r, "r");
  if (min_value(init.u) < 0.0 || min_value(init.v) < 0.0 || min_value(init.r) < 0.0) {
    throw std::invalid_argument("initial data must be nonnegative");
  }

  PdeRunResult result;
  PdeState state = init;
  if (g.bc == BoundaryKind::Dirichlet) {
    zero_boundary(g, state.u);
    zero_boundary(g, state.v);
    zero_boundary(g, state.r);
  }

  std::vector<double> snapshot_times = control.snapshot_times;
  std::sort(snapshot_times.begin(), snapshot_times.end());
  size_t snap_idx = 0;

  const double stride_eps = 1e-9 * control.sample_stride;
  auto record_norms = [&](double t) {
    if (!result.norms.times.empty() && t <= result.norms.times.back()) return;
    const Field* fields[3] = {&state.u, &state.v, &state.r};
    result.norms.times.push_back(t);
    for (int s = 0; s < 3; ++s) {
      const FieldNorms n = field_norms(g, *fields[s]);
      result.norms.linf[s].push_back(n.linf);
      result.norms.l1[s].push_back(n.l1);
      result.norms.l2[s].push_back(n.l2);
    }
  };
  auto capture_snapshots = [&](double t) {
    while (snap_idx < snapshot_times.size() && snapshot_times[snap_idx] <= t + stride_eps) {
      const Field* fields[3] = {&state.u, &state.v, &state.r};
      for (int s = 0; s < 3; ++s) {
        result.snapshots.push_back(Snapshot{s, t, *fields[s]});
      }
      ++snap_idx;
    }
  };

  record_norms(0.0);
  capture_snapshots(0.0);
  {
    const double m0 = std::max({max_abs_value(state.u), max_abs_value(state.v),
                                max_abs_value(state.r)});
    result.report.evidence.push_back({0.0, m0});
  }

  // The blow-up time is extrapolated from the per-step L_inf history of r.
  std::vector<TimeValue> r_history;
  r_history.push_back({0.0, max_abs_value(state.r)});

  const long total_steps =
      static_cast<long>(std::ceil(control.t_end / g.dt - 1e-9));
  double next_sample = control.sample_stride;
  long step_index = 0;
  result.status = PdeStatus::ReachedTEnd;
  result.t_final = 0.0;
  while (step_index < total_steps) {
    state = step(g, p, state, true, &result.clamped);
    ++step_index;
    const double t = static_cast<double>(step_index) * g.dt;
    result.t_final = t;

    if (!all_finite(state.u) || !all_finite(state.v) || !all_finite(state.r)) {
      result.status = PdeStatus::Diverged;
      result.failure_reason = "non-finite field value";
      result.t_final = t;
      record_norms(t);
      break;
    }

    const double linf_u = max_abs_value(state.u);
    const double linf_v = max_abs_value(state.v);
    const double linf_r = max_abs_value(state.r);
    const double amplitude = std::max({linf_u, linf_v, linf_r});
    result.report.evidence.push_back({t, amplitude});
    r_history.push_back({t, linf_r});

    if (t >= next_sample - stride_eps) {
      record_norms(t);
      while (next_sample <= t + stride_eps) next_sample += control.sample_stride;
    }
    capture_snapshots(t);

    // Escape is judged on the signed maxima so a genuine upward escape
    // wins over the collateral negativity the same terminal step can
    // produce in the other species (the reaction stiffness cap is
    // unmeetable in the final step of a blow-up).
    const double peak = std::max({max_value(state.u), max_value(state.v), max_value(state.r)});
    if (peak > control.blowup_threshold) {
      record_norms(t);
      result.status = PdeStatus::BlowUpDetected;
      result.report.detected = true;
      result.report.component = linf_r >= linf_v && linf_r >= linf_u ? 2
                                : (linf_v >= linf_u ? 1 : 0);
      result.report.method = BlowUpMethod::NormEscape;
      result.report.t_estimate = estimate_blowup_time_from_history(r_history).value_or(t);
      break;
    }

    const double min_u = min_value(state.u);
    const double min_v = min_value(state.v);
    const double min_r = min_value(state.r);
    if (min_u < -kNegativityScale * std::max(1.0, linf_u) ||
        min_v < -kNegativityScale * std::max(1.0, linf_v) ||
        min_r < -kNegativityScale * std::max(1.0, linf_r)) {
      result.status = PdeStatus::Diverged;
      result.failure_reason = "negativity beyond tolerance";
      result.t_final = t;
      record_norms(t);
      break;
    }
  }

  if (result.status == PdeStatus::ReachedTEnd) record_norms(result.t_final);
  result.steps = step_index;
  result.final_state = std::move(state);
  return result;
}

}  // namespace trichain
