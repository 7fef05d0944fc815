#include "trichain/ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace trichain {

namespace {

// Dormand-Prince 5(4) tableau (the pair behind MATLAB's ode45), FSAL.
constexpr double kC2 = 1.0 / 5.0;
constexpr double kC3 = 3.0 / 10.0;
constexpr double kC4 = 4.0 / 5.0;
constexpr double kC5 = 8.0 / 9.0;

constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0, kA53 = 64448.0 / 6561.0,
                 kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0, kA63 = 46732.0 / 5247.0,
                 kA64 = 49.0 / 176.0, kA65 = -5103.0 / 18656.0;
// 5th-order weights; also the last stage row (FSAL).
constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                 kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
// Difference between 5th- and 4th-order weights, for the error estimate.
constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0, kE4 = 71.0 / 1920.0,
                 kE5 = -17253.0 / 339200.0, kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;

constexpr double kSafety = 0.9;
constexpr double kShrinkLimit = 0.2;
constexpr double kGrowthLimit = 5.0;

double max_abs(std::span<const double> y, int* index = nullptr) {
  double best = 0.0;
  int best_i = -1;
  for (size_t i = 0; i < y.size(); ++i) {
    const double a = std::abs(y[i]);
    if (a > best || best_i < 0) {
      best = a;
      best_i = static_cast<int>(i);
    }
  }
  if (index) *index = best_i;
  return best;
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
    throw std::invalid_argument("integrator tolerances must be > 0");
  }
  if (!(h_min > 0.0) || !(h_min < h_init) || !(h_init <= h_max)) {
    throw std::invalid_argument("integrator steps must satisfy 0 < h_min < h_init <= h_max");
  }
  if (!(blowup_threshold > 0.0)) {
    throw std::invalid_argument("blowup_threshold must be > 0");
  }
  if (!(t_end > 0.0)) {
    throw std::invalid_argument("t_end must be > 0");
  }
  if (!(sample_stride > 0.0)) {
    throw std::invalid_argument("sample_stride must be > 0");
  }
  if (max_steps <= 0) {
    throw std::invalid_argument("max_steps must be > 0");
  }
}

const char* to_string(TerminalStatus s) {
  switch (s) {
    case TerminalStatus::ReachedTEnd: return "reached_t_end";
    case TerminalStatus::BlowUpDetected: return "blowup_detected";
    case TerminalStatus::StepCollapse: return "step_collapse";
  }
  return "unknown";
}

std::optional<double> estimate_blowup_time(std::span<const TimeValue> tail) {
  if (tail.size() < 3) return std::nullopt;
  for (size_t i = 0; i < tail.size(); ++i) {
    if (!(tail[i].value > 0.0)) return std::nullopt;
    if (i > 0 && (!(tail[i].value > tail[i - 1].value) || !(tail[i].t > tail[i - 1].t))) {
      return std::nullopt;
    }
  }
  // Least-squares fit of x = 1/value against t; the fitted line's root is
  // the estimate.
  const size_t n = tail.size();
  double t_mean = 0.0, x_mean = 0.0;
  for (const TimeValue& s : tail) {
    t_mean += s.t;
    x_mean += 1.0 / s.value;
  }
  t_mean /= static_cast<double>(n);
  x_mean /= static_cast<double>(n);
  double stt = 0.0, stx = 0.0;
  for (const TimeValue& s : tail) {
    const double dt = s.t - t_mean;
    stt += dt * dt;
    stx += dt * (1.0 / s.value - x_mean);
  }
  if (!(stt > 0.0)) return std::nullopt;
  const double slope = stx / stt;
  if (!(slope < 0.0)) return std::nullopt;
  const double root = t_mean - x_mean / slope;
  if (!std::isfinite(root) || !(root > tail.back().t)) return std::nullopt;
  return root;
}

std::optional<double> estimate_blowup_time_from_history(std::span<const TimeValue> evidence) {
  if (evidence.empty()) return std::nullopt;
  const double floor_value = evidence.back().value / 100.0;
  std::vector<TimeValue> tail;
  size_t begin = evidence.size() - 1;
  while (begin > 0 && tail.size() < 47) {
    const TimeValue& prev = evidence[begin - 1];
    if (!(prev.value > 0.0) || !(prev.value < evidence[begin].value) ||
        !(prev.value >= floor_value)) {
      break;
    }
    --begin;
    tail.push_back(prev);  // collected in reverse, flipped below
  }
  std::reverse(tail.begin(), tail.end());
  tail.push_back(evidence.back());
  return estimate_blowup_time(tail);
}

GenericResult integrate_generic(const RhsFn& rhs, std::span<const double> s0,
                                const IntegratorConfig& cfg) {
  cfg.validate();
  if (s0.empty()) throw std::invalid_argument("initial state must be nonempty");
  const size_t dim = s0.size();

  std::vector<double> y(s0.begin(), s0.end());
  std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim);
  std::vector<double> ytmp(dim), y_new(dim);

  GenericResult out;
  GenericTrajectory& traj = out.trajectory;
  BlowUpReport& report = out.report;

  double t = 0.0;
  double last_recorded = -1.0;
  auto record = [&](double time) {
    if (time <= last_recorded) return;
    traj.times.push_back(time);
    traj.states.emplace_back(y);
    last_recorded = time;
  };

  record(0.0);
  report.evidence.push_back({0.0, max_abs(y)});

  double next_sample = cfg.sample_stride;
  double h_ctrl = std::min(cfg.h_init, cfg.h_max);
  rhs(t, y, k1);

  long steps = 0;
  TerminalStatus status = TerminalStatus::ReachedTEnd;
  while (t < cfg.t_end) {
    if (++steps > cfg.max_steps) {
      throw std::runtime_error("integrator exceeded max_steps");
    }
    if (h_ctrl < cfg.h_min) {
      status = TerminalStatus::StepCollapse;
      break;
    }
    // Clip to land exactly on the next sample time and on t_end.
    double h = std::min(h_ctrl, cfg.t_end - t);
    bool hit_sample = false;
    if (next_sample - t <= h) {
      h = next_sample - t;
      hit_sample = true;
    }
    if (t + h == t) {
      status = TerminalStatus::StepCollapse;
      break;
    }

    for (size_t i = 0; i < dim; ++i) ytmp[i] = y[i] + h * kA21 * k1[i];
    rhs(t + kC2 * h, ytmp, k2);
    for (size_t i = 0; i < dim; ++i) ytmp[i] = y[i] + h * (kA31 * k1[i] + kA32 * k2[i]);
    rhs(t + kC3 * h, ytmp, k3);
    for (size_t i = 0; i < dim; ++i) {
      ytmp[i] = y[i] + h * (kA41 * k1[i] + kA42 * k2[i] + kA43 * k3[i]);
    }
    rhs(t + kC4 * h, ytmp, k4);
    for (size_t i = 0; i < dim; ++i) {
      ytmp[i] = y[i] + h * (kA51 * k1[i] + kA52 * k2[i] + kA53 * k3[i] + kA54 * k4[i]);
    }
    rhs(t + kC5 * h, ytmp, k5);
    for (size_t i = 0; i < dim; ++i) {
      ytmp[i] =
          y[i] + h * (kA61 * k1[i] + kA62 * k2[i] + kA63 * k3[i] + kA64 * k4[i] + kA65 * k5[i]);
    }
    rhs(t + h, ytmp, k6);
    for (size_t i = 0; i < dim; ++i) {
      y_new[i] =
          y[i] + h * (kB1 * k1[i] + kB3 * k3[i] + kB4 * k4[i] + kB5 * k5[i] + kB6 * k6[i]);
    }
    rhs(t + h, y_new, k7);

    // Mixed abs/rel error norm (RMS of the componentwise scaled estimate).
    double err_sq = 0.0;
    for (size_t i = 0; i < dim; ++i) {
      const double e = h * (kE1 * k1[i] + kE3 * k3[i] + kE4 * k4[i] + kE5 * k5[i] + kE6 * k6[i] +
                            kE7 * k7[i]);
      const double scale = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      err_sq += (e / scale) * (e / scale);
    }
    double err = std::sqrt(err_sq / static_cast<double>(dim));
    if (!std::isfinite(err)) err = 1e10;

    if (err <= 1.0) {
      t += h;
      std::swap(y, y_new);
      std::swap(k1, k7);  // FSAL

      int escaped = -1;
      const double amplitude = max_abs(y, &escaped);
      report.evidence.push_back({t, amplitude});

      if (hit_sample) {
        record(t);
        const double eps = 1e-9 * cfg.sample_stride;
        while (next_sample <= t + eps) next_sample += cfg.sample_stride;
      }
      if (amplitude > cfg.blowup_threshold) {
        record(t);
        report.detected = true;
        report.component = escaped;
        status = TerminalStatus::BlowUpDetected;
        break;
      }
      const double factor =
          err > 0.0 ? std::clamp(kSafety * std::pow(err, -0.2), kShrinkLimit, kGrowthLimit)
                    : kGrowthLimit;
      h_ctrl = std::min(h * factor, cfg.h_max);
    } else {
      // Rejected: shrink only, never regrow off a failed step.
      const double factor = std::clamp(kSafety * std::pow(err, -0.2), kShrinkLimit, 1.0);
      h_ctrl = h * factor;
    }
  }

  record(t);
  traj.terminal_status = status;
  if (status == TerminalStatus::BlowUpDetected) {
    report.method = BlowUpMethod::NormEscape;
    const std::optional<double> fitted = estimate_blowup_time_from_history(report.evidence);
    // detected implies a finite estimate at or past the last sample.
    report.t_estimate = fitted.value_or(t);
  } else if (status == TerminalStatus::StepCollapse) {
    report.method = BlowUpMethod::StepCollapse;
  }
  return out;
}

OdeResult integrate(const ModelParams& p, const State& s0, const IntegratorConfig& cfg) {
  p.validate();
  s0.validate();
  const double y0[3] = {s0.u, s0.v, s0.r};
  auto rhs = [&p](double, std::span<const double> y, std::span<double> dydt) {
    const Rates rates = eval_rhs(p, State{y[0], y[1], y[2]});
    dydt[0] = rates.du;
    dydt[1] = rates.dv;
    dydt[2] = rates.dr;
  };
  GenericResult generic = integrate_generic(rhs, y0, cfg);

  OdeResult out;
  out.report = std::move(generic.report);
  out.trajectory.terminal_status = generic.trajectory.terminal_status;
  out.trajectory.times = std::move(generic.trajectory.times);
  out.trajectory.states.reserve(generic.trajectory.states.size());
  for (const std::vector<double>& y : generic.trajectory.states) {
    out.trajectory.states.push_back(State{y[0], y[1], y[2]});
  }
  return out;
}

}  // namespace trichain
