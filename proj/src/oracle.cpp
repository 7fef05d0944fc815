#include "trichain/oracle.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace trichain {

namespace {

constexpr double kDataCap = 1e12;  // doubling-search cap on v0 and r0

void require_positive(const char* name, double value) {
  if (!(value > 0.0)) {
    std::ostringstream msg;
    msg << name << " must be > 0, got " << value;
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

double exact_r1(double r1_0, double delta, double t) {
  require_positive("r1_0", r1_0);
  require_positive("delta", delta);
  const double blowup = 1.0 / (delta * r1_0);
  if (!(t >= 0.0) || !(t < blowup)) {
    std::ostringstream msg;
    msg << "exact_r1 defined on [0, " << blowup << "), got t = " << t;
    throw std::domain_error(msg.str());
  }
  return 1.0 / (1.0 / r1_0 - delta * t);
}

double exact_v1(double v1_0, double r1_0, double a2, double w2, double delta, double t) {
  require_positive("v1_0", v1_0);
  require_positive("r1_0", r1_0);
  require_positive("a2", a2);
  require_positive("w2", w2);
  require_positive("delta", delta);
  const double blowup = 1.0 / (delta * r1_0);
  if (!(t >= 0.0) || !(t < blowup)) {
    std::ostringstream msg;
    msg << "exact_v1 defined on [0, " << blowup << "), got t = " << t;
    throw std::domain_error(msg.str());
  }
  return v1_0 * std::exp(-a2 * t) * std::pow(1.0 - r1_0 * delta * t, w2 / delta);
}

double choose_delta(const ModelParams&, const ConditionReport& report) {
  if (!report.satisfied) {
    throw std::domain_error(
        "no admissible delta: the interval (c, k*w3/D3) is empty because the "
        "boundedness condition c < k*w3/D3 does not hold");
  }
  return 0.5 * (report.c + report.rhs);
}

VThreshold v_threshold(const ModelParams& p, double k, double delta) {
  const double divisor = k / p.D3 - delta / (2.0 * p.w3);
  if (!(divisor > 0.0)) {
    std::ostringstream msg;
    msg << "v_threshold requires k/D3 > delta/(2*w3); got divisor " << divisor;
    throw std::domain_error(msg.str());
  }
  VThreshold out;
  out.value = 1.0 / divisor - p.D3;
  out.positive = out.value > 0.0;
  return out;
}

LargeData choose_blowup_data(const ModelParams& p, const OracleConfig& oc, double safety) {
  if (!(safety >= 1.0)) throw std::invalid_argument("safety factor must be >= 1");
  require_positive("delta", oc.delta);

  const VThreshold thr = v_threshold(p, oc.k, oc.delta);
  // A nonpositive threshold is degenerate (any positive v1 qualifies); size
  // the data against 1 so the returned pair is still comfortably large.
  const double target = std::max(thr.value, 1.0) * safety;

  // Grow r0 until the exponential factor over the half window
  // [0, 1/(2*delta*r0)] costs at most a factor of 2.
  double r0 = 64.0;
  while (p.a2 / (2.0 * oc.delta * r0) > std::log(2.0) && r0 < kDataCap) r0 *= 2.0;

  const double window_end = 1.0 / (2.0 * oc.delta * r0);
  const double decay = std::exp(-p.a2 * window_end) *
                       std::pow(0.5, oc.effective_w2(p) / oc.delta);
  const double need = target / decay;
  if (!(need > 0.0) || !std::isfinite(need) || need > kDataCap) {
    std::ostringstream msg;
    msg << "choose_blowup_data: required v0 " << need << " exceeds the search cap " << kDataCap;
    throw std::runtime_error(msg.str());
  }
  LargeData data;
  data.r0 = r0;
  data.v0 = std::exp2(std::ceil(std::log2(need)));

  // The right side of the largeness inequality decreases in t, so holding
  // at the window endpoint means holding everywhere in the window.
  const double v1_end =
      exact_v1(data.v0, data.r0, p.a2, oc.effective_w2(p), oc.delta, window_end);
  if (!(v1_end > thr.value * safety) && thr.positive) {
    throw std::runtime_error("choose_blowup_data: endpoint verification failed");
  }
  return data;
}

OracleConfig make_oracle_config(const ModelParams& p, const ConditionReport& report,
                                double safety) {
  p.validate();
  OracleConfig oc;
  oc.k = report.k;
  oc.delta = choose_delta(p, report);
  if (p.D2 < 1.0) {
    // w4*D2 >= w2 guarantees w4*(v+D2) > w2 for every v >= 0.
    oc.w4 = p.w2 / p.D2 * (1.0 + 1e-9);
  }
  const LargeData data = choose_blowup_data(p, oc, safety);
  oc.v1_0 = data.v0;
  oc.r1_0 = data.r0;
  return oc;
}

const char* to_string(Domination d) {
  switch (d) {
    case Domination::Dominated: return "dominated";
    case Domination::Violated: return "violated";
    case Domination::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

Domination check_domination(const Trajectory& full, const OracleConfig& oc, const ModelParams& p,
                            double tol_scale) {
  require_positive("delta", oc.delta);
  require_positive("r1_0", oc.r1_0);
  const double window_end = oc.comparison_window_end();
  if (full.times.empty() || full.times.back() < window_end) {
    return Domination::Inconclusive;
  }
  const double w2 = oc.effective_w2(p);
  for (size_t i = 0; i < full.times.size(); ++i) {
    const double t = full.times[i];
    if (t >= window_end) break;
    const double v1 = exact_v1(oc.v1_0, oc.r1_0, p.a2, w2, oc.delta, t);
    // The subsolution for r runs with delta/2 in place of delta.
    const double r1 = exact_r1(oc.r1_0, oc.delta / 2.0, t);
    const double v_tol = tol_scale * (1.0 + std::abs(v1));
    const double r_tol = tol_scale * (1.0 + std::abs(r1));
    if (full.states[i].v < v1 - v_tol || full.states[i].r < r1 - r_tol) {
      return Domination::Violated;
    }
  }
  return Domination::Dominated;
}

PsiTrace psi_trace(const Trajectory& traj, const ModelParams& p, double r0) {
  require_positive("r0", r0);
  PsiTrace out;
  out.times.reserve(traj.times.size());
  out.psi_values.reserve(traj.times.size());

  double integral = 0.0;
  double prev_t = 0.0;
  double prev_f = 0.0;
  for (size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    const double f = 1.0 / (traj.states[i].v + p.D3);
    if (i > 0) integral += 0.5 * (prev_f + f) * (t - prev_t);
    prev_t = t;
    prev_f = f;

    const double psi = 1.0 / r0 - p.c * t + p.w3 * integral;
    out.times.push_back(t);
    out.psi_values.push_back(psi);
    if (!out.crossing_time && psi <= 0.0 && i > 0) {
      const double psi_prev = out.psi_values[i - 1];
      const double t_prev = out.times[i - 1];
      out.crossing_time = t_prev + psi_prev * (t - t_prev) / (psi_prev - psi);
    }
  }
  return out;
}

}  // namespace trichain
