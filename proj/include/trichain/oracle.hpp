#pragma once

#include <optional>
#include <vector>

#include "trichain/model.hpp"
#include "trichain/ode.hpp"

namespace trichain {

/// Everything needed to run the comparison (subsolution) system
///   u1' = a1*u1 - b1*u1^2 - w0*u1*v1/(u1+D0)
///   v1' = -a2*v1 - w*v1*r1          (w = w2, or w4 when D2 < 1)
///   r1' = delta*r1^2
/// alongside the full model: the growth rate delta, the condition constant
/// k, the optional substitute coefficient w4, and initial data large enough
/// that domination holds on [0, 1/(2*delta*r1_0)].
struct OracleConfig {
  double delta = 0.0;
  double k = 0.0;
  std::optional<double> w4;  // only set (and only used) when D2 < 1
  double v1_0 = 0.0;
  double r1_0 = 0.0;

  double comparison_window_end() const { return 1.0 / (2.0 * delta * r1_0); }
  double effective_w2(const ModelParams& p) const {
    return (p.D2 < 1.0 && w4.has_value()) ? *w4 : p.w2;
  }
};

/// Closed form r1(t) = 1/(1/r1_0 - delta*t), valid on [0, 1/(delta*r1_0)).
/// Throws std::domain_error at or past the blow-up time.
double exact_r1(double r1_0, double delta, double t);

/// Closed form v1(t) = v1_0 * exp(-a2*t) * (1 - r1_0*delta*t)^(w2/delta),
/// valid on the same interval as exact_r1.
double exact_v1(double v1_0, double r1_0, double a2, double w2, double delta, double t);

/// Midpoint of the admissible interval (c, k*w3/D3). Throws
/// std::domain_error when the interval is empty (condition unsatisfied).
double choose_delta(const ModelParams& p, const ConditionReport& report);

/// Lower bound 1/(k/D3 - delta/(2*w3)) - D3 that v1 must stay above for
/// the growth condition to hold. A nonpositive value is a degenerate case
/// in which any positive v1 qualifies; the flag reports it.
struct VThreshold {
  double value = 0.0;
  bool positive = false;
};

VThreshold v_threshold(const ModelParams& p, double k, double delta);

/// Initial data (v0, r0) large enough that
///   v1(t) > threshold * safety   for all t in [0, 1/(2*delta*r0)].
/// v1 is decreasing in t, so the window endpoint is the binding point;
/// the search doubles r0 and rounds v0 up to a power of two.
struct LargeData {
  double v0 = 0.0;
  double r0 = 0.0;
};

LargeData choose_blowup_data(const ModelParams& p, const OracleConfig& oc, double safety = 2.0);

/// choose_delta + v_threshold + choose_blowup_data in one call; fills every
/// OracleConfig field (including w4 when D2 < 1).
OracleConfig make_oracle_config(const ModelParams& p, const ConditionReport& report,
                                double safety = 2.0);

/// Whether a full-system trajectory stays above the comparison solutions
/// on the window [0, 1/(2*delta*r1_0)]: v >= v1 - tol and
/// r >= r1 (run with delta/2) - tol at every sample, tol = tol_scale*(1+|x|).
/// Inconclusive when the trajectory ends before the window does.
enum class Domination { Dominated, Violated, Inconclusive };

const char* to_string(Domination d);

Domination check_domination(const Trajectory& full, const OracleConfig& oc, const ModelParams& p,
                            double tol_scale = 1e-6);

/// psi(t) = 1/r0 - c*t + w3 * integral_0^t ds/(v(s)+D3), accumulated with
/// the trapezoidal rule over the trajectory's samples. r blows up exactly
/// where psi vanishes; crossing_time is the first bracketed root (linear
/// interpolation), or nullopt if psi stays positive on the samples.
struct PsiTrace {
  std::vector<double> times;
  std::vector<double> psi_values;
  std::optional<double> crossing_time;
};

PsiTrace psi_trace(const Trajectory& traj, const ModelParams& p, double r0);

}  // namespace trichain
