#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "trichain/model.hpp"

namespace trichain {

/// Controls for the adaptive Dormand-Prince 5(4) integrator.
struct IntegratorConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double h_init = 1e-4;
  double h_min = 1e-14;
  double h_max = 1.0;
  double blowup_threshold = 1e10;  // norm-escape level M
  double t_end = 100.0;
  double sample_stride = 0.1;  // output cadence in time units
  long max_steps = 50'000'000;

  void validate() const;
};

enum class TerminalStatus { ReachedTEnd, BlowUpDetected, StepCollapse };

const char* to_string(TerminalStatus s);

struct TimeValue {
  double t = 0.0;
  double value = 0.0;
};

enum class BlowUpMethod { NormEscape, StepCollapse };

/// Verdict of the blow-up detector plus the raw evidence behind it.
/// evidence holds one (t, max component magnitude) pair per accepted step.
struct BlowUpReport {
  bool detected = false;
  std::optional<double> t_estimate;
  int component = -1;  // index of the escaping component, -1 if none
  std::vector<TimeValue> evidence;
  BlowUpMethod method = BlowUpMethod::NormEscape;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  TerminalStatus terminal_status = TerminalStatus::ReachedTEnd;
};

struct OdeResult {
  Trajectory trajectory;
  BlowUpReport report;
};

/// Right-hand side callback: fills dydt from (t, y). Autonomous systems
/// simply ignore t.
using RhsFn = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

struct GenericTrajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  TerminalStatus terminal_status = TerminalStatus::ReachedTEnd;
};

struct GenericResult {
  GenericTrajectory trajectory;
  BlowUpReport report;
};

/// Integrates the food chain from s0. Samples land exactly on multiples of
/// cfg.sample_stride; the terminal state is always the last sample.
/// Stops at t_end, at norm escape (any |component| > blowup_threshold), or
/// when the error controller drives the step below h_min.
OdeResult integrate(const ModelParams& p, const State& s0, const IntegratorConfig& cfg);

/// Same contract for a caller-supplied system of dimension s0.size().
GenericResult integrate_generic(const RhsFn& rhs, std::span<const double> s0,
                                const IntegratorConfig& cfg);

/// Extrapolates the blow-up time from a tail of (t, value) samples by a
/// least-squares affine fit of 1/value against t (exact for quadratic
/// growth, where 1/value is affine). Returns nullopt when the tail carries
/// no blow-up evidence: fewer than 3 samples, values not strictly
/// increasing and positive, a nonnegative fitted slope of 1/value, or a
/// root not beyond the data window.
std::optional<double> estimate_blowup_time(std::span<const TimeValue> tail);

/// estimate_blowup_time applied to the trailing strictly-increasing run of
/// a per-step history, restricted to values within a factor 100 of the
/// final one and capped at 48 points.
std::optional<double> estimate_blowup_time_from_history(std::span<const TimeValue> evidence);

}  // namespace trichain
