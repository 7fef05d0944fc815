#pragma once

#include <string>

namespace trichain {

/// Rate and saturation constants of the three-species food chain
///   u' = a1*u - b1*u^2 - w0*u*v/(u+D0)
///   v' = -a2*v + w1*u*v/(u+D1) - w2*v*r/(v+D2)
///   r' = c*r^2 - w3*r^2/(v+D3)
/// All fields must be strictly positive; validate() throws otherwise.
struct ModelParams {
  double a1 = 0.0;
  double b1 = 0.0;
  double w0 = 0.0;
  double D0 = 0.0;
  double a2 = 0.0;
  double w1 = 0.0;
  double D1 = 0.0;
  double w2 = 0.0;
  double D2 = 0.0;
  double c = 0.0;
  double w3 = 0.0;
  double D3 = 0.0;

  /// Throws std::invalid_argument listing every nonpositive field.
  void validate() const;

  /// The parameter set used throughout the test fixtures:
  /// a1=1, b1=0.5, w0=0.55, D0=10, a2=1, w1=0.1, D1=13, w2=0.25,
  /// D2=10, c=0.055, w3=1.2, D3=20.
  static ModelParams reference_set();
};

/// One point (u, v, r) of the population phase space. Nonnegative.
struct State {
  double u = 0.0;
  double v = 0.0;
  double r = 0.0;

  void validate() const;
};

/// Reaction rates (du/dt, dv/dt, dr/dt) at a state.
struct Rates {
  double du = 0.0;
  double dv = 0.0;
  double dr = 0.0;
};

/// Evaluates the reaction terms at s. Pure; no validation in the hot path,
/// callers construct validated inputs once. Inline: this sits inside the
/// stencil loops of the PDE stepper.
inline Rates eval_rhs(const ModelParams& p, const State& s) noexcept {
  Rates out;
  out.du = p.a1 * s.u - p.b1 * s.u * s.u - p.w0 * (s.u * s.v / (s.u + p.D0));
  out.dv = -p.a2 * s.v + p.w1 * (s.u * s.v / (s.u + p.D1)) - p.w2 * (s.v * s.r / (s.v + p.D2));
  out.dr = p.c * s.r * s.r - p.w3 * s.r * s.r / (s.v + p.D3);
  return out;
}

/// Result of the boundedness-condition check c < k*w3/D3 with
/// k = w0*b1*D3 / (w1*(a1 + a1^2/(4*a2)) + w0*b1*D3), 0 < k < 1.
struct ConditionReport {
  double k = 0.0;
  double rhs = 0.0;  // k*w3/D3
  double c = 0.0;
  bool satisfied = false;

  double margin() const { return rhs - c; }
};

ConditionReport check_condition(const ModelParams& p);

/// Where c sits relative to the interval (w3/(v+D3), w3/D3).
/// Boundaries count as outside (strict inequalities).
enum class RegionClass { BelowLower, RichDynamics, AboveUpper };

RegionClass classify_region(const ModelParams& p, double v);

const char* to_string(RegionClass r);

}  // namespace trichain
