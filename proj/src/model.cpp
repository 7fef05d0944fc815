#include "trichain/model.hpp"

#include <sstream>
#include <stdexcept>

namespace trichain {

namespace {

void require_positive(std::ostringstream& errors, const char* name, double value) {
  if (!(value > 0.0)) {
    if (errors.tellp() > 0) errors << ", ";
    errors << name << " = " << value << " (must be > 0)";
  }
}

}  // namespace

void ModelParams::validate() const {
  std::ostringstream errors;
  require_positive(errors, "a1", a1);
  require_positive(errors, "b1", b1);
  require_positive(errors, "w0", w0);
  require_positive(errors, "D0", D0);
  require_positive(errors, "a2", a2);
  require_positive(errors, "w1", w1);
  require_positive(errors, "D1", D1);
  require_positive(errors, "w2", w2);
  require_positive(errors, "D2", D2);
  require_positive(errors, "c", c);
  require_positive(errors, "w3", w3);
  require_positive(errors, "D3", D3);
  if (errors.tellp() > 0) {
    throw std::invalid_argument("invalid model parameters: " + errors.str());
  }
}

ModelParams ModelParams::reference_set() {
  ModelParams p;
  p.a1 = 1.0;
  p.b1 = 0.5;
  p.w0 = 0.55;
  p.D0 = 10.0;
  p.a2 = 1.0;
  p.w1 = 0.1;
  p.D1 = 13.0;
  p.w2 = 0.25;
  p.D2 = 10.0;
  p.c = 0.055;
  p.w3 = 1.2;
  p.D3 = 20.0;
  return p;
}

void State::validate() const {
  if (!(u >= 0.0) || !(v >= 0.0) || !(r >= 0.0)) {
    std::ostringstream msg;
    msg << "state components must be nonnegative, got (" << u << ", " << v << ", " << r << ")";
    throw std::invalid_argument(msg.str());
  }
}

ConditionReport check_condition(const ModelParams& p) {
  p.validate();
  ConditionReport rep;
  const double numerator = p.w0 * p.b1 * p.D3;
  const double denominator = p.w1 * (p.a1 + p.a1 * p.a1 / (4.0 * p.a2)) + numerator;
  rep.k = numerator / denominator;
  rep.rhs = rep.k * (p.w3 / p.D3);
  rep.c = p.c;
  rep.satisfied = p.c < rep.rhs;
  return rep;
}

RegionClass classify_region(const ModelParams& p, double v) {
  if (!(v >= 0.0)) throw std::invalid_argument("classify_region requires v >= 0");
  const double upper = p.w3 / p.D3;
  const double lower = p.w3 / (v + p.D3);
  if (p.c >= upper) return RegionClass::AboveUpper;
  if (p.c <= lower) return RegionClass::BelowLower;
  return RegionClass::RichDynamics;
}

const char* to_string(RegionClass r) {
  switch (r) {
    case RegionClass::BelowLower: return "below_lower";
    case RegionClass::RichDynamics: return "rich_dynamics";
    case RegionClass::AboveUpper: return "above_upper";
  }
  return "unknown";
}

}  // namespace trichain
