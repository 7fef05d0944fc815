#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "trichain/model.hpp"
#include "trichain/ode.hpp"
#include "trichain/pde.hpp"

namespace trichain {

inline constexpr const char* kToolVersion = "0.1.0";

enum class RunMode { Ode, Pde1d, Pde2d, CheckCondition, OracleCompare, PsiTrace };

const char* to_string(RunMode m);

/// All parse/validation failures for a config file, collected rather than
/// reported one at a time.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::vector<std::string>& problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Initial data shapes for simulations. Uniform is the only shape valid in
/// ODE modes. Gaussian adds amp*exp(-dist^2/(2*width^2)) per species on a
/// uniform base; cosine adds amp*cos(pi*x/Lx) (times cos(pi*y/Ly) in 2D),
/// which is flux-free at the boundary.
struct InitialDataSpec {
  enum class Kind { Uniform, Gaussian, Cosine };
  Kind kind = Kind::Uniform;
  double u = 0.0;
  double v = 0.0;
  double r = 0.0;
  double amp_u = 0.0;
  double amp_v = 0.0;
  double amp_r = 0.0;
  double center_x = 0.0;
  double center_y = 0.0;
  double width = 1.0;
};

struct OracleOptions {
  double safety = 2.0;
  double u0 = 1.0;  // initial prey density for both systems
  double domination_tol = 1e-6;
};

struct PsiOptions {
  std::optional<double> r0;  // defaults to the run's initial r
};

struct RunConfig {
  RunMode mode = RunMode::CheckCondition;
  ModelParams model;
  IntegratorConfig integrator;
  GridSpec grid;
  InitialDataSpec initial;
  OracleOptions oracle;
  PsiOptions psi;
  std::vector<double> snapshot_times;
  std::string config_path;
};

/// Loads and fully validates a config file for the given mode. The format
/// is a strict key = value text file with [section] headers (a TOML
/// subset: numbers, booleans, quoted strings, arrays of numbers).
/// Sections or keys the mode does not consume are errors; every [model]
/// key is required; all failures are reported together.
RunConfig load_config(const std::string& path, RunMode mode);

/// Same, from an in-memory string (file name only labels error messages).
RunConfig load_config_text(const std::string& text, RunMode mode,
                           const std::string& filename = "<string>");

State build_initial_state(const RunConfig& cfg);
PdeState build_initial_fields(const RunConfig& cfg);

}  // namespace trichain
