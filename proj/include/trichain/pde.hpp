#pragma once

#include <array>
#include <string>
#include <vector>

#include "trichain/model.hpp"
#include "trichain/ode.hpp"

namespace trichain {

enum class BoundaryKind { Neumann, Dirichlet };

const char* to_string(BoundaryKind bc);

/// Vertex-centered grid on [0,Lx] (x [0,Ly] in 2D) including boundary
/// nodes, so dx = Lx/(nx-1). Carries the diffusion coefficients because
/// the explicit-Euler stability bound couples them to dt.
struct GridSpec {
  int dim = 1;
  double Lx = 3.14159265358979323846;
  double Ly = 3.14159265358979323846;
  int nx = 315;  // round(pi/0.01)+1; dx is recomputed from Lx and nx
  int ny = 1;
  double dt = 0.01;
  BoundaryKind bc = BoundaryKind::Neumann;
  double d1 = 1e-3;
  double d2 = 1e-3;
  double d3 = 1e-3;

  double dx() const { return Lx / (nx - 1); }
  double dy() const { return dim == 2 ? Ly / (ny - 1) : 0.0; }
  int num_nodes() const { return dim == 2 ? nx * ny : nx; }

  /// dt must stay at or below min(dx,dy)^2 / (2*dim*max(d1,d2,d3)).
  double stable_dt_bound() const;

  /// Throws on nonpositive sizes, nx/ny < 3, or a violated stability bound.
  void validate() const;
};

/// Scalar field on a GridSpec, row-major (index j*nx + i).
struct Field {
  int nx = 0;
  int ny = 1;
  std::vector<double> values;

  static Field constant(const GridSpec& g, double value);
  double& at(int i, int j) { return values[static_cast<size_t>(j) * nx + i]; }
  double at(int i, int j) const { return values[static_cast<size_t>(j) * nx + i]; }
};

struct PdeState {
  Field u;
  Field v;
  Field r;
};

/// Second-order discrete Laplacian: 3-point (1D) or 5-point (2D) stencil.
/// Neumann uses mirror ghost nodes (zero flux); Dirichlet holds boundary
/// values fixed, so boundary entries of the result are zero.
Field laplacian(const GridSpec& g, const Field& f);

struct FieldNorms {
  double linf = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
};

/// Domain-averaged norms: ||f||_p^p = (1/|domain|) * sum |f|^p * cellweight,
/// with trapezoidal cell weights (boundary nodes count half per axis).
FieldNorms field_norms(const GridSpec& g, const Field& f);

/// sum of values * cellweight; conserved by pure Neumann diffusion.
double discrete_mass(const GridSpec& g, const Field& f);

/// Time-derivative fields of the semi-discrete system,
/// d*laplacian(state) + reaction(state), with the same reaction clamping
/// as step(). with_reactions=false gives pure diffusion.
PdeState semi_discrete_rhs(const GridSpec& g, const ModelParams& p, const PdeState& state,
                           bool with_reactions = true, long* clamp_count = nullptr);

/// One forward-Euler step: new = old + dt*(d*laplacian(old) + reaction(old)).
/// Values in (-1e-10*scale, 0) are clamped to zero for the reaction
/// evaluation only (counted via clamp_count); the stored fields are not
/// clamped. with_reactions=false is the pure-diffusion test hook.
PdeState step(const GridSpec& g, const ModelParams& p, const PdeState& state,
              bool with_reactions = true, long* clamp_count = nullptr);

/// Diagnostic classical RK4 step over the same semi-discrete system, for
/// confirming that results do not depend on the time scheme.
PdeState step_rk4(const GridSpec& g, const ModelParams& p, const PdeState& state,
                  bool with_reactions = true);

struct RunControl {
  double t_end = 10.0;
  double sample_stride = 0.1;
  double blowup_threshold = 1e10;
  std::vector<double> snapshot_times;

  void validate() const;
};

/// Norm histories per species at the sampling cadence; species index
/// 0 = u, 1 = v, 2 = r.
struct NormHistory {
  std::vector<double> times;
  std::array<std::vector<double>, 3> linf;
  std::array<std::vector<double>, 3> l1;
  std::array<std::vector<double>, 3> l2;
};

struct Snapshot {
  int species = 0;  // 0 = u, 1 = v, 2 = r
  double t = 0.0;
  Field field;
};

enum class PdeStatus { ReachedTEnd, BlowUpDetected, Diverged };

const char* to_string(PdeStatus s);

struct PdeRunResult {
  NormHistory norms;
  BlowUpReport report;
  std::vector<Snapshot> snapshots;
  PdeStatus status = PdeStatus::ReachedTEnd;
  double t_final = 0.0;
  long steps = 0;
  long clamped = 0;
  std::string failure_reason;  // set when status == Diverged
  PdeState final_state;
};

/// Advances the reaction-diffusion system until t_end, norm escape
/// (L_inf > blowup_threshold), or divergence (NaN/Inf, or negativity
/// beyond -1e-10*scale). Initial data must be nonnegative. Under Dirichlet
/// the boundary nodes are zeroed at start and held.
PdeRunResult run(const ModelParams& p, const GridSpec& g, const PdeState& init,
                 const RunControl& control);

}  // namespace trichain
