#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "trichain/model.hpp"
#include "trichain/pde.hpp"

using namespace trichain;

namespace {

constexpr double kPi = 3.14159265358979323846;

GridSpec grid_1d(int nx, double dt) {
  GridSpec g;
  g.dim = 1;
  g.nx = nx;
  g.ny = 1;
  g.dt = dt;
  return g;
}

GridSpec grid_2d(int n, double dt) {
  GridSpec g;
  g.dim = 2;
  g.nx = n;
  g.ny = n;
  g.dt = dt;
  return g;
}

Field fill_1d(const GridSpec& g, double (*f)(double)) {
  Field out = Field::constant(g, 0.0);
  for (int i = 0; i < g.nx; ++i) out.values[i] = f(i * g.dx());
  return out;
}

double max_stencil_error_cos_1d(int nx) {
  const GridSpec g = grid_1d(nx, 1e-4);
  const Field f = fill_1d(g, [](double x) { return std::cos(x); });
  const Field lap = laplacian(g, f);
  double worst = 0.0;
  for (int i = 0; i < g.nx; ++i) {
    worst = std::max(worst, std::abs(lap.values[i] + std::cos(i * g.dx())));
  }
  return worst;
}

double max_stencil_error_coscos_2d(int n) {
  const GridSpec g = grid_2d(n, 1e-4);
  Field f = Field::constant(g, 0.0);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      f.at(i, j) = std::cos(i * g.dx()) * std::cos(j * g.dy());
    }
  }
  const Field lap = laplacian(g, f);
  double worst = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double exact = -2.0 * std::cos(i * g.dx()) * std::cos(j * g.dy());
      worst = std::max(worst, std::abs(lap.at(i, j) - exact));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("grid stability bound is enforced at validation") {
  GridSpec g = grid_1d(101, 0.01);
  CHECK_NOTHROW(g.validate());
  g.d1 = 1.0;  // bound becomes dx^2/2 ~ 5e-4
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  CHECK(g.stable_dt_bound() == doctest::Approx(g.dx() * g.dx() / 2.0));
}

TEST_CASE("laplacian of a constant field vanishes under Neumann") {
  const GridSpec g1 = grid_1d(33, 1e-3);
  const Field lap1 = laplacian(g1, Field::constant(g1, 7.5));
  for (double x : lap1.values) CHECK(x == 0.0);

  const GridSpec g2 = grid_2d(17, 1e-3);
  const Field lap2 = laplacian(g2, Field::constant(g2, 7.5));
  for (double x : lap2.values) CHECK(x == 0.0);
}

TEST_CASE("cos(x) is a discrete Neumann eigenfunction to second order") {
  const double coarse = max_stencil_error_cos_1d(65);
  const double fine = max_stencil_error_cos_1d(129);
  CHECK(coarse < 1e-3);
  const double ratio = coarse / fine;
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
}

TEST_CASE("cos(x)cos(y) maps to -2cos(x)cos(y) to second order") {
  const double coarse = max_stencil_error_coscos_2d(33);
  const double fine = max_stencil_error_coscos_2d(65);
  const double ratio = coarse / fine;
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
}

TEST_CASE("Dirichlet laplacian: sin(x) interior stencil, zero boundary rows") {
  GridSpec g = grid_1d(129, 1e-4);
  g.bc = BoundaryKind::Dirichlet;
  const Field f = fill_1d(g, [](double x) { return std::sin(x); });
  const Field lap = laplacian(g, f);
  CHECK(lap.values.front() == 0.0);
  CHECK(lap.values.back() == 0.0);
  for (int i = 1; i < g.nx - 1; ++i) {
    CHECK(lap.values[i] == doctest::Approx(-std::sin(i * g.dx())).epsilon(5e-4));
  }
}

TEST_CASE("norms: constants and cos(x) against closed forms") {
  const GridSpec g = grid_1d(101, 1e-3);
  const FieldNorms flat = field_norms(g, Field::constant(g, 3.25));
  CHECK(flat.linf == doctest::Approx(3.25).epsilon(1e-14));
  CHECK(flat.l1 == doctest::Approx(3.25).epsilon(1e-12));
  CHECK(flat.l2 == doctest::Approx(3.25).epsilon(1e-12));

  const FieldNorms wave = field_norms(g, fill_1d(g, [](double x) { return std::cos(x); }));
  CHECK(wave.linf == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(wave.l1 == doctest::Approx(2.0 / kPi).epsilon(1e-3));
  CHECK(wave.l2 == doctest::Approx(std::sqrt(0.5)).epsilon(1e-3));
}

TEST_CASE("pure Neumann diffusion conserves discrete mass over 1e4 steps") {
  const ModelParams p = ModelParams::reference_set();

  GridSpec g = grid_1d(33, 0.1);
  PdeState state;
  state.u = fill_1d(g, [](double x) { return 1.0 + std::exp(-4.0 * (x - 1.5) * (x - 1.5)); });
  state.v = fill_1d(g, [](double x) { return 2.0 + std::cos(x); });
  state.r = fill_1d(g, [](double x) { return 0.5 + 0.2 * std::cos(2.0 * x); });
  const double m0_u = discrete_mass(g, state.u);
  const double m0_v = discrete_mass(g, state.v);
  const double m0_r = discrete_mass(g, state.r);
  for (int i = 0; i < 10000; ++i) state = step(g, p, state, /*with_reactions=*/false);
  CHECK(std::abs(discrete_mass(g, state.u) - m0_u) < 1e-10 * std::abs(m0_u));
  CHECK(std::abs(discrete_mass(g, state.v) - m0_v) < 1e-10 * std::abs(m0_v));
  CHECK(std::abs(discrete_mass(g, state.r) - m0_r) < 1e-10 * std::abs(m0_r));

  GridSpec g2 = grid_2d(17, 0.1);
  PdeState flat;
  flat.u = Field::constant(g2, 1.0);
  flat.v = Field::constant(g2, 1.0);
  flat.r = Field::constant(g2, 1.0);
  for (int j = 0; j < g2.ny; ++j) {
    for (int i = 0; i < g2.nx; ++i) {
      flat.v.at(i, j) += std::cos(i * g2.dx()) * std::cos(j * g2.dy());
    }
  }
  const double m2 = discrete_mass(g2, flat.v);
  for (int i = 0; i < 10000; ++i) flat = step(g2, p, flat, /*with_reactions=*/false);
  CHECK(std::abs(discrete_mass(g2, flat.v) - m2) < 1e-10 * std::abs(m2));
}

TEST_CASE("uniform fields follow one forward-Euler ODE step per node") {
  const ModelParams p = ModelParams::reference_set();
  const GridSpec g = grid_2d(9, 1e-3);
  PdeState state;
  state.u = Field::constant(g, 2.0);
  state.v = Field::constant(g, 3.0);
  state.r = Field::constant(g, 1.0);

  double su = 2.0, sv = 3.0, sr = 1.0;
  for (int n = 0; n < 500; ++n) {
    state = step(g, p, state);
    const Rates rates = eval_rhs(p, State{su, sv, sr});
    su += g.dt * rates.du;
    sv += g.dt * rates.dv;
    sr += g.dt * rates.dr;
  }
  double max_dev = 0.0, spread = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      max_dev = std::max(max_dev, std::abs(state.u.at(i, j) - su));
      max_dev = std::max(max_dev, std::abs(state.v.at(i, j) - sv));
      max_dev = std::max(max_dev, std::abs(state.r.at(i, j) - sr));
      spread = std::max(spread, std::abs(state.v.at(i, j) - state.v.at(0, 0)));
    }
  }
  CHECK(max_dev < 1e-13 * std::max({su, sv, sr, 1.0}));
  CHECK(spread == 0.0);  // spatially constant to the bit
}

TEST_CASE("run: uniform large data escapes the norm threshold in finite time") {
  const ModelParams p = ModelParams::reference_set();
  GridSpec g = grid_2d(17, 1e-4);
  PdeState init;
  init.u = Field::constant(g, 1.0);
  init.v = Field::constant(g, 1024.0);
  init.r = Field::constant(g, 64.0);

  RunControl control;
  control.t_end = 1.0;
  control.sample_stride = 0.01;
  const PdeRunResult result = run(p, g, init, control);
  CHECK(result.status == PdeStatus::BlowUpDetected);
  REQUIRE(result.report.detected);
  CHECK(result.report.component == 2);
  REQUIRE(result.report.t_estimate.has_value());
  CHECK(*result.report.t_estimate > 0.2);
  CHECK(*result.report.t_estimate < 0.5);
  // L1 and L2 escape along with Linf for uniform data.
  CHECK(result.norms.l1[2].back() > 1e9);
  CHECK(result.norms.l2[2].back() > 1e9);
}

TEST_CASE("cos(x) decays by the exact discrete factor under Euler diffusion") {
  // cos(x_i) is an exact eigenvector of the mirror-ghost stencil with
  // eigenvalue (2 - 2cos(dx))/dx^2, so the fully discrete solution is
  // known in closed form.
  const ModelParams p = ModelParams::reference_set();
  GridSpec g = grid_1d(65, 0.05);
  PdeState state;
  state.u = Field::constant(g, 0.0);
  state.v = fill_1d(g, [](double x) { return 2.0 + std::cos(x); });
  state.r = Field::constant(g, 0.0);

  const int steps = 1000;
  for (int n = 0; n < steps; ++n) state = step(g, p, state, /*with_reactions=*/false);

  const double lambda = (2.0 - 2.0 * std::cos(g.dx())) / (g.dx() * g.dx());
  const double factor = std::pow(1.0 - g.dt * g.d2 * lambda, steps);
  for (int i = 0; i < g.nx; ++i) {
    const double expected = 2.0 + std::cos(i * g.dx()) * factor;
    CHECK(state.v.values[i] == doctest::Approx(expected).epsilon(1e-11));
  }
}

TEST_CASE("diffusion-only step agrees exactly with the standalone laplacian") {
  const ModelParams p = ModelParams::reference_set();
  for (int dim : {1, 2}) {
    GridSpec g = dim == 1 ? grid_1d(33, 1e-3) : grid_2d(17, 1e-3);
    for (BoundaryKind bc : {BoundaryKind::Neumann, BoundaryKind::Dirichlet}) {
      g.bc = bc;
      PdeState state;
      state.u = Field::constant(g, 0.0);
      state.v = Field::constant(g, 0.0);
      state.r = Field::constant(g, 0.0);
      const int ny = dim == 2 ? g.ny : 1;
      for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
          const double x = i * g.dx(), y = dim == 2 ? j * g.dy() : 0.0;
          state.u.at(i, j) = 1.0 + std::sin(x + 0.3 * y);
          state.v.at(i, j) = 2.0 + std::cos(2.0 * x) * std::cos(y);
          state.r.at(i, j) = 0.5 + 0.1 * x + 0.05 * y;
        }
      }
      const PdeState next = step(g, p, state, /*with_reactions=*/false);
      const Field lap_v = laplacian(g, state.v);
      for (size_t i = 0; i < next.v.values.size(); ++i) {
        CHECK(next.v.values[i] == state.v.values[i] + g.dt * (g.d2 * lap_v.values[i]));
      }
    }
  }
}

TEST_CASE("norm ordering l1 <= l2 <= linf on arbitrary fields") {
  // The norms are domain means, so the usual power-mean ordering applies.
  uint64_t s = 0x853c49e6748fea9bull;
  auto uniform = [&s]() {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    return static_cast<double>(s >> 11) / 9007199254740992.0;
  };
  const GridSpec g = grid_2d(17, 1e-3);
  for (int trial = 0; trial < 50; ++trial) {
    Field f = Field::constant(g, 0.0);
    for (double& x : f.values) x = 10.0 * uniform() - 3.0;
    const FieldNorms n = field_norms(g, f);
    CHECK(n.l1 <= n.l2 + 1e-12);
    CHECK(n.l2 <= n.linf + 1e-12);
  }
}

TEST_CASE("run: gaussian bump over a large base blows up with ordered norms") {
  const ModelParams p = ModelParams::reference_set();
  GridSpec g = grid_2d(33, 1e-4);
  PdeState init;
  init.u = Field::constant(g, 1.0);
  init.v = Field::constant(g, 1024.0);
  init.r = Field::constant(g, 48.0);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double dx = i * g.dx() - kPi / 2, dy = j * g.dy() - kPi / 2;
      init.r.at(i, j) += 32.0 * std::exp(-(dx * dx + dy * dy));
    }
  }
  RunControl control;
  control.t_end = 1.0;
  control.sample_stride = 0.01;
  const PdeRunResult result = run(p, g, init, control);
  CHECK(result.status == PdeStatus::BlowUpDetected);
  for (size_t i = 0; i < result.norms.times.size(); ++i) {
    CHECK(result.norms.l1[2][i] <= result.norms.l2[2][i] + 1e-9);
    CHECK(result.norms.l2[2][i] <= result.norms.linf[2][i] + 1e-9);
  }
  // The bump grows fastest, so the peak pulls ahead of the mean.
  CHECK(result.norms.linf[2].back() > 2.0 * result.norms.l1[2].back());
}

TEST_CASE("run: small uniform data stays bounded through t = 200") {
  const ModelParams p = ModelParams::reference_set();
  GridSpec g = grid_1d(65, 0.01);
  PdeState init;
  init.u = Field::constant(g, 1.0);
  init.v = Field::constant(g, 1.0);
  init.r = Field::constant(g, 1.0);

  RunControl control;
  control.t_end = 200.0;
  control.sample_stride = 5.0;
  const PdeRunResult result = run(p, g, init, control);
  CHECK(result.status == PdeStatus::ReachedTEnd);
  for (int s = 0; s < 3; ++s) {
    for (double x : result.norms.linf[s]) CHECK(x < 100.0);
  }
}

TEST_CASE("run: negativity past tolerance diverges when nothing escaped") {
  // With the threshold parked beyond the overshoot scale, the stiff final
  // steps drive v negative first and the run must flag it.
  const ModelParams p = ModelParams::reference_set();
  GridSpec g = grid_1d(11, 1e-4);
  PdeState init;
  init.u = Field::constant(g, 1.0);
  init.v = Field::constant(g, 1024.0);
  init.r = Field::constant(g, 64.0);

  RunControl control;
  control.t_end = 1.0;
  control.sample_stride = 0.1;
  control.blowup_threshold = 1e300;
  const PdeRunResult result = run(p, g, init, control);
  CHECK(result.status == PdeStatus::Diverged);
  CHECK_FALSE(result.failure_reason.empty());
}

TEST_CASE("RK4 diagnostic stepping agrees with forward Euler as dt shrinks") {
  const ModelParams p = ModelParams::reference_set();
  auto final_gap = [&p](double dt) {
    GridSpec g = grid_1d(33, dt);
    PdeState euler;
    euler.u = fill_1d(g, [](double x) { return 1.0 + 0.2 * std::cos(x); });
    euler.v = fill_1d(g, [](double x) { return 3.0 + std::cos(x); });
    euler.r = fill_1d(g, [](double x) { return 0.5 + 0.1 * std::cos(2.0 * x); });
    PdeState rk4 = euler;
    const int steps = static_cast<int>(std::lround(1.0 / dt));
    for (int i = 0; i < steps; ++i) {
      euler = step(g, p, euler);
      rk4 = step_rk4(g, p, rk4);
    }
    double gap = 0.0;
    for (int i = 0; i < g.nx; ++i) {
      gap = std::max(gap, std::abs(euler.r.values[i] - rk4.r.values[i]));
      gap = std::max(gap, std::abs(euler.v.values[i] - rk4.v.values[i]));
    }
    return gap;
  };
  // The gap is the Euler scheme's own O(dt) error; it must be small on the
  // solution scale (~3) and halve with dt.
  const double coarse = final_gap(2e-3);
  const double fine = final_gap(1e-3);
  CHECK(coarse < 5e-3);
  CHECK(fine < 0.6 * coarse);
}

TEST_CASE("run: overflowing reaction is reported as divergence, not blow-up") {
  const ModelParams p = ModelParams::reference_set();
  GridSpec g = grid_1d(11, 1e-4);
  PdeState init;
  init.u = Field::constant(g, 1.0);
  init.v = Field::constant(g, 1.0);
  init.r = Field::constant(g, 1e200);

  RunControl control;
  control.t_end = 1.0;
  control.sample_stride = 0.1;
  control.blowup_threshold = 1e305;  // past the overflow point, never reached
  const PdeRunResult result = run(p, g, init, control);
  CHECK(result.status == PdeStatus::Diverged);
  CHECK_FALSE(result.report.detected);
  CHECK_FALSE(result.failure_reason.empty());
}

TEST_CASE("run rejects negative initial data") {
  const ModelParams p = ModelParams::reference_set();
  GridSpec g = grid_1d(11, 1e-3);
  PdeState init;
  init.u = Field::constant(g, 1.0);
  init.v = Field::constant(g, 1.0);
  init.r = Field::constant(g, 1.0);
  init.v.values[3] = -0.5;
  CHECK_THROWS_AS(run(p, g, init, RunControl{}), std::invalid_argument);
}

TEST_CASE("Dirichlet runs stay below the matching Neumann run (fixture check)") {
  const ModelParams p = ModelParams::reference_set();
  GridSpec g = grid_1d(41, 1e-4);
  auto bump = [](double x) { return 700.0 * std::exp(-2.0 * (x - kPi / 2) * (x - kPi / 2)); };
  PdeState init;
  init.u = Field::constant(g, 1.0);
  init.v = fill_1d(g, bump);
  init.r = fill_1d(g, [](double x) { return 48.0 * std::exp(-2.0 * (x - kPi / 2) * (x - kPi / 2)); });

  RunControl control;
  control.t_end = 0.05;
  control.sample_stride = 0.05;

  const PdeRunResult neumann = run(p, g, init, control);
  GridSpec gd = g;
  gd.bc = BoundaryKind::Dirichlet;
  const PdeRunResult dirichlet = run(p, gd, init, control);

  REQUIRE(neumann.status == PdeStatus::ReachedTEnd);
  REQUIRE(dirichlet.status == PdeStatus::ReachedTEnd);
  CHECK(dirichlet.norms.linf[2].back() <= neumann.norms.linf[2].back() + 1e-9);
}

TEST_CASE("snapshots are captured at the requested times") {
  const ModelParams p = ModelParams::reference_set();
  GridSpec g = grid_1d(21, 1e-3);
  PdeState init;
  init.u = Field::constant(g, 1.0);
  init.v = Field::constant(g, 1.0);
  init.r = Field::constant(g, 1.0);

  RunControl control;
  control.t_end = 0.1;
  control.sample_stride = 0.01;
  control.snapshot_times = {0.0, 0.05};
  const PdeRunResult result = run(p, g, init, control);
  REQUIRE(result.snapshots.size() == 6);  // 3 species x 2 times
  CHECK(result.snapshots[0].t == 0.0);
  CHECK(result.snapshots[3].t == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(result.snapshots[3].field.nx == 21);
}
