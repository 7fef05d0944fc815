#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "trichain/config.hpp"
#include "trichain/io.hpp"

using namespace trichain;

namespace {

const char* kReferenceModel =
    "[model]\n"
    "a1 = 1.0\nb1 = 0.5\nw0 = 0.55\nD0 = 10.0\n"
    "a2 = 1.0\nw1 = 0.1\nD1 = 13.0\nw2 = 0.25\nD2 = 10.0\n"
    "c = 0.055\nw3 = 1.2\nD3 = 20.0\n";

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("reference parameter file parses into the expected model") {
  const RunConfig cfg = load_config_text(kReferenceModel, RunMode::CheckCondition);
  CHECK(cfg.model.a1 == 1.0);
  CHECK(cfg.model.b1 == 0.5);
  CHECK(cfg.model.w0 == 0.55);
  CHECK(cfg.model.D1 == 13.0);
  CHECK(cfg.model.c == 0.055);
  CHECK(cfg.model.D3 == 20.0);
}

TEST_CASE("missing model key is reported by name") {
  std::string text = kReferenceModel;
  text.erase(text.find("c = 0.055\n"), 10);
  try {
    load_config_text(text, RunMode::CheckCondition);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    bool named = false;
    for (const std::string& p : e.problems()) {
      if (p.find("c is required") != std::string::npos) named = true;
    }
    CHECK(named);
  }
}

TEST_CASE("negative parameter is a positivity error naming the field") {
  std::string text = kReferenceModel;
  text.replace(text.find("b1 = 0.5"), 8, "b1 = -0.5");
  try {
    load_config_text(text, RunMode::CheckCondition);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("b1") != std::string::npos);
  }
}

TEST_CASE("all failures are collected, not only the first") {
  std::string text = kReferenceModel;
  text.replace(text.find("b1 = 0.5"), 8, "b1 = -0.5");
  text.replace(text.find("w3 = 1.2"), 8, "w3 = -1.2");
  text += "typo_key = 3\n";
  try {
    load_config_text(text, RunMode::CheckCondition);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.problems().size() >= 2);
    const std::string what = e.what();
    CHECK(what.find("b1") != std::string::npos);
    CHECK(what.find("w3") != std::string::npos);
    CHECK(what.find("typo_key") != std::string::npos);
  }
}

TEST_CASE("unknown keys and sections are rejected") {
  CHECK_THROWS_AS(
      load_config_text(std::string(kReferenceModel) + "b2 = 1.0\n", RunMode::CheckCondition),
      ConfigError);
  // A grid section means nothing to check-condition.
  CHECK_THROWS_AS(
      load_config_text(std::string(kReferenceModel) + "[grid]\nnx = 64\n", RunMode::CheckCondition),
      ConfigError);
  // rel_tol is only consumed by ODE-side modes.
  CHECK_THROWS_AS(load_config_text(std::string(kReferenceModel) +
                                       "[initial]\nu = 1\nv = 1\nr = 1\n"
                                       "[integrator]\nrel_tol = 1e-9\n",
                                   RunMode::Pde1d),
                  ConfigError);
}

TEST_CASE("parse errors carry line numbers") {
  try {
    load_config_text("[model]\na1 == 1.0\n", RunMode::CheckCondition, "bad.toml");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("bad.toml:2") != std::string::npos);
  }

  try {
    load_config_text("[model]\na1 = 1.0\na1 = 2.0\n", RunMode::CheckCondition, "dup.toml");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("duplicate key 'a1'") != std::string::npos);
  }
}

TEST_CASE("non-finite numbers are rejected") {
  std::string text = kReferenceModel;
  text.replace(text.find("c = 0.055"), 9, "c = inf");
  CHECK_THROWS_AS(load_config_text(text, RunMode::CheckCondition), ConfigError);
}

TEST_CASE("ODE mode accepts only uniform initial data") {
  const std::string text = std::string(kReferenceModel) +
                           "[initial]\nkind = \"gaussian\"\nu = 1\nv = 1\nr = 1\n";
  CHECK_THROWS_AS(load_config_text(text, RunMode::Ode), ConfigError);
  const std::string ok = std::string(kReferenceModel) + "[initial]\nu = 2\nv = 3\nr = 1\n";
  const RunConfig cfg = load_config_text(ok, RunMode::Ode);
  const State s0 = build_initial_state(cfg);
  CHECK(s0.u == 2.0);
  CHECK(s0.v == 3.0);
  CHECK(s0.r == 1.0);
}

TEST_CASE("pde2d config resolves grid, boundary and snapshot times") {
  const std::string text = std::string(kReferenceModel) +
                           "[integrator]\nt_end = 2.0\nsample_stride = 0.5\n"
                           "[grid]\nnx = 33\nny = 33\ndt = 0.005\nbc = \"dirichlet\"\n"
                           "d1 = 1e-3\nd2 = 1e-3\nd3 = 2e-3\n"
                           "[initial]\nkind = \"cosine\"\nu = 1\nv = 2\nr = 1\n"
                           "amp_u = 0.1\namp_v = 0.2\namp_r = 0.0\n"
                           "[output]\nsnapshot_times = [0.0, 1.0, 2.0]\n";
  const RunConfig cfg = load_config_text(text, RunMode::Pde2d);
  CHECK(cfg.grid.dim == 2);
  CHECK(cfg.grid.nx == 33);
  CHECK(cfg.grid.ny == 33);
  CHECK(cfg.grid.bc == BoundaryKind::Dirichlet);
  CHECK(cfg.grid.d3 == 2e-3);
  CHECK(cfg.integrator.t_end == 2.0);
  CHECK(cfg.snapshot_times.size() == 3);

  const PdeState init = build_initial_fields(cfg);
  // cosine perturbation at the origin: base + amp.
  CHECK(init.u.at(0, 0) == doctest::Approx(1.1).epsilon(1e-12));
  CHECK(init.v.at(0, 0) == doctest::Approx(2.2).epsilon(1e-12));
  // zero-amplitude species stays flat
  CHECK(init.r.at(0, 0) == 1.0);
}

TEST_CASE("perturbations that drive the data negative are rejected") {
  const std::string text = std::string(kReferenceModel) +
                           "[grid]\nnx = 17\ndt = 0.005\n"
                           "[initial]\nkind = \"cosine\"\nu = 1\nv = 1\nr = 1\namp_v = 2.0\n";
  const RunConfig cfg = load_config_text(text, RunMode::Pde1d);
  CHECK_THROWS_AS(build_initial_fields(cfg), ConfigError);
}

TEST_CASE("format_g17 round-trips doubles") {
  for (double x : {0.1, 1.0 / 3.0, 0.058666666666666666, 1e-300, 1e300, 3.14159265358979323846}) {
    CHECK(std::stod(format_g17(x)) == x);
  }
}

TEST_CASE("trajectory CSV layout and reproducibility") {
  Trajectory traj;
  traj.times = {0.0, 0.5};
  traj.states = {State{1.0, 2.0, 3.0}, State{0.5, 1.5, 2.5}};

  const auto path_a = temp_file("trichain_traj_a.csv");
  const auto path_b = temp_file("trichain_traj_b.csv");
  write_trajectory_csv(path_a.string(), traj);
  write_trajectory_csv(path_b.string(), traj);

  const std::string a = slurp(path_a);
  CHECK(a.substr(0, 8) == "t,u,v,r\n");
  CHECK(a.find("0.5,0.5,1.5,2.5") != std::string::npos);
  CHECK(a == slurp(path_b));  // byte-identical outputs for identical inputs
  std::filesystem::remove(path_a);
  std::filesystem::remove(path_b);
}

TEST_CASE("snapshot files start with `nx ny t`") {
  Snapshot snap;
  snap.species = 2;
  snap.t = 0.25;
  snap.field.nx = 3;
  snap.field.ny = 2;
  snap.field.values = {1, 2, 3, 4, 5, 6};
  const auto path = temp_file(snapshot_filename(snap, 4));
  CHECK(snapshot_filename(snap, 4) == "snapshot_r_004.txt");
  write_snapshot(path.string(), snap);
  const std::string content = slurp(path);
  CHECK(content.substr(0, 9) == "3 2 0.25\n");
  CHECK(content.find("4 5 6") != std::string::npos);
  std::filesystem::remove(path);
}

TEST_CASE("norm CSV emits one row per species per time") {
  NormHistory norms;
  norms.times = {0.0};
  for (int s = 0; s < 3; ++s) {
    norms.linf[s] = {double(s)};
    norms.l1[s] = {double(s)};
    norms.l2[s] = {double(s)};
  }
  const auto path = temp_file("trichain_norms.csv");
  write_norm_csv(path.string(), norms);
  const std::string content = slurp(path);
  CHECK(content.find("t,species,linf,l1,l2\n") == 0);
  CHECK(content.find("0,u,0,0,0") != std::string::npos);
  CHECK(content.find("0,v,1,1,1") != std::string::npos);
  CHECK(content.find("0,r,2,2,2") != std::string::npos);
  std::filesystem::remove(path);
}
