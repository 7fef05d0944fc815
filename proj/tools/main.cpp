#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "trichain/config.hpp"
#include "trichain/io.hpp"
#include "trichain/model.hpp"
#include "trichain/ode.hpp"
#include "trichain/oracle.hpp"
#include "trichain/pde.hpp"

namespace {

using json = nlohmann::json;
using namespace trichain;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConditionUnsatisfied = 2;

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::optional<double> t_end;
  std::optional<double> threshold;
  std::optional<std::string> bc;
};

void add_common_flags(CLI::App* cmd, CommonFlags* flags, bool with_bc) {
  cmd->add_option("--config", flags->config_path, "run configuration file")->required();
  cmd->add_option("--out", flags->out_dir, "output directory");
  cmd->add_option("--t-end", flags->t_end, "override integrator t_end");
  cmd->add_option("--threshold", flags->threshold, "override blow-up threshold M");
  if (with_bc) {
    cmd->add_option("--bc", flags->bc, "override boundary condition: neumann|dirichlet")
        ->check(CLI::IsMember({"neumann", "dirichlet"}));
  }
}

RunConfig load_with_overrides(const CommonFlags& flags, RunMode mode) {
  RunConfig cfg = load_config(flags.config_path, mode);
  if (flags.t_end) {
    cfg.integrator.t_end = *flags.t_end;
    cfg.integrator.validate();
  }
  if (flags.threshold) {
    cfg.integrator.blowup_threshold = *flags.threshold;
    cfg.integrator.validate();
  }
  if (flags.bc) {
    cfg.grid.bc = *flags.bc == "dirichlet" ? BoundaryKind::Dirichlet : BoundaryKind::Neumann;
  }
  return cfg;
}

std::filesystem::path prepare_out_dir(const std::string& out_dir) {
  std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

json model_json(const ModelParams& p) {
  return json{{"a1", p.a1}, {"b1", p.b1}, {"w0", p.w0}, {"D0", p.D0},
              {"a2", p.a2}, {"w1", p.w1}, {"D1", p.D1}, {"w2", p.w2},
              {"D2", p.D2}, {"c", p.c},   {"w3", p.w3}, {"D3", p.D3}};
}

json integrator_json(const IntegratorConfig& c) {
  return json{{"rel_tol", c.rel_tol},   {"abs_tol", c.abs_tol},
              {"h_init", c.h_init},     {"h_min", c.h_min},
              {"h_max", c.h_max},       {"threshold", c.blowup_threshold},
              {"t_end", c.t_end},       {"sample_stride", c.sample_stride},
              {"max_steps", c.max_steps}};
}

json grid_json(const GridSpec& g) {
  return json{{"dim", g.dim}, {"Lx", g.Lx},         {"Ly", g.Ly}, {"nx", g.nx},
              {"ny", g.ny},   {"dx", g.dx()},       {"dy", g.dy()},
              {"dt", g.dt},   {"bc", to_string(g.bc)}, {"d1", g.d1}, {"d2", g.d2},
              {"d3", g.d3}};
}

json initial_json(const InitialDataSpec& init) {
  const char* kind = init.kind == InitialDataSpec::Kind::Uniform    ? "uniform"
                     : init.kind == InitialDataSpec::Kind::Gaussian ? "gaussian"
                                                                    : "cosine";
  json out{{"kind", kind}, {"u", init.u}, {"v", init.v}, {"r", init.r}};
  if (init.kind != InitialDataSpec::Kind::Uniform) {
    out["amp_u"] = init.amp_u;
    out["amp_v"] = init.amp_v;
    out["amp_r"] = init.amp_r;
  }
  if (init.kind == InitialDataSpec::Kind::Gaussian) {
    out["center_x"] = init.center_x;
    out["center_y"] = init.center_y;
    out["width"] = init.width;
  }
  return out;
}

json condition_json(const ConditionReport& rep) {
  return json{{"k", rep.k},
              {"rhs", rep.rhs},
              {"c", rep.c},
              {"satisfied", rep.satisfied},
              {"margin", rep.margin()}};
}

json oracle_config_json(const OracleConfig& oc) {
  json out{{"delta", oc.delta}, {"k", oc.k}, {"v1_0", oc.v1_0}, {"r1_0", oc.r1_0},
           {"comparison_window_end", oc.comparison_window_end()}};
  if (oc.w4) {
    out["w4"] = *oc.w4;
  } else {
    out["w4"] = nullptr;
  }
  return out;
}

class ManifestWriter {
 public:
  explicit ManifestWriter(const RunConfig& cfg) : start_(std::chrono::steady_clock::now()) {
    body_["tool"] = "trichain";
    body_["version"] = kToolVersion;
    body_["mode"] = to_string(cfg.mode);
    body_["config_path"] = cfg.config_path;
    json config;
    config["model"] = model_json(cfg.model);
    if (cfg.mode != RunMode::CheckCondition) config["integrator"] = integrator_json(cfg.integrator);
    if (cfg.mode == RunMode::Pde1d || cfg.mode == RunMode::Pde2d) {
      config["grid"] = grid_json(cfg.grid);
      config["snapshot_times"] = cfg.snapshot_times;
    }
    if (cfg.mode == RunMode::Ode || cfg.mode == RunMode::PsiTrace ||
        cfg.mode == RunMode::Pde1d || cfg.mode == RunMode::Pde2d) {
      config["initial"] = initial_json(cfg.initial);
    }
    if (cfg.mode == RunMode::OracleCompare) {
      config["oracle"] = json{{"safety", cfg.oracle.safety},
                              {"u0", cfg.oracle.u0},
                              {"domination_tol", cfg.oracle.domination_tol}};
    }
    body_["config"] = config;
  }

  json& body() { return body_; }

  // Written exactly once, after everything else has succeeded.
  void write(const std::filesystem::path& dir) {
    body_["wall_time_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    std::ofstream out(dir / "manifest.json");
    if (!out.is_open()) {
      throw std::runtime_error("cannot write manifest in " + dir.string());
    }
    out << body_.dump(2) << '\n';
  }

 private:
  json body_;
  std::chrono::steady_clock::time_point start_;
};

int cmd_check_condition(const CommonFlags& flags) {
  RunConfig cfg = load_config(flags.config_path, RunMode::CheckCondition);
  const ConditionReport rep = check_condition(cfg.model);
  std::cout << "k=" << format_g17(rep.k) << " rhs=" << format_g17(rep.rhs)
            << " c=" << format_g17(rep.c) << " satisfied=" << (rep.satisfied ? "true" : "false")
            << '\n';
  if (!flags.out_dir.empty()) {
    ManifestWriter manifest(cfg);
    manifest.body()["condition"] = condition_json(rep);
    manifest.write(prepare_out_dir(flags.out_dir));
  }
  return rep.satisfied ? kExitOk : kExitConditionUnsatisfied;
}

int cmd_simulate_ode(const CommonFlags& flags) {
  RunConfig cfg = load_with_overrides(flags, RunMode::Ode);
  ManifestWriter manifest(cfg);
  const auto dir = prepare_out_dir(flags.out_dir.empty() ? "." : flags.out_dir);

  const OdeResult result = integrate(cfg.model, build_initial_state(cfg), cfg.integrator);
  write_trajectory_csv((dir / "trajectory.csv").string(), result.trajectory);

  manifest.body()["condition"] = condition_json(check_condition(cfg.model));
  manifest.body()["terminal_status"] = to_string(result.trajectory.terminal_status);
  manifest.body()["blowup_detected"] = result.report.detected;
  manifest.body()["t_estimate"] =
      result.report.t_estimate ? json(*result.report.t_estimate) : json(nullptr);
  manifest.body()["samples"] = result.trajectory.times.size();
  manifest.write(dir);

  std::cout << "status=" << to_string(result.trajectory.terminal_status);
  if (result.report.t_estimate) std::cout << " t_estimate=" << format_g17(*result.report.t_estimate);
  std::cout << '\n';
  return kExitOk;
}

int cmd_simulate_pde(const CommonFlags& flags, RunMode mode) {
  RunConfig cfg = load_with_overrides(flags, mode);
  ManifestWriter manifest(cfg);
  const auto dir = prepare_out_dir(flags.out_dir.empty() ? "." : flags.out_dir);

  RunControl control;
  control.t_end = cfg.integrator.t_end;
  control.sample_stride = cfg.integrator.sample_stride;
  control.blowup_threshold = cfg.integrator.blowup_threshold;
  control.snapshot_times = cfg.snapshot_times;

  const PdeRunResult result = run(cfg.model, cfg.grid, build_initial_fields(cfg), control);
  write_norm_csv((dir / "norms.csv").string(), result.norms);
  for (size_t i = 0; i < result.snapshots.size(); ++i) {
    const Snapshot& snap = result.snapshots[i];
    write_snapshot((dir / snapshot_filename(snap, static_cast<int>(i / 3))).string(), snap);
  }

  manifest.body()["condition"] = condition_json(check_condition(cfg.model));
  manifest.body()["terminal_status"] = to_string(result.status);
  manifest.body()["blowup_detected"] = result.report.detected;
  manifest.body()["t_estimate"] =
      result.report.t_estimate ? json(*result.report.t_estimate) : json(nullptr);
  manifest.body()["t_final"] = result.t_final;
  manifest.body()["steps"] = result.steps;
  manifest.body()["clamped_reaction_inputs"] = result.clamped;
  if (!result.failure_reason.empty()) manifest.body()["failure_reason"] = result.failure_reason;
  manifest.write(dir);

  std::cout << "status=" << to_string(result.status);
  if (result.report.t_estimate) std::cout << " t_estimate=" << format_g17(*result.report.t_estimate);
  std::cout << '\n';
  return result.status == PdeStatus::Diverged ? kExitError : kExitOk;
}

int cmd_oracle_compare(const CommonFlags& flags) {
  RunConfig cfg = load_with_overrides(flags, RunMode::OracleCompare);
  const ConditionReport rep = check_condition(cfg.model);
  if (!rep.satisfied) {
    std::cerr << "oracle-compare requires the boundedness condition c < k*w3/D3; got c="
              << format_g17(rep.c) << " >= rhs=" << format_g17(rep.rhs)
              << " so the comparison construction has no admissible delta\n";
    return kExitConditionUnsatisfied;
  }

  ManifestWriter manifest(cfg);
  const auto dir = prepare_out_dir(flags.out_dir.empty() ? "." : flags.out_dir);

  const OracleConfig oc = make_oracle_config(cfg.model, rep, cfg.oracle.safety);

  // Sampling must resolve the comparison window for the verdict to mean
  // anything: cap the stride at a 1/64 of the window.
  IntegratorConfig icfg = cfg.integrator;
  icfg.sample_stride = std::min(icfg.sample_stride, oc.comparison_window_end() / 64.0);

  const State s0{cfg.oracle.u0, oc.v1_0, oc.r1_0};
  const OdeResult full = integrate(cfg.model, s0, icfg);

  const ModelParams p = cfg.model;
  const double w2 = oc.effective_w2(p);
  const double delta = oc.delta;
  auto modified_rhs = [&p, w2, delta](double, std::span<const double> y, std::span<double> dy) {
    dy[0] = p.a1 * y[0] - p.b1 * y[0] * y[0] - p.w0 * (y[0] * y[1] / (y[0] + p.D0));
    dy[1] = -p.a2 * y[1] - w2 * y[1] * y[2];
    dy[2] = delta * y[2] * y[2];
  };
  const double m0[3] = {cfg.oracle.u0, oc.v1_0, oc.r1_0};
  const GenericResult modified = integrate_generic(modified_rhs, m0, icfg);

  const double t_star = 1.0 / (oc.delta * oc.r1_0);
  std::vector<ComparisonRow> rows;
  const size_t n = std::min(full.trajectory.times.size(), modified.trajectory.times.size());
  for (size_t i = 0; i < n; ++i) {
    const double t = full.trajectory.times[i];
    if (!(t < t_star)) break;
    ComparisonRow row;
    row.t = t;
    row.full = full.trajectory.states[i];
    row.u1 = modified.trajectory.states[i][0];
    row.v1_exact = exact_v1(oc.v1_0, oc.r1_0, p.a2, w2, oc.delta, t);
    row.r1_exact = exact_r1(oc.r1_0, oc.delta, t);
    rows.push_back(row);
  }
  write_compare_csv((dir / "compare.csv").string(), rows);

  const Domination verdict =
      check_domination(full.trajectory, oc, p, cfg.oracle.domination_tol);

  manifest.body()["condition"] = condition_json(rep);
  manifest.body()["oracle_config"] = oracle_config_json(oc);
  manifest.body()["domination"] = to_string(verdict);
  manifest.body()["full_terminal_status"] = to_string(full.trajectory.terminal_status);
  manifest.body()["full_t_estimate"] =
      full.report.t_estimate ? json(*full.report.t_estimate) : json(nullptr);
  manifest.body()["modified_terminal_status"] = to_string(modified.trajectory.terminal_status);
  manifest.body()["modified_t_blowup_exact"] = t_star;
  manifest.write(dir);

  std::cout << "domination=" << to_string(verdict) << " delta=" << format_g17(oc.delta)
            << " v1_0=" << format_g17(oc.v1_0) << " r1_0=" << format_g17(oc.r1_0) << '\n';
  return kExitOk;
}

int cmd_psi_trace(const CommonFlags& flags) {
  RunConfig cfg = load_with_overrides(flags, RunMode::PsiTrace);
  ManifestWriter manifest(cfg);
  const auto dir = prepare_out_dir(flags.out_dir.empty() ? "." : flags.out_dir);

  const State s0 = build_initial_state(cfg);
  const OdeResult result = integrate(cfg.model, s0, cfg.integrator);
  const double psi_r0 = cfg.psi.r0.value_or(s0.r);
  if (!(psi_r0 > 0.0)) {
    std::cerr << "psi-trace needs a positive r0 (initial r is "
              << format_g17(s0.r) << "; set [psi] r0 to override)\n";
    return kExitError;
  }
  const PsiTrace trace = psi_trace(result.trajectory, cfg.model, psi_r0);

  write_psi_csv((dir / "psi.csv").string(), trace);
  write_trajectory_csv((dir / "trajectory.csv").string(), result.trajectory);

  manifest.body()["condition"] = condition_json(check_condition(cfg.model));
  manifest.body()["psi_r0"] = psi_r0;
  manifest.body()["psi_crossing_time"] =
      trace.crossing_time ? json(*trace.crossing_time) : json(nullptr);
  manifest.body()["terminal_status"] = to_string(result.trajectory.terminal_status);
  manifest.body()["t_estimate"] =
      result.report.t_estimate ? json(*result.report.t_estimate) : json(nullptr);
  manifest.write(dir);

  std::cout << "psi_crossing="
            << (trace.crossing_time ? format_g17(*trace.crossing_time) : std::string("none"))
            << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trichain: food-chain blow-up simulation toolkit"};
  app.require_subcommand(1);

  CommonFlags check_flags, ode_flags, pde1_flags, pde2_flags, oracle_flags, psi_flags;
  CLI::App* check = app.add_subcommand("check-condition", "evaluate the boundedness condition");
  add_common_flags(check, &check_flags, false);
  CLI::App* ode = app.add_subcommand("simulate-ode", "integrate the ODE system");
  add_common_flags(ode, &ode_flags, false);
  CLI::App* pde1 = app.add_subcommand("simulate-pde1d", "run the 1D reaction-diffusion system");
  add_common_flags(pde1, &pde1_flags, true);
  CLI::App* pde2 = app.add_subcommand("simulate-pde2d", "run the 2D reaction-diffusion system");
  add_common_flags(pde2, &pde2_flags, true);
  CLI::App* oracle =
      app.add_subcommand("oracle-compare", "run the full system against the comparison system");
  add_common_flags(oracle, &oracle_flags, false);
  CLI::App* psi = app.add_subcommand("psi-trace", "trace the blow-up functional along a run");
  add_common_flags(psi, &psi_flags, false);

  try {
    app.parse(argc, argv);
    if (check->parsed()) return cmd_check_condition(check_flags);
    if (ode->parsed()) return cmd_simulate_ode(ode_flags);
    if (pde1->parsed()) return cmd_simulate_pde(pde1_flags, RunMode::Pde1d);
    if (pde2->parsed()) return cmd_simulate_pde(pde2_flags, RunMode::Pde2d);
    if (oracle->parsed()) return cmd_oracle_compare(oracle_flags);
    if (psi->parsed()) return cmd_psi_trace(psi_flags);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
