#pragma once

#include <string>
#include <vector>

#include "trichain/oracle.hpp"
#include "trichain/ode.hpp"
#include "trichain/pde.hpp"

namespace trichain {

/// Round-trippable decimal formatting used by every writer ("%.17g").
std::string format_g17(double value);

/// header `t,u,v,r`, one row per sample.
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

/// header `t,species,linf,l1,l2`, three rows (u, v, r) per sample time.
void write_norm_csv(const std::string& path, const NormHistory& norms);

/// header `t,psi`.
void write_psi_csv(const std::string& path, const PsiTrace& trace);

/// Paired full/modified-system table, header
/// `t,u,v,r,u1,v1_exact,r1_exact`; rows stop at the shorter of the two.
struct ComparisonRow {
  double t = 0.0;
  State full;
  double u1 = 0.0;
  double v1_exact = 0.0;
  double r1_exact = 0.0;
};

void write_compare_csv(const std::string& path, const std::vector<ComparisonRow>& rows);

/// Plain-text field snapshot: first line `nx ny t`, then one grid row of
/// values per line.
void write_snapshot(const std::string& path, const Snapshot& snapshot);

std::string snapshot_filename(const Snapshot& snapshot, int time_index);

}  // namespace trichain
