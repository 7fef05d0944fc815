#include "trichain/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace trichain {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out.is_open()) {
    throw std::runtime_error("cannot open output file: " + path);
  }
  return out;
}

void close_checked(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out.good()) {
    throw std::runtime_error("failed writing output file: " + path);
  }
}

}  // namespace

std::string format_g17(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream out = open_out(path);
  out << "t,u,v,r\n";
  for (size_t i = 0; i < traj.times.size(); ++i) {
    const State& s = traj.states[i];
    out << format_g17(traj.times[i]) << ',' << format_g17(s.u) << ',' << format_g17(s.v) << ','
        << format_g17(s.r) << '\n';
  }
  close_checked(out, path);
}

void write_norm_csv(const std::string& path, const NormHistory& norms) {
  static const char* kSpecies[3] = {"u", "v", "r"};
  std::ofstream out = open_out(path);
  out << "t,species,linf,l1,l2\n";
  for (size_t i = 0; i < norms.times.size(); ++i) {
    for (int s = 0; s < 3; ++s) {
      out << format_g17(norms.times[i]) << ',' << kSpecies[s] << ','
          << format_g17(norms.linf[s][i]) << ',' << format_g17(norms.l1[s][i]) << ','
          << format_g17(norms.l2[s][i]) << '\n';
    }
  }
  close_checked(out, path);
}

void write_psi_csv(const std::string& path, const PsiTrace& trace) {
  std::ofstream out = open_out(path);
  out << "t,psi\n";
  for (size_t i = 0; i < trace.times.size(); ++i) {
    out << format_g17(trace.times[i]) << ',' << format_g17(trace.psi_values[i]) << '\n';
  }
  close_checked(out, path);
}

void write_compare_csv(const std::string& path, const std::vector<ComparisonRow>& rows) {
  std::ofstream out = open_out(path);
  out << "t,u,v,r,u1,v1_exact,r1_exact\n";
  for (const ComparisonRow& row : rows) {
    out << format_g17(row.t) << ',' << format_g17(row.full.u) << ',' << format_g17(row.full.v)
        << ',' << format_g17(row.full.r) << ',' << format_g17(row.u1) << ','
        << format_g17(row.v1_exact) << ',' << format_g17(row.r1_exact) << '\n';
  }
  close_checked(out, path);
}

void write_snapshot(const std::string& path, const Snapshot& snapshot) {
  std::ofstream out = open_out(path);
  out << snapshot.field.nx << ' ' << snapshot.field.ny << ' ' << format_g17(snapshot.t) << '\n';
  for (int j = 0; j < snapshot.field.ny; ++j) {
    for (int i = 0; i < snapshot.field.nx; ++i) {
      if (i > 0) out << ' ';
      out << format_g17(snapshot.field.at(i, j));
    }
    out << '\n';
  }
  close_checked(out, path);
}

std::string snapshot_filename(const Snapshot& snapshot, int time_index) {
  static const char* kSpecies[3] = {"u", "v", "r"};
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "snapshot_%s_%03d.txt", kSpecies[snapshot.species],
                time_index);
  return buffer;
}

}  // namespace trichain
