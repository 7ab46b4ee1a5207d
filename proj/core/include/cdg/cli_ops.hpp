#pragma once

#include <iosfwd>
#include <string>

#include "cdg/config.hpp"

namespace cdg {

struct CurveReport {
  int n_elements = 0;
  int n_curved = 0;
  double min_jacobian = 0.0;
  double max_divergence_defect = 0.0;
  std::string sidecar_path;
};

/// curve subcommand: sub-mesh extraction, boundary displacement, elasticity
/// solve, curving, sidecar write. Prints a min-Jacobian report to `log`.
CurveReport cmd_curve(const CaseConfig& config, std::ostream& log);

struct SolveReport {
  bool converged = false;
  int final_degree = 0;
  long total_iterations = 0;
  double final_residual = 0.0;
  std::string state_path;
  std::string log_path;
};

/// solve subcommand: freestream init, p-refinement steady march, state dump
/// and convergence CSV.
SolveReport cmd_solve(const CaseConfig& config, std::ostream& log);

/// export subcommand: state + mesh (+ optional sidecar) -> legacy VTK.
void cmd_export(const CaseConfig& config, const std::string& state_path,
                const std::string& out_path, std::ostream& log);

struct BenchConfig {
  int p = 4;
  int elements = 1000;
  int repetitions = 20;
  int threads = 0;  // 0: use all available
};

/// bench subcommand: medians for the volume kernel, surface kernel and RK
/// update, padded vs unpadded layout, one vs all cores. CSV to `csv`.
void cmd_bench(const BenchConfig& config, std::ostream& csv);

}  // namespace cdg
