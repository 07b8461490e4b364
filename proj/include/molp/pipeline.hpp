#pragma once

#include "molp/extract.hpp"
#include "molp/sdpa_io.hpp"

#include <optional>

namespace molp {

struct PipelineOptions {
  SysVariant variant = SysVariant::FullU;
  std::optional<Integer> M_override;
  std::optional<std::vector<Integer>> Mi_override;
  int order_override = -1;  // fixed relaxation order; -1 = search upward
  int n_max = -1;           // search ceiling; -1 = min order + 3
  int max_basis = 600;      // moment basis size guard
  bool do_eliminate_lambda = true;
  bool rescale = true;
  bool extreme_filter = true;        // keep only vertex points in X_E
  std::vector<int> systems;          // 1-based subset; empty = all
  long long enumeration_cap = 1000000;
  SolverOptions solver;
  ExtractOptions extract;
  int jobs = 1;
  bool with_oracle = false;
};

struct SystemAttempt {
  int order = 0;
  int basis_size = 0;
  SolveStatus status = SolveStatus::NumericalFailure;
  int iterations = 0;
  double eq_residual = 0, min_eigenvalue = 0, mu_final = 0;
  bool flat = false;
  int t = 0, r = 0;
  std::vector<int> ranks;
  int verified_count = 0, rejected_count = 0;
  std::string failure;
  double seconds = 0;
};

struct SystemReport {
  int index = 0;  // 1-based i
  bool ok = false;
  bool empty = false;  // relaxation certified infeasible: no solutions
  std::vector<SystemAttempt> attempts;
  std::vector<ParetoCandidate> candidates;
  std::vector<std::vector<Integer>> verified_scaled;
  std::string error;
  double seconds = 0;
};

struct ParetoReport {
  MolpProblem problem;
  ScalingConstants consts;
  SysVariant variant = SysVariant::FullU;
  std::uint64_t seed = 0;
  std::vector<SystemReport> systems;
  std::vector<RatVec> xe;           // sorted union of extreme Pareto projections
  std::vector<RatVec> non_extreme;  // Pareto projections that are not vertices
  bool all_systems_ok = false;
  bool oracle_ran = false;
  std::vector<RatVec> oracle_xe;
  std::vector<std::pair<int, int>> oracle_edges;
  bool agreement = false;
  double seconds_total = 0;
};

ParetoReport run_pipeline(const MolpProblem& p, const PipelineOptions& opts);

/// Resolves the scaling constants exactly as run_pipeline would.
ScalingConstants resolve_constants(const MolpProblem& p, const PipelineOptions& opts);

std::string report_to_json(const ParetoReport& r, bool include_timings = true);

/// Set equality of exact point lists (order-insensitive).
bool same_point_set(const std::vector<RatVec>& a, const std::vector<RatVec>& b);

}  // namespace molp
