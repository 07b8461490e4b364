#pragma once

#include "molp/lp.hpp"
#include "molp/problem.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace molp {

struct NotFeasible : std::runtime_error {
  explicit NotFeasible(const std::string& what) : std::runtime_error("point not feasible: " + what) {}
};

/// Vertices of {Ax >= b, 0 <= x <= ub}. Constraint indexing for active sets:
/// rows 0..m-1 are A rows, m..m+n-1 are x_j >= 0, m+n..m+2n-1 are x_j <= ub_j.
struct VertexSet {
  std::vector<RatVec> points;
  std::vector<std::vector<int>> active_sets;

  int size() const { return static_cast<int>(points.size()); }
};

/// All vertices by exhaustive n-subset enumeration of the stacked rows,
/// deduplicated and sorted lexicographically.
VertexSet enumerate_vertices(const MolpProblem& p);

/// Feasibility of x for {Ax >= b, 0 <= x <= ub}, exact.
bool is_feasible_point(const MolpProblem& p, const RatVec& x);

/// Domination test: x is Pareto-optimal iff the auxiliary LP
///   max sum(e)  s.t.  Cy + e = Cx, e >= 0, y feasible
/// has optimum 0. Throws NotFeasible when x is not in the region.
bool is_pareto(const MolpProblem& p, const RatVec& x);

/// enumerate_vertices filtered by is_pareto.
VertexSet pareto_extreme_set(const MolpProblem& p);

/// Pairs (p,q) of X_E indices sharing >= n-1 independent tight constraints
/// whose midpoint is Pareto-optimal.
std::vector<std::pair<int, int>> pareto_edges(const MolpProblem& p, const VertexSet& xe);

struct WeightCertificate {
  RatVec lambda;  // k, on the unit simplex
  RatVec u;       // m, >= 0
};

/// A rational (lambda, u) making (x, u, lambda) pass verify_sys1, or nullopt
/// when none exists (x not Pareto-optimal). The certificate is an extreme
/// point of the feasibility polytope in (lambda, u).
std::optional<WeightCertificate> certify_weight(const MolpProblem& p, const RatVec& x);

/// Like certify_weight but maximizes u_i; returns the extreme optimizer.
/// nullopt when no certificate exists at all.
std::optional<WeightCertificate> certify_weight_max_ui(const MolpProblem& p, const RatVec& x, int i);

/// Exact vertex test for a feasible point: n linearly independent tight rows.
bool is_vertex_point(const MolpProblem& p, const RatVec& x);

}  // namespace molp
