#pragma once

#include "molp/rational.hpp"

#include <optional>
#include <vector>

namespace molp {

enum class LpStatus { Optimal, Infeasible, Unbounded };

/// min c^T y  s.t.  G y >= h,  0 <= y <= ub (ub entry absent = free above).
struct LpInstance {
  RatVec c;
  RatMat G;
  RatVec h;
  std::vector<std::optional<Rational>> ub;  // size = #vars or empty

  int num_vars() const { return static_cast<int>(c.size()); }
  int num_rows() const { return static_cast<int>(G.rows()); }
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Rational objective;     // valid when Optimal
  RatVec y;               // primal point, valid when Optimal
  RatVec dual;            // one multiplier per G row (>= 0), valid when Optimal
  RatVec dual_ub;         // one multiplier per variable bound (<= 0), valid when Optimal
  std::vector<int> basis; // basic column indices of the internal equality form
};

/// Exact primal simplex (Bland's least-index rule, two phases).
/// On Optimal the returned dual satisfies strong duality exactly:
///   c^T y = h^T dual + sum_j ub_j * dual_ub_j.
LpSolution simplex_solve(const LpInstance& lp);

}  // namespace molp
