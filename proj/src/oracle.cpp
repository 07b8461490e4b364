#include "molp/oracle.hpp"

#include "molp/linalg_exact.hpp"

#include <algorithm>
#include <numeric>

namespace molp {

namespace {

// Stacked constraint rows of {Ax >= b, 0 <= x <= ub}: A rows, then x_j >= 0,
// then -x_j >= -ub_j.
struct StackedRows {
  RatMat S;
  RatVec r;
};

StackedRows stacked_rows(const MolpProblem& p) {
  StackedRows st;
  st.S = RatMat::Zero(p.m + 2 * p.n, p.n);
  st.r = RatVec::Zero(p.m + 2 * p.n);
  for (int i = 0; i < p.m; ++i) {
    for (int j = 0; j < p.n; ++j) st.S(i, j) = Rational(p.A(i, j));
    st.r(i) = Rational(p.b(i));
  }
  for (int j = 0; j < p.n; ++j) {
    st.S(p.m + j, j) = 1;
    st.r(p.m + j) = 0;
    st.S(p.m + p.n + j, j) = -1;
    st.r(p.m + p.n + j) = -Rational(p.ub_primal(j));
  }
  return st;
}

bool lex_less(const RatVec& a, const RatVec& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) != b(i)) return a(i) < b(i);
  }
  return false;
}

std::vector<int> tight_rows(const StackedRows& st, const RatVec& x) {
  std::vector<int> act;
  for (Eigen::Index i = 0; i < st.S.rows(); ++i) {
    Rational v = 0;
    for (Eigen::Index j = 0; j < st.S.cols(); ++j) v += st.S(i, j) * x(j);
    if (v == st.r(i)) act.push_back(static_cast<int>(i));
  }
  return act;
}

}  // namespace

bool is_feasible_point(const MolpProblem& p, const RatVec& x) {
  if (x.size() != p.n) throw DimensionError("point has wrong length");
  for (int j = 0; j < p.n; ++j)
    if (x(j) < 0 || x(j) > Rational(p.ub_primal(j))) return false;
  for (int i = 0; i < p.m; ++i) {
    Rational v = 0;
    for (int j = 0; j < p.n; ++j) v += Rational(p.A(i, j)) * x(j);
    if (v < Rational(p.b(i))) return false;
  }
  return true;
}

VertexSet enumerate_vertices(const MolpProblem& p) {
  const StackedRows st = stacked_rows(p);
  const int total = static_cast<int>(st.S.rows());
  const int n = p.n;

  std::vector<RatVec> points;
  std::vector<int> comb(n);
  std::iota(comb.begin(), comb.end(), 0);

  auto advance = [&]() {
    int i = n - 1;
    while (i >= 0 && comb[i] == total - n + i) --i;
    if (i < 0) return false;
    ++comb[i];
    for (int j = i + 1; j < n; ++j) comb[j] = comb[j - 1] + 1;
    return true;
  };

  do {
    RatMat M(n, n);
    RatVec rhs(n);
    for (int r = 0; r < n; ++r) {
      M.row(r) = st.S.row(comb[r]);
      rhs(r) = st.r(comb[r]);
    }
    const auto x = solve_square(M, rhs);
    if (!x.has_value()) continue;
    if (!is_feasible_point(p, *x)) continue;
    points.push_back(*x);
  } while (advance());

  std::sort(points.begin(), points.end(), lex_less);
  points.erase(std::unique(points.begin(), points.end(),
                           [](const RatVec& a, const RatVec& b) { return a == b; }),
               points.end());

  VertexSet out;
  out.points = std::move(points);
  for (const RatVec& x : out.points) out.active_sets.push_back(tight_rows(st, x));
  return out;
}

bool is_pareto(const MolpProblem& p, const RatVec& x) {
  if (!is_feasible_point(p, x)) throw NotFeasible("is_pareto requires a feasible point");

  // max sum(e) s.t. Cy + e = Cx, Ay >= b, 0 <= y <= ub, e >= 0.
  const int n = p.n, k = p.k, m = p.m;
  LpInstance lp;
  lp.c = RatVec::Zero(n + k);
  for (int l = 0; l < k; ++l) lp.c(n + l) = -1;

  RatVec Cx = RatVec::Zero(k);
  for (int l = 0; l < k; ++l)
    for (int j = 0; j < n; ++j) Cx(l) += Rational(p.C(l, j)) * x(j);

  lp.G = RatMat::Zero(2 * k + m, n + k);
  lp.h = RatVec::Zero(2 * k + m);
  for (int l = 0; l < k; ++l) {
    for (int j = 0; j < n; ++j) {
      lp.G(l, j) = Rational(p.C(l, j));
      lp.G(k + l, j) = -Rational(p.C(l, j));
    }
    lp.G(l, n + l) = 1;
    lp.G(k + l, n + l) = -1;
    lp.h(l) = Cx(l);
    lp.h(k + l) = -Cx(l);
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) lp.G(2 * k + i, j) = Rational(p.A(i, j));
    lp.h(2 * k + i) = Rational(p.b(i));
  }
  lp.ub.resize(n + k);
  for (int j = 0; j < n; ++j) lp.ub[j] = Rational(p.ub_primal(j));

  const LpSolution sol = simplex_solve(lp);
  if (sol.status != LpStatus::Optimal) throw std::logic_error("domination LP must be solvable");
  return -sol.objective == 0;
}

VertexSet pareto_extreme_set(const MolpProblem& p) {
  const VertexSet all = enumerate_vertices(p);
  VertexSet out;
  for (int i = 0; i < all.size(); ++i) {
    if (is_pareto(p, all.points[i])) {
      out.points.push_back(all.points[i]);
      out.active_sets.push_back(all.active_sets[i]);
    }
  }
  return out;
}

std::vector<std::pair<int, int>> pareto_edges(const MolpProblem& p, const VertexSet& xe) {
  const StackedRows st = stacked_rows(p);
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < xe.size(); ++a) {
    for (int b = a + 1; b < xe.size(); ++b) {
      std::vector<int> common;
      std::set_intersection(xe.active_sets[a].begin(), xe.active_sets[a].end(),
                            xe.active_sets[b].begin(), xe.active_sets[b].end(),
                            std::back_inserter(common));
      if (static_cast<int>(common.size()) < p.n - 1) continue;
      RatMat M(common.size(), p.n);
      for (size_t r = 0; r < common.size(); ++r) M.row(r) = st.S.row(common[r]);
      if (rank_exact(M) < p.n - 1) continue;
      RatVec mid = (xe.points[a] + xe.points[b]) / Rational(2);
      if (is_pareto(p, mid)) edges.emplace_back(a, b);
    }
  }
  return edges;
}

namespace {

// Feasibility system in (lambda, u restricted to tight A rows):
//   sum lambda = 1, dual feasibility A^T u <= C^T lambda with equality on the
//   support of x, everything nonnegative. `objective_ui` (index into the
//   active-row list) switches on maximization of that dual coordinate, under
//   u <= ub_dual to keep the LP bounded.
std::optional<WeightCertificate> certify_impl(const MolpProblem& p, const RatVec& x,
                                              int maximize_ui) {
  if (!is_feasible_point(p, x)) return std::nullopt;

  std::vector<int> act;
  for (int i = 0; i < p.m; ++i) {
    Rational v = 0;
    for (int j = 0; j < p.n; ++j) v += Rational(p.A(i, j)) * x(j);
    if (v == Rational(p.b(i))) act.push_back(i);
  }
  if (maximize_ui >= 0 &&
      std::find(act.begin(), act.end(), maximize_ui) == act.end()) {
    // u_i is forced to 0 by complementary slackness; no positive-u_i
    // certificate can exist. Fall back to a plain certificate.
    maximize_ui = -1;
  }

  const int k = p.k;
  const int na = static_cast<int>(act.size());
  const int nv = k + na;

  std::vector<RatVec> rows;
  std::vector<Rational> rhs;

  RatVec simplex_row = RatVec::Zero(nv);
  for (int l = 0; l < k; ++l) simplex_row(l) = 1;
  rows.push_back(simplex_row);
  rhs.push_back(1);
  rows.push_back(-simplex_row);
  rhs.push_back(-1);

  for (int j = 0; j < p.n; ++j) {
    RatVec row = RatVec::Zero(nv);
    for (int l = 0; l < k; ++l) row(l) = Rational(p.C(l, j));
    for (int a = 0; a < na; ++a) row(k + a) = -Rational(p.A(act[a], j));
    rows.push_back(row);
    rhs.push_back(0);
    if (x(j) > 0) {
      rows.push_back(-row);
      rhs.push_back(0);
    }
  }

  LpInstance lp;
  lp.c = RatVec::Zero(nv);
  if (maximize_ui >= 0) {
    for (int a = 0; a < na; ++a)
      if (act[a] == maximize_ui) lp.c(k + a) = -1;
    lp.ub.resize(nv);
    for (int a = 0; a < na; ++a) lp.ub[k + a] = Rational(p.ub_dual(act[a]));
  }
  lp.G = RatMat::Zero(rows.size(), nv);
  lp.h = RatVec::Zero(rows.size());
  for (size_t r = 0; r < rows.size(); ++r) {
    lp.G.row(r) = rows[r].transpose();
    lp.h(r) = rhs[r];
  }

  const LpSolution sol = simplex_solve(lp);
  if (sol.status != LpStatus::Optimal) return std::nullopt;

  WeightCertificate cert;
  cert.lambda = sol.y.head(k);
  cert.u = RatVec::Zero(p.m);
  for (int a = 0; a < na; ++a) cert.u(act[a]) = sol.y(k + a);

  ValidTriplet t{x, cert.u, cert.lambda};
  if (!verify_sys1(p, t)) throw std::logic_error("certificate failed exact verification");
  return cert;
}

}  // namespace

std::optional<WeightCertificate> certify_weight(const MolpProblem& p, const RatVec& x) {
  return certify_impl(p, x, -1);
}

std::optional<WeightCertificate> certify_weight_max_ui(const MolpProblem& p, const RatVec& x, int i) {
  if (i < 0 || i >= p.m) throw DimensionError("dual index out of range");
  return certify_impl(p, x, i);
}

bool is_vertex_point(const MolpProblem& p, const RatVec& x) {
  if (!is_feasible_point(p, x)) return false;
  const StackedRows st = stacked_rows(p);
  const std::vector<int> act = tight_rows(st, x);
  if (static_cast<int>(act.size()) < p.n) return false;
  RatMat M(act.size(), p.n);
  for (size_t r = 0; r < act.size(); ++r) M.row(r) = st.S.row(act[r]);
  return rank_exact(M) == p.n;
}

}  // namespace molp
