#include "molp/lp.hpp"

#include "molp/linalg_exact.hpp"
#include "molp/problem.hpp"

#include <algorithm>

namespace molp {

namespace {

// Full-tableau simplex on min c z s.t. E z = f, z >= 0 with f >= 0 and a
// starting identity basis. Bland's rule: entering = least column index with
// negative reduced cost; leaving = least basic variable index among minimal
// ratios. Returns false when unbounded.
struct Tableau {
  RatMat E;               // rows x cols
  RatVec f;               // rhs, kept >= 0
  RatVec cost;            // current objective row (reduced costs)
  Rational objective = 0; // negated accumulated objective value
  std::vector<int> basis; // basic column per row

  int rows() const { return static_cast<int>(E.rows()); }
  int cols() const { return static_cast<int>(E.cols()); }

  void price_out(int col) {
    // Make the reduced cost of a basic column zero.
    for (int r = 0; r < rows(); ++r) {
      if (basis[r] != col) continue;
      if (cost(col) == 0) return;
      const Rational factor = cost(col);
      for (int c = 0; c < cols(); ++c) cost(c) -= factor * E(r, c);
      objective -= factor * f(r);
      return;
    }
  }

  void pivot(int row, int col) {
    const Rational piv = E(row, col);
    for (int c = 0; c < cols(); ++c) E(row, c) /= piv;
    f(row) /= piv;
    for (int r = 0; r < rows(); ++r) {
      if (r == row || E(r, col) == 0) continue;
      const Rational factor = E(r, col);
      for (int c = 0; c < cols(); ++c) E(r, c) -= factor * E(row, c);
      f(r) -= factor * f(row);
    }
    if (cost(col) != 0) {
      const Rational factor = cost(col);
      for (int c = 0; c < cols(); ++c) cost(c) -= factor * E(row, c);
      objective -= factor * f(row);
    }
    basis[row] = col;
  }

  // Runs to optimality; false = unbounded. `allowed` masks usable columns.
  bool run(const std::vector<bool>& allowed) {
    for (;;) {
      int entering = -1;
      for (int c = 0; c < cols(); ++c) {
        if (allowed[c] && cost(c) < 0) { entering = c; break; }
      }
      if (entering < 0) return true;

      int leave_row = -1;
      Rational best_ratio = 0;
      for (int r = 0; r < rows(); ++r) {
        if (E(r, entering) <= 0) continue;
        const Rational ratio = f(r) / E(r, entering);
        if (leave_row < 0 || ratio < best_ratio ||
            (ratio == best_ratio && basis[r] < basis[leave_row])) {
          leave_row = r;
          best_ratio = ratio;
        }
      }
      if (leave_row < 0) return false;
      pivot(leave_row, entering);
    }
  }
};

}  // namespace

LpSolution simplex_solve(const LpInstance& lp) {
  const int n = lp.num_vars();
  const int m = lp.num_rows();
  if (lp.G.cols() != n || lp.h.size() != m)
    throw DimensionError("LP fields have inconsistent shapes");

  std::vector<int> ub_vars;
  if (!lp.ub.empty()) {
    if (static_cast<int>(lp.ub.size()) != n) throw DimensionError("ub has wrong length");
    for (int j = 0; j < n; ++j)
      if (lp.ub[j].has_value()) ub_vars.push_back(j);
  }
  const int nb = static_cast<int>(ub_vars.size());

  // Equality form: columns = (y, s, t), rows = G rows then bound rows.
  const int rows = m + nb;
  const int cols = n + m + nb;
  RatMat E = RatMat::Zero(rows, cols);
  RatVec f(rows);
  std::vector<int> row_sign(rows, 1);

  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) E(i, j) = lp.G(i, j);
    E(i, n + i) = -1;
    f(i) = lp.h(i);
  }
  for (int r = 0; r < nb; ++r) {
    const int j = ub_vars[r];
    E(m + r, j) = 1;
    E(m + r, n + m + r) = 1;
    f(m + r) = *lp.ub[j];
    if (f(m + r) < 0) {  // ub < 0 with y >= 0: infeasible, let phase I find it
    }
  }
  for (int r = 0; r < rows; ++r) {
    if (f(r) < 0) {
      row_sign[r] = -1;
      f(r) = -f(r);
      for (int c = 0; c < cols; ++c) E(r, c) = -E(r, c);
    }
  }

  // Choose initial basis: ready identity columns where present, otherwise
  // artificials appended on the right.
  Tableau tab;
  tab.basis.assign(rows, -1);
  std::vector<int> artificial_rows;
  for (int r = 0; r < rows; ++r) {
    int ident = -1;
    const int slack = (r < m) ? n + r : n + m + (r - m);
    if (E(r, slack) == 1) {
      bool clean = true;
      for (int rr = 0; rr < rows && clean; ++rr)
        if (rr != r && E(rr, slack) != 0) clean = false;
      if (clean) ident = slack;
    }
    if (ident >= 0) tab.basis[r] = ident;
    else artificial_rows.push_back(r);
  }
  const int na = static_cast<int>(artificial_rows.size());
  tab.E = RatMat::Zero(rows, cols + na);
  tab.E.leftCols(cols) = E;
  tab.f = f;
  for (int a = 0; a < na; ++a) {
    tab.E(artificial_rows[a], cols + a) = 1;
    tab.basis[artificial_rows[a]] = cols + a;
  }

  LpSolution out;

  // Phase I.
  if (na > 0) {
    tab.cost = RatVec::Zero(cols + na);
    for (int a = 0; a < na; ++a) tab.cost(cols + a) = 1;
    tab.objective = 0;
    for (int a = 0; a < na; ++a) tab.price_out(cols + a);
    std::vector<bool> allowed(cols + na, true);
    tab.run(allowed);  // bounded below by 0
    if (-tab.objective != 0) {
      out.status = LpStatus::Infeasible;
      return out;
    }
    // Remove artificials from the basis where possible; rows that cannot be
    // repaired are redundant and get neutralized.
    for (int r = 0; r < rows; ++r) {
      if (tab.basis[r] < cols) continue;
      int col = -1;
      for (int c = 0; c < cols; ++c)
        if (tab.E(r, c) != 0) { col = c; break; }
      if (col >= 0) tab.pivot(r, col);
    }
  }

  // Phase II.
  {
    RatVec cost = RatVec::Zero(cols + na);
    for (int j = 0; j < n; ++j) cost(j) = lp.c(j);
    tab.cost = cost;
    tab.objective = 0;
    for (int r = 0; r < rows; ++r) tab.price_out(tab.basis[r]);
    std::vector<bool> allowed(cols + na, true);
    for (int a = 0; a < na; ++a) allowed[cols + a] = false;
    if (!tab.run(allowed)) {
      out.status = LpStatus::Unbounded;
      return out;
    }
  }

  out.status = LpStatus::Optimal;
  RatVec z = RatVec::Zero(cols);
  for (int r = 0; r < rows; ++r)
    if (tab.basis[r] < cols) z(tab.basis[r]) = tab.f(r);
  out.y = z.head(n);
  out.objective = lp.c.dot(out.y);
  out.basis = tab.basis;

  // Duals from B^T w = c_B over the original equality system.
  std::vector<int> brows, bcols;
  for (int r = 0; r < rows; ++r) {
    if (tab.basis[r] < cols) {
      brows.push_back(r);
      bcols.push_back(tab.basis[r]);
    }
  }
  const int nbasic = static_cast<int>(bcols.size());
  RatMat Bt(nbasic, nbasic);
  RatVec cB(nbasic);
  for (int a = 0; a < nbasic; ++a) {
    for (int bidx = 0; bidx < nbasic; ++bidx) {
      Rational v = E(brows[bidx], bcols[a]);
      Bt(a, bidx) = v;
    }
    cB(a) = bcols[a] < n ? lp.c(bcols[a]) : Rational(0);
  }
  RatVec w_full = RatVec::Zero(rows);
  if (nbasic > 0) {
    const auto w = solve_square(Bt, cB);
    if (w.has_value()) {
      for (int a = 0; a < nbasic; ++a) w_full(brows[a]) = (*w)(a);
    }
  }
  out.dual = RatVec::Zero(m);
  for (int i = 0; i < m; ++i) out.dual(i) = Rational(row_sign[i]) * w_full(i);
  out.dual_ub = RatVec::Zero(n);
  for (int r = 0; r < nb; ++r) out.dual_ub(ub_vars[r]) = Rational(row_sign[m + r]) * w_full(m + r);
  return out;
}

}  // namespace molp
