#include "molp/scaling.hpp"

#include "molp/linalg_exact.hpp"

#include <numeric>

namespace molp {

Integer integer_determinant(const IntMat& sq) {
  const Eigen::Index n = sq.rows();
  if (sq.cols() != n) throw DimensionError("determinant of a non-square matrix");
  if (n == 0) return 1;
  IntMat M = sq;
  Integer prev = 1;
  int sign = 1;
  for (Eigen::Index col = 0; col < n - 1; ++col) {
    Eigen::Index piv = -1;
    for (Eigen::Index r = col; r < n; ++r)
      if (M(r, col) != 0) { piv = r; break; }
    if (piv < 0) return 0;
    if (piv != col) {
      M.row(piv).swap(M.row(col));
      sign = -sign;
    }
    for (Eigen::Index r = col + 1; r < n; ++r) {
      for (Eigen::Index c = col + 1; c < n; ++c) {
        M(r, c) = (M(col, col) * M(r, c) - M(r, col) * M(col, c)) / prev;
      }
      M(r, col) = 0;
    }
    prev = M(col, col);
  }
  return sign > 0 ? M(n - 1, n - 1) : Integer(-M(n - 1, n - 1));
}

namespace {

// Iterates over all size-d index subsets of {0..total-1}. Returns false when
// exhausted.
bool next_combination(std::vector<int>& comb, int total) {
  const int d = static_cast<int>(comb.size());
  int i = d - 1;
  while (i >= 0 && comb[i] == total - d + i) --i;
  if (i < 0) return false;
  ++comb[i];
  for (int j = i + 1; j < d; ++j) comb[j] = comb[j - 1] + 1;
  return true;
}

long long binomial_capped(int n, int k, long long cap) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > cap) return cap + 1;
  }
  return r;
}

// lcm of |det| over all nonsingular square submatrices of M, all sizes.
Integer lcm_of_all_minors(const IntMat& M, long long& budget) {
  const int rows = static_cast<int>(M.rows());
  const int cols = static_cast<int>(M.cols());
  Integer l = 1;
  const int dmax = std::min(rows, cols);
  for (int d = 1; d <= dmax; ++d) {
    std::vector<int> rsel(d), csel(d);
    std::iota(rsel.begin(), rsel.end(), 0);
    do {
      std::iota(csel.begin(), csel.end(), 0);
      do {
        if (--budget < 0) throw CombinatorialLimit("submatrix enumeration cap hit");
        IntMat sub(d, d);
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b) sub(a, b) = M(rsel[a], csel[b]);
        const Integer det = integer_determinant(sub);
        if (det != 0) l = int_lcm(l, boost::multiprecision::abs(det));
      } while (next_combination(csel, cols));
    } while (next_combination(rsel, rows));
  }
  return l;
}

IntMat stacked_with_identity(const MolpProblem& p) {
  IntMat S = IntMat::Zero(p.m + p.n, p.n);
  S.topRows(p.m) = p.A;
  for (int j = 0; j < p.n; ++j) S(p.m + j, j) = 1;
  return S;
}

}  // namespace

Integer compute_M(const MolpProblem& p, MRows mode, long long cap) {
  const IntMat S = mode == MRows::Stacked ? stacked_with_identity(p) : IntMat(p.A);
  const int rows = static_cast<int>(S.rows());
  if (binomial_capped(rows, p.n, cap) > cap)
    throw CombinatorialLimit("too many n-subsets for M");

  Integer l = 1;
  std::vector<int> sel(p.n);
  std::iota(sel.begin(), sel.end(), 0);
  do {
    IntMat sub(p.n, p.n);
    for (int a = 0; a < p.n; ++a) sub.row(a) = S.row(sel[a]);
    const Integer det = integer_determinant(sub);
    if (det != 0) l = int_lcm(l, boost::multiprecision::abs(det));
  } while (next_combination(sel, rows));
  return l;
}

Integer compute_Mi(const MolpProblem& p, int i, const MiMode& mode, long long cap) {
  if (i < 1 || i > p.m) throw DimensionError("constraint index out of range");
  switch (mode.kind) {
    case MiMode::Kind::Override:
      return mode.value;
    case MiMode::Kind::Conservative: {
      Integer l = 1;
      for (Integer f = 2; f <= mode.value; ++f) l = int_lcm(l, f);
      return l;
    }
    case MiMode::Kind::Enumerate:
      break;
  }

  long long budget = cap;
  const int k = p.k, n = p.n, m = p.m;

  // Base rows: dual feasibility [-A^T | C^T] plus the simplex row.
  IntMat base = IntMat::Zero(n + 1, m + k);
  for (int j = 0; j < n; ++j) {
    for (int s = 0; s < m; ++s) base(j, s) = -p.A(s, j);
    for (int l = 0; l < k; ++l) base(j, m + l) = p.C(l, j);
  }
  for (int l = 0; l < k; ++l) base(n, m + l) = 1;

  Integer result = lcm_of_all_minors(base, budget);

  // Optimality rows per primal basis T: integerized adj(S_T)^T C^T, acting on
  // the lambda block only. Each basis contributes its own coefficient matrix.
  const IntMat S = stacked_with_identity(p);
  const int rows = static_cast<int>(S.rows());
  std::vector<int> sel(n);
  std::iota(sel.begin(), sel.end(), 0);
  do {
    RatMat ST(n, n);
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c) ST(a, c) = Rational(S(sel[a], c));
    const auto inv = invert(ST);
    if (!inv.has_value()) continue;
    IntMat subdet(n, n);
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c) subdet(a, c) = S(sel[a], c);
    const Integer det = integer_determinant(subdet);
    const Integer absdet = boost::multiprecision::abs(det);

    // rows: |det(S_T)| * S_T^{-T} C^T  (integer by construction)
    IntMat opt = IntMat::Zero(n, k);
    for (int t = 0; t < n; ++t) {
      for (int l = 0; l < k; ++l) {
        Rational v = 0;
        for (int j = 0; j < n; ++j) v += (*inv)(j, t) * Rational(p.C(l, j));
        v *= Rational(absdet);
        if (!is_integral(v)) throw std::logic_error("integerized optimality row not integral");
        opt(t, l) = numer(v);
      }
    }
    IntMat Li = IntMat::Zero(2 * n + 1, m + k);
    Li.topRows(n + 1) = base;
    for (int t = 0; t < n; ++t)
      for (int l = 0; l < k; ++l) Li(n + 1 + t, m + l) = opt(t, l);
    result = int_lcm(result, lcm_of_all_minors(Li, budget));
  } while (next_combination(sel, rows));

  return result;
}

IntVec suggest_dual_bounds(const MolpProblem& p) {
  Integer cmax = 1;
  for (int l = 0; l < p.k; ++l)
    for (int j = 0; j < p.n; ++j)
      cmax = std::max(cmax, Integer(boost::multiprecision::abs(p.C(l, j))));

  // Columns of the dual constraint matrix are rows of A; u_i's Cramer
  // numerator replaces one column by a weighted objective with entries
  // bounded by cmax.
  std::vector<Integer> row_sq(p.m);
  for (int s = 0; s < p.m; ++s) {
    Integer acc = 0;
    for (int j = 0; j < p.n; ++j) acc += p.A(s, j) * p.A(s, j);
    row_sq[s] = std::max(acc, Integer(1));
  }
  const Integer obj_sq = Integer(p.n) * cmax * cmax;

  IntVec out(p.m);
  for (int i = 0; i < p.m; ++i) {
    Integer prod = obj_sq;
    std::vector<Integer> others;
    for (int s = 0; s < p.m; ++s)
      if (s != i) others.push_back(row_sq[s]);
    std::sort(others.begin(), others.end(), std::greater<Integer>());
    // At most n columns enter a nonsingular dual basis.
    for (int t = 0; t < std::min<int>(p.n - 1, others.size()); ++t) prod *= others[t];
    out(i) = isqrt_floor(prod) + 1;
  }
  return out;
}

}  // namespace molp
