#include "molp/linalg_exact.hpp"

namespace molp {

std::optional<RatVec> solve_square(RatMat M, RatVec rhs) {
  const Eigen::Index n = M.rows();
  if (M.cols() != n || rhs.size() != n) return std::nullopt;
  std::vector<Eigen::Index> perm(n);
  for (Eigen::Index i = 0; i < n; ++i) perm[i] = i;

  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index piv = -1;
    for (Eigen::Index r = col; r < n; ++r) {
      if (M(r, col) != 0) { piv = r; break; }
    }
    if (piv < 0) return std::nullopt;
    if (piv != col) {
      M.row(piv).swap(M.row(col));
      std::swap(rhs(piv), rhs(col));
    }
    const Rational inv = Rational(1) / M(col, col);
    for (Eigen::Index r = col + 1; r < n; ++r) {
      if (M(r, col) == 0) continue;
      const Rational f = M(r, col) * inv;
      for (Eigen::Index c = col; c < n; ++c) M(r, c) -= f * M(col, c);
      rhs(r) -= f * rhs(col);
    }
  }
  RatVec x(n);
  for (Eigen::Index r = n - 1; r >= 0; --r) {
    Rational acc = rhs(r);
    for (Eigen::Index c = r + 1; c < n; ++c) acc -= M(r, c) * x(c);
    x(r) = acc / M(r, r);
  }
  return x;
}

int rank_exact(RatMat M) {
  const Eigen::Index rows = M.rows(), cols = M.cols();
  int rank = 0;
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < cols && row < rows; ++col) {
    Eigen::Index piv = -1;
    for (Eigen::Index r = row; r < rows; ++r) {
      if (M(r, col) != 0) { piv = r; break; }
    }
    if (piv < 0) continue;
    if (piv != row) M.row(piv).swap(M.row(row));
    const Rational inv = Rational(1) / M(row, col);
    for (Eigen::Index r = row + 1; r < rows; ++r) {
      if (M(r, col) == 0) continue;
      const Rational f = M(r, col) * inv;
      for (Eigen::Index c = col; c < cols; ++c) M(r, c) -= f * M(row, c);
    }
    ++row;
    ++rank;
  }
  return rank;
}

std::optional<RatMat> invert(RatMat M) {
  const Eigen::Index n = M.rows();
  if (M.cols() != n) return std::nullopt;
  RatMat inv = RatMat::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) inv(i, i) = 1;

  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index piv = -1;
    for (Eigen::Index r = col; r < n; ++r) {
      if (M(r, col) != 0) { piv = r; break; }
    }
    if (piv < 0) return std::nullopt;
    if (piv != col) {
      M.row(piv).swap(M.row(col));
      inv.row(piv).swap(inv.row(col));
    }
    const Rational d = M(col, col);
    for (Eigen::Index c = 0; c < n; ++c) {
      M(col, c) /= d;
      inv(col, c) /= d;
    }
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r == col || M(r, col) == 0) continue;
      const Rational f = M(r, col);
      for (Eigen::Index c = 0; c < n; ++c) {
        M(r, c) -= f * M(col, c);
        inv(r, c) -= f * inv(col, c);
      }
    }
  }
  return inv;
}

}  // namespace molp
