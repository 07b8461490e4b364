#pragma once

#include "molp/oracle.hpp"
#include "molp/problem.hpp"

#include <random>

namespace molp::testing {

// Reference instance used throughout: min (x1, x2) over
// {2x1+x2>=4, x1+x2>=3, x1+2x2>=4, 0<=x<=5}.
inline MolpProblem example1() {
  MolpProblem p;
  p.k = 2;
  p.m = 3;
  p.n = 2;
  p.C.resize(2, 2);
  p.C << 1, 0, 0, 1;
  p.A.resize(3, 2);
  p.A << 2, 1, 1, 1, 1, 2;
  p.b.resize(3);
  p.b << 4, 3, 4;
  p.ub_primal.resize(2);
  p.ub_primal << 5, 5;
  p.ub_dual.resize(3);
  p.ub_dual << 1, 1, 1;
  return p;
}

inline RatVec rat_point(std::initializer_list<Rational> vals) {
  RatVec v(vals.size());
  int i = 0;
  for (const auto& r : vals) v(i++) = r;
  return v;
}

inline Rational q(long long num, long long den = 1) { return Rational(num, den); }

// Random small instances: n = 2, k = 2, m in {2, 3}, entries in [-3, 3],
// boxes <= 4. Not filtered; callers test feasibility themselves.
inline MolpProblem random_instance(std::mt19937_64& rng, int m) {
  std::uniform_int_distribution<int> entry(-3, 3);
  std::uniform_int_distribution<int> boxv(1, 4);
  MolpProblem p;
  p.k = 2;
  p.n = 2;
  p.m = m;
  p.C.resize(2, 2);
  p.A.resize(m, 2);
  p.b.resize(m);
  for (int l = 0; l < 2; ++l)
    for (int j = 0; j < 2; ++j) p.C(l, j) = entry(rng);
  for (int i = 0; i < m; ++i) {
    p.A(i, 0) = entry(rng);
    p.A(i, 1) = entry(rng);
    p.b(i) = entry(rng);
  }
  p.ub_primal.resize(2);
  p.ub_primal << boxv(rng), boxv(rng);
  p.ub_dual.resize(m);
  for (int i = 0; i < m; ++i) p.ub_dual(i) = 1;
  return p;
}

}  // namespace molp::testing
