#include "molp/polysys.hpp"

#include <sstream>

namespace molp {

std::string PolySystem::to_text() const {
  std::ostringstream os;
  for (const auto& p : equalities) os << p.to_string(catalog) << " = 0\n";
  for (const auto& p : inequalities) os << p.to_string(catalog) << " >= 0\n";
  return os.str();
}

PolySystem build_sys_i(const MolpProblem& p, int i, const ScalingConstants& consts,
                       SysVariant variant) {
  if (i < 1 || i > p.m) throw BadIndex("system index must be in 1.." + std::to_string(p.m));
  if (static_cast<int>(consts.Mi.size()) != p.m)
    throw DimensionError("scaling constants have wrong length");
  const int n = p.n, m = p.m, k = p.k;
  const Integer M = consts.M;
  const Integer Mi = consts.Mi[i - 1];
  const int i0 = i - 1;

  PolySystem sys;
  sys.system_index = i;
  sys.variant = variant;
  sys.M = M;
  sys.Mi = Mi;

  const bool reduced = variant == SysVariant::ReducedU;

  for (int j = 0; j < n; ++j)
    sys.catalog.vars.push_back({var_x(j), "x" + std::to_string(j + 1), VarKind::Primal,
                                Integer(p.ub_primal(j)) * M});
  for (int s = 0; s < m; ++s) {
    if (reduced && s == i0) continue;
    sys.catalog.vars.push_back({var_u(n, s), "u" + std::to_string(s + 1), VarKind::Dual,
                                Integer(p.ub_dual(s)) * Mi});
  }
  for (int r = 0; r < k; ++r)
    sys.catalog.vars.push_back({var_lambda(n, m, r), "lam" + std::to_string(r + 1),
                                VarKind::Weight, Mi});

  auto X = [&](int j) { return Polynomial::variable(var_x(j)); };
  auto U = [&](int s) {
    // In the reduced variant u_i is pinned to the constant M_i.
    if (reduced && s == i0) return Polynomial::constant(Rational(Mi));
    return Polynomial::variable(var_u(n, s));
  };
  auto L = [&](int r) { return Polynomial::variable(var_lambda(n, m, r)); };

  // h_0: sum lambda = M_i.
  {
    Polynomial h0;
    for (int r = 0; r < k; ++r) h0 = h0 + L(r);
    h0 = h0 - Polynomial::constant(Rational(Mi));
    sys.equalities.push_back(h0);
  }

  // h_1: u^t (M b - A x) = 0.
  {
    Polynomial h1;
    for (int s = 0; s < m; ++s) {
      Polynomial slack = Polynomial::constant(Rational(Integer(p.b(s)) * M));
      for (int j = 0; j < n; ++j)
        slack = slack - X(j) * Rational(p.A(s, j));
      h1 = h1 + U(s) * slack;
    }
    sys.equalities.push_back(h1);
  }

  // Reduced costs per coordinate: sum_l lambda_l c^l_j - (u^T A)_j.
  auto reduced_cost = [&](int j) {
    Polynomial rc;
    for (int l = 0; l < k; ++l) rc = rc + L(l) * Rational(p.C(l, j));
    for (int s = 0; s < m; ++s) rc = rc - U(s) * Rational(p.A(s, j));
    return rc;
  };

  // h_2: (reduced costs) . x = 0.
  {
    Polynomial h2;
    for (int j = 0; j < n; ++j) h2 = h2 + reduced_cost(j) * X(j);
    sys.equalities.push_back(h2);
  }

  // Grid equalities.
  for (int j = 0; j < n; ++j)
    sys.equalities.push_back(grid_polynomial(var_x(j), Integer(p.ub_primal(j)) * M));
  for (int s = 0; s < m; ++s) {
    if (reduced && s == i0) continue;
    sys.equalities.push_back(grid_polynomial(var_u(n, s), Integer(p.ub_dual(s)) * Mi));
  }
  for (int r = 0; r < k; ++r)
    sys.equalities.push_back(grid_polynomial(var_lambda(n, m, r), Mi));

  auto slack = [&](int s) {
    Polynomial g;
    for (int j = 0; j < n; ++j) g = g + X(j) * Rational(p.A(s, j));
    g = g - Polynomial::constant(Rational(Integer(p.b(s)) * M));
    return g;
  };

  // g_s^0: A_s x - M b_s >= 0.
  for (int s = 0; s < m; ++s) sys.inequalities.push_back(slack(s));
  // g_j^i: dual feasibility coordinates.
  for (int j = 0; j < n; ++j) sys.inequalities.push_back(reduced_cost(j));
  // Positive-dual case split.
  if (!reduced)
    sys.inequalities.push_back(Polynomial::variable(var_u(n, i0)) - Polynomial::constant(1));
  // Nonnegativity of every catalog variable.
  for (const auto& v : sys.catalog.vars)
    sys.inequalities.push_back(Polynomial::variable(v.id));

  // Disaggregated complementary slackness: h_1 and h_2 are sums of products
  // of nonnegative factors, so each product vanishes on the solution set.
  // The positive-dual case split pins the i-th row tight.
  for (int s = 0; s < m; ++s) sys.implied_equalities.push_back(U(s) * slack(s));
  for (int j = 0; j < n; ++j) sys.implied_equalities.push_back(reduced_cost(j) * X(j));
  sys.implied_equalities.push_back(slack(i0));

  return sys;
}

namespace {

// Drops constraints that became constants; flags impossible ones.
void prune(PolySystem& sys) {
  std::vector<Polynomial> eq, ineq;
  for (const auto& p : sys.equalities) {
    if (p.is_zero()) continue;
    if (p.degree() == 0) {
      sys.trivially_infeasible = true;
      continue;
    }
    eq.push_back(p);
  }
  for (const auto& p : sys.inequalities) {
    if (p.is_zero()) continue;
    if (p.degree() == 0) {
      if (p.terms.begin()->second < 0) sys.trivially_infeasible = true;
      continue;
    }
    ineq.push_back(p);
  }
  sys.equalities = std::move(eq);
  sys.inequalities = std::move(ineq);
}

}  // namespace

PolySystem substitute_affine(const PolySystem& sys, int var_id, const Polynomial& replacement) {
  PolySystem out = sys;
  out.equalities.clear();
  out.inequalities.clear();
  out.implied_equalities.clear();
  for (const auto& p : sys.equalities)
    out.equalities.push_back(substitute_affine_poly(p, var_id, replacement));
  for (const auto& p : sys.inequalities)
    out.inequalities.push_back(substitute_affine_poly(p, var_id, replacement));
  for (const auto& p : sys.implied_equalities) {
    Polynomial q = substitute_affine_poly(p, var_id, replacement);
    if (!q.is_zero() && q.degree() > 0) out.implied_equalities.push_back(q);
  }
  out.catalog.remove(var_id);
  prune(out);
  return out;
}

PolySystem eliminate_lambda(const PolySystem& sys, const MolpProblem& p) {
  const int last = var_lambda(p.n, p.m, p.k - 1);
  if (sys.catalog.index_of(last) < 0) return sys;
  Polynomial repl = Polynomial::constant(Rational(sys.Mi));
  for (int r = 0; r + 1 < p.k; ++r)
    repl = repl - Polynomial::variable(var_lambda(p.n, p.m, r));
  PolySystem out = substitute_affine(sys, last, repl);
  out.lambda_eliminated = true;
  return out;
}

}  // namespace molp
