#pragma once

#include "molp/poly.hpp"
#include "molp/problem.hpp"
#include "molp/scaling.hpp"

namespace molp {

struct BadIndex : std::runtime_error {
  explicit BadIndex(const std::string& what) : std::runtime_error("bad index: " + what) {}
};

enum class SysVariant { FullU, ReducedU };

/// Variable id layout: x_j -> j, u_s -> n+s, lambda_r -> n+m+r.
constexpr int var_x(int j) { return j; }
// n and m are problem dimensions.
constexpr int var_u(int n, int s) { return n + s; }
constexpr int var_lambda(int n, int m, int r) { return n + m + r; }

/// The polynomial equality/inequality system for constraint index i over the
/// scaled integer-grid variables.
struct PolySystem {
  VarCatalog catalog;
  std::vector<Polynomial> equalities;    // = 0
  std::vector<Polynomial> inequalities;  // >= 0
  // Valid on the solution set but not linearly implied by the rows above:
  // per-term complementary slackness products (a sum of nonnegative terms
  // vanishing makes every term vanish) and the i-th facet equality forced by
  // u_i >= 1. They sharpen the relaxation; exact verification still uses
  // only `equalities` and `inequalities`.
  std::vector<Polynomial> implied_equalities;
  int system_index = 0;                  // 1-based i
  SysVariant variant = SysVariant::FullU;
  Integer M = 1;
  Integer Mi = 1;
  bool lambda_eliminated = false;
  bool trivially_infeasible = false;  // a constraint reduced to a false constant

  int max_degree() const {
    int d = 0;
    for (const auto& p : equalities) d = std::max(d, p.degree());
    for (const auto& p : inequalities) d = std::max(d, p.degree());
    for (const auto& p : implied_equalities) d = std::max(d, p.degree());
    return d;
  }
  /// ceil(deg/2) maximized over all constraints; minimum admissible
  /// relaxation order.
  int min_relaxation_order() const {
    int d = 1;
    for (const auto& p : equalities) d = std::max(d, (p.degree() + 1) / 2);
    for (const auto& p : inequalities) d = std::max(d, (p.degree() + 1) / 2);
    for (const auto& p : implied_equalities) d = std::max(d, (p.degree() + 1) / 2);
    return d;
  }
  /// floor(deg/2) maximized over all constraints; the gap used by the
  /// flat-extension window.
  int flat_gap() const {
    int d = 1;
    for (const auto& p : equalities) d = std::max(d, p.degree() / 2);
    for (const auto& p : inequalities) d = std::max(d, p.degree() / 2);
    return d;
  }

  std::string to_text() const;
};

/// Builds the system for constraint i (1-based). Scaled variables:
/// X = M x in {0..ub^P M}, U = M_i u in {0..ub^D M_i}, L = M_i lambda in
/// {0..M_i}. FullU keeps all m dual variables and adds u_i >= 1; ReducedU
/// pins u_i to M_i and drops it, following the scaled-by-M_i convention.
PolySystem build_sys_i(const MolpProblem& p, int i, const ScalingConstants& consts,
                       SysVariant variant = SysVariant::FullU);

/// Replaces `var_id` everywhere using the affine `replacement`, drops the
/// variable from the catalog and prunes constraints that become trivial.
PolySystem substitute_affine(const PolySystem& sys, int var_id, const Polynomial& replacement);

/// Convenience: eliminate the last weight variable via the simplex equality
/// sum(lambda) = M_i. No-op when k = 0 variables remain.
PolySystem eliminate_lambda(const PolySystem& sys, const MolpProblem& p);

}  // namespace molp
