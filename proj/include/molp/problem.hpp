#pragma once

#include "molp/rational.hpp"

#include <string>
#include <vector>

namespace molp {

struct SchemaError : std::runtime_error {
  explicit SchemaError(const std::string& what) : std::runtime_error("schema error: " + what) {}
};

struct DimensionError : std::runtime_error {
  explicit DimensionError(const std::string& what) : std::runtime_error("dimension error: " + what) {}
};

/// A multiobjective linear program
///   v-min Cx  s.t.  Ax >= b, 0 <= x <= ub_primal
/// with all data integral. ub_dual bounds the dual variables of every
/// weighted scalarization; ub_primal must be redundant for {Ax>=b, x>=0}
/// whenever that region is bounded.
struct MolpProblem {
  int k = 0;  // objectives
  int m = 0;  // constraint rows
  int n = 0;  // variables

  IntMat C;         // k x n
  IntMat A;         // m x n
  IntVec b;         // m
  IntVec ub_primal; // n, positive
  IntVec ub_dual;   // m, positive
  std::vector<std::string> names;  // optional variable labels

  bool shapes_consistent() const {
    return C.rows() == k && C.cols() == n && A.rows() == m && A.cols() == n &&
           b.size() == m && ub_primal.size() == n && ub_dual.size() == m;
  }
};

struct Diagnostic {
  enum class Severity { Error, Warning };
  Severity severity;
  std::string code;
  std::string message;
};

/// (x, u, lambda) with lambda on the unit simplex; candidate for the
/// complementary-slackness system of a weighted scalarization.
struct ValidTriplet {
  RatVec x;       // n
  RatVec u;       // m
  RatVec lambda;  // k
};

/// Parses the JSON input document (fields k, m, n, C, A, b, ub_primal,
/// ub_dual, optional names). Rational entries are allowed in C, A, b and are
/// cleared per row: each C row by the lcm of its denominators, each A row
/// jointly with its b entry.
MolpProblem parse_problem(const std::string& text);

/// Inverse of parse_problem for integral instances.
std::string serialize_problem(const MolpProblem& p);

/// Feasibility, boundedness, bound-redundancy, redundant-row and trivial
/// zero-objective checks. Diagnostics only; never throws on bad geometry.
std::vector<Diagnostic> validate(const MolpProblem& p);

/// sum_l lambda_l * C(l,:), exact.
RatVec weighted_objective(const IntMat& C, const RatVec& lambda);

/// Exact check of the complementary-slackness system for (x,u,lambda):
///   u^t(b - Ax) = 0,  (lambda^T C - u^T A) x = 0,
///   Ax >= b,  u^T A <= lambda^T C,  u, x >= 0,  lambda >= 0, sum lambda = 1.
bool verify_sys1(const MolpProblem& p, const ValidTriplet& t);

}  // namespace molp
