#include "molp/problem.hpp"

#include "molp/lp.hpp"

#include <json.hpp>

#include <sstream>

namespace molp {

Rational parse_rational(const std::string& s) {
  const auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(Integer(s));
    Integer num(s.substr(0, slash));
    Integer den(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator");
    return Rational(num, den);
  } catch (const std::exception&) {
    throw SchemaError("cannot parse rational value '" + s + "'");
  }
}

std::string format_rational(const Rational& r) {
  std::ostringstream os;
  os << numer(r);
  if (!is_integral(r)) os << "/" << denom(r);
  return os.str();
}

namespace {

using nlohmann::json;

Rational entry_to_rational(const json& v, const std::string& field) {
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_string()) return parse_rational(v.get<std::string>());
  throw SchemaError("field '" + field + "' holds a non-integer, non-rational-string entry");
}

// Clears denominators of one row by its lcm; entries must come out integral.
IntVec clear_row(const RatVec& row) {
  Integer l = 1;
  for (Eigen::Index j = 0; j < row.size(); ++j) l = int_lcm(l, denom(row(j)));
  IntVec out(row.size());
  for (Eigen::Index j = 0; j < row.size(); ++j) out(j) = numer(row(j) * Rational(l));
  return out;
}

json require(const json& doc, const std::string& field) {
  if (!doc.contains(field)) throw SchemaError("missing field '" + field + "'");
  return doc.at(field);
}

int require_positive_int(const json& doc, const std::string& field) {
  const json v = require(doc, field);
  if (!v.is_number_integer() || v.get<long long>() < 1)
    throw SchemaError("field '" + field + "' must be a positive integer");
  return static_cast<int>(v.get<long long>());
}

RatMat read_matrix(const json& doc, const std::string& field) {
  const json rows = require(doc, field);
  if (!rows.is_array() || rows.empty() || !rows[0].is_array())
    throw SchemaError("field '" + field + "' must be an array of rows");
  const size_t ncols = rows[0].size();
  RatMat M(rows.size(), ncols);
  for (size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].is_array() || rows[i].size() != ncols)
      throw DimensionError("ragged rows in '" + field + "'");
    for (size_t j = 0; j < ncols; ++j) M(i, j) = entry_to_rational(rows[i][j], field);
  }
  return M;
}

RatVec read_vector(const json& doc, const std::string& field) {
  const json arr = require(doc, field);
  if (!arr.is_array() || arr.empty()) throw SchemaError("field '" + field + "' must be a non-empty array");
  RatVec v(arr.size());
  for (size_t i = 0; i < arr.size(); ++i) v(i) = entry_to_rational(arr[i], field);
  return v;
}

IntVec read_positive_int_vector(const json& doc, const std::string& field) {
  const RatVec v = read_vector(doc, field);
  IntVec out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!is_integral(v(i)) || v(i) <= 0)
      throw SchemaError("field '" + field + "' must hold positive integers");
    out(i) = numer(v(i));
  }
  return out;
}

}  // namespace

MolpProblem parse_problem(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }

  MolpProblem p;
  p.k = require_positive_int(doc, "k");
  p.m = require_positive_int(doc, "m");
  p.n = require_positive_int(doc, "n");

  const RatMat C = read_matrix(doc, "C");
  const RatMat A = read_matrix(doc, "A");
  const RatVec b = read_vector(doc, "b");

  if (C.rows() != p.k) throw DimensionError("C has " + std::to_string(C.rows()) + " rows, expected k");
  if (A.rows() != p.m) throw DimensionError("A has " + std::to_string(A.rows()) + " rows, expected m");
  if (b.size() != p.m) throw DimensionError("b has wrong length");
  if (C.cols() != p.n || A.cols() != p.n)
    throw DimensionError("C and A must both have n columns");

  p.C.resize(p.k, p.n);
  for (int l = 0; l < p.k; ++l) {
    const IntVec row = clear_row(C.row(l).transpose());
    p.C.row(l) = row.transpose();
  }

  // A rows are cleared jointly with their right-hand side.
  p.A.resize(p.m, p.n);
  p.b.resize(p.m);
  for (int i = 0; i < p.m; ++i) {
    RatVec row(p.n + 1);
    row.head(p.n) = A.row(i).transpose();
    row(p.n) = b(i);
    const IntVec cleared = clear_row(row);
    p.A.row(i) = cleared.head(p.n).transpose();
    p.b(i) = cleared(p.n);
  }

  p.ub_primal = read_positive_int_vector(doc, "ub_primal");
  p.ub_dual = read_positive_int_vector(doc, "ub_dual");
  if (p.ub_primal.size() != p.n) throw DimensionError("ub_primal has wrong length");
  if (p.ub_dual.size() != p.m) throw DimensionError("ub_dual has wrong length");

  if (doc.contains("names")) {
    const json names = doc.at("names");
    if (!names.is_array()) throw SchemaError("'names' must be an array of strings");
    for (const auto& s : names) p.names.push_back(s.get<std::string>());
    if (static_cast<int>(p.names.size()) != p.n) throw DimensionError("'names' has wrong length");
  }
  return p;
}

std::string serialize_problem(const MolpProblem& p) {
  using nlohmann::json;
  json doc;
  doc["k"] = p.k;
  doc["m"] = p.m;
  doc["n"] = p.n;
  auto mat = [](const IntMat& M) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j).convert_to<long long>());
      rows.push_back(row);
    }
    return rows;
  };
  auto vec = [](const IntVec& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i).convert_to<long long>());
    return arr;
  };
  doc["C"] = mat(p.C);
  doc["A"] = mat(p.A);
  doc["b"] = vec(p.b);
  doc["ub_primal"] = vec(p.ub_primal);
  doc["ub_dual"] = vec(p.ub_dual);
  if (!p.names.empty()) doc["names"] = p.names;
  return doc.dump(2);
}

RatVec weighted_objective(const IntMat& C, const RatVec& lambda) {
  if (lambda.size() != C.rows()) throw DimensionError("lambda length != number of objectives");
  RatVec w = RatVec::Zero(C.cols());
  for (Eigen::Index l = 0; l < C.rows(); ++l)
    for (Eigen::Index j = 0; j < C.cols(); ++j) w(j) += lambda(l) * Rational(C(l, j));
  return w;
}

bool verify_sys1(const MolpProblem& p, const ValidTriplet& t) {
  if (t.x.size() != p.n || t.u.size() != p.m || t.lambda.size() != p.k)
    throw DimensionError("triplet dimensions do not match the problem");

  Rational lam_sum = 0;
  for (int l = 0; l < p.k; ++l) {
    if (t.lambda(l) < 0) return false;
    lam_sum += t.lambda(l);
  }
  if (lam_sum != 1) return false;
  for (int j = 0; j < p.n; ++j)
    if (t.x(j) < 0) return false;
  for (int i = 0; i < p.m; ++i)
    if (t.u(i) < 0) return false;

  const RatVec w = weighted_objective(p.C, t.lambda);

  // u^T A and the primal slacks.
  RatVec utA = RatVec::Zero(p.n);
  for (int i = 0; i < p.m; ++i)
    for (int j = 0; j < p.n; ++j) utA(j) += t.u(i) * Rational(p.A(i, j));

  Rational cs1 = 0;  // u^t (b - Ax)
  for (int i = 0; i < p.m; ++i) {
    Rational Ax_i = 0;
    for (int j = 0; j < p.n; ++j) Ax_i += Rational(p.A(i, j)) * t.x(j);
    if (Ax_i < Rational(p.b(i))) return false;  // Ax >= b
    cs1 += t.u(i) * (Rational(p.b(i)) - Ax_i);
  }
  if (cs1 != 0) return false;

  Rational cs2 = 0;  // (w - u^T A) x
  for (int j = 0; j < p.n; ++j) {
    if (utA(j) > w(j)) return false;  // u^T A <= w
    cs2 += (w(j) - utA(j)) * t.x(j);
  }
  return cs2 == 0;
}

namespace {

LpInstance region_lp(const MolpProblem& p, RatVec objective, bool with_box) {
  LpInstance lp;
  lp.c = std::move(objective);
  lp.G = to_rational(p.A);
  lp.h = to_rational(p.b);
  if (with_box) {
    lp.ub.resize(p.n);
    for (int j = 0; j < p.n; ++j) lp.ub[j] = Rational(p.ub_primal(j));
  }
  return lp;
}

}  // namespace

std::vector<Diagnostic> validate(const MolpProblem& p) {
  std::vector<Diagnostic> out;
  if (!p.shapes_consistent()) {
    out.push_back({Diagnostic::Severity::Error, "shape", "field dimensions are inconsistent"});
    return out;
  }

  // Feasibility of {Ax >= b, 0 <= x <= ub}.
  {
    LpInstance lp = region_lp(p, RatVec::Zero(p.n), /*with_box=*/true);
    if (simplex_solve(lp).status == LpStatus::Infeasible) {
      out.push_back({Diagnostic::Severity::Error, "infeasible", "the feasible region is empty"});
      return out;
    }
  }

  // Boundedness of {Ax >= b, x >= 0}; if bounded, box bounds must be redundant.
  bool unbounded_without_box = false;
  for (int j = 0; j < p.n && !unbounded_without_box; ++j) {
    RatVec c = RatVec::Zero(p.n);
    c(j) = -1;  // maximize x_j
    LpInstance lp = region_lp(p, c, /*with_box=*/false);
    const LpSolution sol = simplex_solve(lp);
    if (sol.status == LpStatus::Unbounded) {
      unbounded_without_box = true;
    } else if (sol.status == LpStatus::Optimal && -sol.objective > Rational(p.ub_primal(j))) {
      out.push_back({Diagnostic::Severity::Error, "bounds_not_redundant",
                     "max x_" + std::to_string(j + 1) + " over {Ax>=b, x>=0} exceeds ub_primal"});
    }
  }
  if (unbounded_without_box) {
    out.push_back({Diagnostic::Severity::Warning, "unbounded_without_box",
                   "{Ax>=b, x>=0} is unbounded; scaling constants rely on the box rows"});
  }

  // Redundant constraint rows: row i is redundant when min A_i x over the
  // region without row i is still >= b_i.
  for (int i = 0; i < p.m; ++i) {
    LpInstance lp;
    lp.c = to_rational(IntVec(p.A.row(i).transpose()));
    lp.G.resize(p.m - 1, p.n);
    lp.h.resize(p.m - 1);
    int r = 0;
    for (int s = 0; s < p.m; ++s) {
      if (s == i) continue;
      lp.G.row(r) = to_rational(p.A).row(s);
      lp.h(r) = Rational(p.b(s));
      ++r;
    }
    lp.ub.resize(p.n);
    for (int j = 0; j < p.n; ++j) lp.ub[j] = Rational(p.ub_primal(j));
    const LpSolution sol = simplex_solve(lp);
    if (sol.status == LpStatus::Optimal && sol.objective >= Rational(p.b(i))) {
      out.push_back({Diagnostic::Severity::Warning, "redundant_row",
                     "constraint row " + std::to_string(i + 1) + " appears redundant"});
    }
  }

  bool all_zero = true;
  for (int l = 0; l < p.k && all_zero; ++l)
    for (int j = 0; j < p.n && all_zero; ++j)
      if (p.C(l, j) != 0) all_zero = false;
  if (all_zero) {
    out.push_back({Diagnostic::Severity::Warning, "zero_objective",
                   "objective matrix is zero; every feasible point is Pareto-optimal"});
  }
  return out;
}

}  // namespace molp
