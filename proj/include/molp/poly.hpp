#pragma once

#include "molp/rational.hpp"

#include <map>
#include <string>
#include <vector>

namespace molp {

struct UnassignedVariable : std::runtime_error {
  explicit UnassignedVariable(const std::string& what)
      : std::runtime_error("unassigned variable: " + what) {}
};

struct NonAffineReplacement : std::runtime_error {
  explicit NonAffineReplacement(const std::string& what)
      : std::runtime_error("replacement not affine: " + what) {}
};

enum class VarKind { Primal, Dual, Weight };

struct VarInfo {
  int id = 0;
  std::string name;
  VarKind kind = VarKind::Primal;
  Integer range = 0;  // variable lives on the integer grid {0, ..., range}
};

/// Ordered list of system variables with their grid ranges.
struct VarCatalog {
  std::vector<VarInfo> vars;

  int size() const { return static_cast<int>(vars.size()); }
  int index_of(int id) const {
    for (int i = 0; i < size(); ++i)
      if (vars[i].id == id) return i;
    return -1;
  }
  const VarInfo* find(int id) const {
    const int i = index_of(id);
    return i < 0 ? nullptr : &vars[i];
  }
  void remove(int id) {
    const int i = index_of(id);
    if (i >= 0) vars.erase(vars.begin() + i);
  }
};

/// Sparse exponent map var id -> power; zero powers never stored.
struct Monomial {
  std::map<int, int> exponents;

  int degree() const {
    int d = 0;
    for (const auto& [v, e] : exponents) d += e;
    return d;
  }
  bool is_constant() const { return exponents.empty(); }
  int exponent_of(int id) const {
    auto it = exponents.find(id);
    return it == exponents.end() ? 0 : it->second;
  }
  Monomial times(const Monomial& o) const {
    Monomial r = *this;
    for (const auto& [v, e] : o.exponents) {
      const int ne = r.exponent_of(v) + e;
      if (ne == 0) r.exponents.erase(v);
      else r.exponents[v] = ne;
    }
    return r;
  }
  // Graded order, then lexicographic on the exponent maps.
  bool operator<(const Monomial& o) const {
    const int da = degree(), db = o.degree();
    if (da != db) return da < db;
    return exponents < o.exponents;
  }
  bool operator==(const Monomial& o) const { return exponents == o.exponents; }
};

/// Sparse multivariate polynomial with exact rational coefficients.
struct Polynomial {
  std::map<Monomial, Rational> terms;

  static Polynomial constant(const Rational& c) {
    Polynomial p;
    if (c != 0) p.terms[Monomial{}] = c;
    return p;
  }
  static Polynomial variable(int id) {
    Polynomial p;
    Monomial m;
    m.exponents[id] = 1;
    p.terms[m] = 1;
    return p;
  }

  bool is_zero() const { return terms.empty(); }
  int degree() const {
    int d = 0;
    for (const auto& [m, c] : terms) d = std::max(d, m.degree());
    return d;
  }
  void add_term(const Monomial& m, const Rational& c) {
    if (c == 0) return;
    auto it = terms.find(m);
    if (it == terms.end()) {
      terms[m] = c;
    } else {
      it->second += c;
      if (it->second == 0) terms.erase(it);
    }
  }

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(const Rational& c) const;
  Polynomial operator-() const { return *this * Rational(-1); }

  bool operator==(const Polynomial& o) const { return terms == o.terms; }

  /// True when every variable id occurring in the polynomial has degree <= 1
  /// per term and total degree <= 1.
  bool is_affine() const { return degree() <= 1; }

  bool contains_variable(int id) const {
    for (const auto& [m, c] : terms)
      if (m.exponent_of(id) > 0) return true;
    return false;
  }

  std::string to_string(const VarCatalog& cat) const;
};

/// prod_{l=0..K} (v - l): vanishes exactly on the grid {0, ..., K}.
Polynomial grid_polynomial(int var_id, const Integer& K);

/// Exact evaluation; every variable of p must be assigned.
Rational evaluate(const Polynomial& p, const std::map<int, Rational>& point);

/// p with every occurrence of var replaced by the affine polynomial
/// `replacement` (which must not contain var).
Polynomial substitute_affine_poly(const Polynomial& p, int var_id, const Polynomial& replacement);

}  // namespace molp
