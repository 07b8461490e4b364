#include "molp/poly.hpp"

#include <sstream>

namespace molp {

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial r = *this;
  for (const auto& [m, c] : o.terms) r.add_term(m, c);
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  Polynomial r = *this;
  for (const auto& [m, c] : o.terms) r.add_term(m, -c);
  return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Polynomial r;
  for (const auto& [ma, ca] : terms)
    for (const auto& [mb, cb] : o.terms) r.add_term(ma.times(mb), ca * cb);
  return r;
}

Polynomial Polynomial::operator*(const Rational& c) const {
  Polynomial r;
  if (c == 0) return r;
  for (const auto& [m, co] : terms) r.terms[m] = co * c;
  return r;
}

std::string Polynomial::to_string(const VarCatalog& cat) const {
  if (terms.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // Highest degree first reads naturally.
  for (auto it = terms.rbegin(); it != terms.rend(); ++it) {
    const auto& [m, c] = *it;
    if (!first) os << (c > 0 ? " + " : " - ");
    else if (c < 0) os << "-";
    first = false;
    const Rational ac = boost::multiprecision::abs(c);
    const bool unit = ac == 1 && !m.is_constant();
    if (!unit) os << format_rational(ac);
    bool star = !unit;
    for (const auto& [v, e] : m.exponents) {
      if (star) os << "*";
      const VarInfo* info = cat.find(v);
      os << (info ? info->name : "v" + std::to_string(v));
      if (e > 1) os << "^" << e;
      star = true;
    }
  }
  return os.str();
}

Polynomial grid_polynomial(int var_id, const Integer& K) {
  if (K < 0) throw std::invalid_argument("grid bound must be nonnegative");
  Polynomial p = Polynomial::variable(var_id);
  const Polynomial v = Polynomial::variable(var_id);
  for (Integer l = 1; l <= K; ++l) {
    p = p * (v - Polynomial::constant(Rational(l)));
  }
  return p;
}

Rational evaluate(const Polynomial& p, const std::map<int, Rational>& point) {
  Rational acc = 0;
  for (const auto& [m, c] : p.terms) {
    Rational t = c;
    for (const auto& [v, e] : m.exponents) {
      auto it = point.find(v);
      if (it == point.end()) throw UnassignedVariable("variable id " + std::to_string(v));
      for (int r = 0; r < e; ++r) t *= it->second;
    }
    acc += t;
  }
  return acc;
}

Polynomial substitute_affine_poly(const Polynomial& p, int var_id, const Polynomial& replacement) {
  if (!replacement.is_affine()) throw NonAffineReplacement("degree > 1");
  if (replacement.contains_variable(var_id))
    throw NonAffineReplacement("replacement contains the substituted variable");

  // Precompute powers of the replacement up to the needed degree.
  int max_pow = 0;
  for (const auto& [m, c] : p.terms) max_pow = std::max(max_pow, m.exponent_of(var_id));
  std::vector<Polynomial> pow(max_pow + 1);
  pow[0] = Polynomial::constant(1);
  for (int e = 1; e <= max_pow; ++e) pow[e] = pow[e - 1] * replacement;

  Polynomial out;
  for (const auto& [m, c] : p.terms) {
    const int e = m.exponent_of(var_id);
    Monomial rest = m;
    rest.exponents.erase(var_id);
    Polynomial base;
    base.terms[rest] = c;
    out = out + base * pow[e];
  }
  return out;
}

}  // namespace molp
