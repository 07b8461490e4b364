#include "molp/moment.hpp"

#include <algorithm>
#include <sstream>

namespace molp {

std::string MonomialBasis::key(const std::vector<int>& e) {
  std::string s;
  s.reserve(e.size() * 3);
  for (int v : e) {
    s += std::to_string(v);
    s += ',';
  }
  return s;
}

namespace {

void gen_monomials(int nvars, int pos, int remaining, std::vector<int>& cur,
                   std::vector<std::vector<int>>& out) {
  if (pos == nvars - 1) {
    cur[pos] = remaining;
    out.push_back(cur);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    cur[pos] = e;
    gen_monomials(nvars, pos + 1, remaining - e, cur, out);
  }
  cur[pos] = 0;
}

}  // namespace

MonomialBasis enumerate_monomials(int nvars, int degree) {
  if (nvars < 1 || degree < 0) throw std::invalid_argument("bad basis parameters");
  MonomialBasis b;
  b.nvars = nvars;
  b.degree = degree;
  std::vector<int> cur(nvars, 0);
  for (int d = 0; d <= degree; ++d) gen_monomials(nvars, 0, d, cur, b.monos);
  for (int i = 0; i < b.size(); ++i) b.lookup[MonomialBasis::key(b.monos[i])] = i;
  return b;
}

Eigen::MatrixXi moment_matrix_map(const MonomialBasis& rows, const MonomialBasis& space) {
  const int s = rows.size();
  Eigen::MatrixXi M(s, s);
  std::vector<int> sum(rows.nvars);
  for (int r = 0; r < s; ++r) {
    for (int c = r; c < s; ++c) {
      for (int v = 0; v < rows.nvars; ++v) sum[v] = rows.monos[r][v] + rows.monos[c][v];
      const int idx = space.index_of(sum);
      if (idx < 0) throw OrderTooSmall("moment index space misses a product monomial");
      M(r, c) = idx;
      M(c, r) = idx;
    }
  }
  return M;
}

namespace {

// Dense exponent vector of a sparse monomial relative to the catalog order.
std::vector<int> dense_exponents(const Monomial& m, const VarCatalog& cat) {
  std::vector<int> e(cat.size(), 0);
  for (const auto& [id, pw] : m.exponents) {
    const int pos = cat.index_of(id);
    if (pos < 0) throw std::logic_error("monomial variable missing from catalog");
    e[pos] = pw;
  }
  return e;
}

}  // namespace

LocalizingMap localizing_matrix_map(const Polynomial& g, const VarCatalog& cat,
                                    const MonomialBasis& rows, const MonomialBasis& space) {
  LocalizingMap L;
  L.size = rows.size();
  L.entries.resize(static_cast<size_t>(L.size) * L.size);

  std::vector<std::pair<std::vector<int>, Rational>> gterms;
  for (const auto& [m, c] : g.terms) gterms.emplace_back(dense_exponents(m, cat), c);

  std::vector<int> sum(rows.nvars);
  for (int r = 0; r < L.size; ++r) {
    for (int c = r; c < L.size; ++c) {
      auto& entry = L.entries[static_cast<size_t>(r) * L.size + c];
      for (const auto& [ge, gc] : gterms) {
        for (int v = 0; v < rows.nvars; ++v) sum[v] = rows.monos[r][v] + rows.monos[c][v] + ge[v];
        const int idx = space.index_of(sum);
        if (idx < 0) throw OrderTooSmall("localizing shift exceeds the moment space");
        entry.push_back({idx, gc});
      }
      // Merge duplicate moment indices.
      std::sort(entry.begin(), entry.end(),
                [](const MomentTerm& a, const MomentTerm& b) { return a.mom < b.mom; });
      std::vector<MomentTerm> merged;
      for (const auto& t : entry) {
        if (!merged.empty() && merged.back().mom == t.mom) merged.back().coeff += t.coeff;
        else merged.push_back(t);
      }
      merged.erase(std::remove_if(merged.begin(), merged.end(),
                                  [](const MomentTerm& t) { return t.coeff == 0; }),
                   merged.end());
      entry = std::move(merged);
    }
  }
  return L;
}

double MomentRelaxation::moment_scale(int idx) const {
  double s = 1.0;
  const auto& e = space.monos[idx];
  for (int v = 0; v < space.nvars; ++v) {
    const double base = to_double(var_scale[v]);
    for (int p = 0; p < e[v]; ++p) s *= base;
  }
  return s;
}

MomentRelaxation assemble_relaxation(const PolySystem& sys, int N, bool rescale) {
  MomentRelaxation rel;
  rel.catalog = sys.catalog;
  rel.order = N;
  rel.system_index = sys.system_index;
  rel.variant = sys.variant;
  rel.trivially_infeasible = sys.trivially_infeasible;
  rel.flat_gap = sys.flat_gap();

  const int v = sys.catalog.size();
  if (v < 1) throw std::invalid_argument("system has no variables");
  if (N < sys.min_relaxation_order())
    throw OrderTooSmall("N=" + std::to_string(N) + " below max half-degree " +
                        std::to_string(sys.min_relaxation_order()));

  rel.basis = enumerate_monomials(v, N);
  rel.space = enumerate_monomials(v, 2 * N);

  rel.var_scale.resize(v);
  for (int i = 0; i < v; ++i) {
    Integer r = rescale ? sys.catalog.vars[i].range : Integer(1);
    rel.var_scale[i] = r >= 1 ? r : Integer(1);
  }

  // Moment matrix block.
  {
    PsdBlockMap blk;
    blk.label = "moment";
    blk.order = N;
    blk.map = localizing_matrix_map(Polynomial::constant(1), sys.catalog, rel.basis, rel.space);
    rel.blocks.push_back(std::move(blk));
  }
  // Localizing block per inequality.
  for (size_t gi = 0; gi < sys.inequalities.size(); ++gi) {
    const Polynomial& g = sys.inequalities[gi];
    const int ord = N - (g.degree() + 1) / 2;
    if (ord < 0) throw OrderTooSmall("inequality degree exceeds 2N");
    PsdBlockMap blk;
    blk.label = "loc_g" + std::to_string(gi + 1);
    blk.order = ord;
    const MonomialBasis rows = enumerate_monomials(v, ord);
    blk.map = localizing_matrix_map(g, sys.catalog, rows, rel.space);
    rel.blocks.push_back(std::move(blk));
  }

  // Equality rows: one per distinct shift monomial of each equality.
  std::unordered_map<std::string, int> seen;
  auto signature = [](const EqualityRow& row) {
    std::ostringstream os;
    const Rational lead = row.terms.empty() ? Rational(1) : row.terms.front().coeff;
    for (const auto& t : row.terms) os << t.mom << ":" << format_rational(t.coeff / lead) << ",";
    os << "|" << format_rational(row.rhs / lead);
    return os.str();
  };
  auto push_row = [&](EqualityRow row) {
    std::sort(row.terms.begin(), row.terms.end(),
              [](const MomentTerm& a, const MomentTerm& b) { return a.mom < b.mom; });
    std::vector<MomentTerm> merged;
    for (const auto& t : row.terms) {
      if (!merged.empty() && merged.back().mom == t.mom) merged.back().coeff += t.coeff;
      else merged.push_back(t);
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [](const MomentTerm& t) { return t.coeff == 0; }),
                 merged.end());
    row.terms = std::move(merged);
    if (row.terms.empty()) {
      if (row.rhs != 0) rel.trivially_infeasible = true;
      return;
    }
    const std::string sig = signature(row);
    if (seen.emplace(sig, 1).second) rel.equalities.push_back(std::move(row));
  };

  // Normalization y_0 = 1.
  {
    EqualityRow row;
    row.terms.push_back({0, Rational(1)});
    row.rhs = 1;
    push_row(std::move(row));
  }

  std::vector<Polynomial> all_equalities = sys.equalities;
  all_equalities.insert(all_equalities.end(), sys.implied_equalities.begin(),
                        sys.implied_equalities.end());
  for (const Polynomial& h : all_equalities) {
    // All valid shifts up to the truncation degree, not just the localizing
    // matrix entries: h * sigma with deg <= 2N. The extra odd-degree shifts
    // pin the top moments, which keeps the moment body bounded.
    const int shift_deg = 2 * N - h.degree();
    if (shift_deg < 0) throw OrderTooSmall("equality degree exceeds 2N");
    const MonomialBasis shifts = enumerate_monomials(v, shift_deg);
    std::vector<std::pair<std::vector<int>, Rational>> hterms;
    for (const auto& [m, c] : h.terms) hterms.emplace_back(dense_exponents(m, sys.catalog), c);
    std::vector<int> sum(v);
    for (int si = 0; si < shifts.size(); ++si) {
      EqualityRow row;
      row.rhs = 0;
      for (const auto& [he, hc] : hterms) {
        for (int w = 0; w < v; ++w) sum[w] = he[w] + shifts.monos[si][w];
        const int idx = rel.space.index_of(sum);
        if (idx < 0) throw OrderTooSmall("equality shift exceeds the moment space");
        row.terms.push_back({idx, hc});
      }
      push_row(std::move(row));
    }
  }
  return rel;
}

}  // namespace molp
