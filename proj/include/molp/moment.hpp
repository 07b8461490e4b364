#pragma once

#include "molp/polysys.hpp"

#include <unordered_map>

namespace molp {

struct OrderTooSmall : std::runtime_error {
  explicit OrderTooSmall(const std::string& what)
      : std::runtime_error("relaxation order too small: " + what) {}
};

/// All monomials of total degree <= `degree` in `nvars` variables, graded
/// order, within a degree lexicographically by descending exponent vector
/// (index 0 is the constant monomial). Size C(nvars + degree, degree).
struct MonomialBasis {
  int nvars = 0;
  int degree = 0;
  std::vector<std::vector<int>> monos;  // dense exponent vectors
  std::unordered_map<std::string, int> lookup;

  int size() const { return static_cast<int>(monos.size()); }
  int degree_of(int idx) const {
    int d = 0;
    for (int e : monos[idx]) d += e;
    return d;
  }
  static std::string key(const std::vector<int>& e);
  int index_of(const std::vector<int>& e) const {
    auto it = lookup.find(key(e));
    return it == lookup.end() ? -1 : it->second;
  }
};

MonomialBasis enumerate_monomials(int nvars, int degree);

/// (r,c) entry = index of monomial_r * monomial_c in `space`.
Eigen::MatrixXi moment_matrix_map(const MonomialBasis& rows, const MonomialBasis& space);

struct MomentTerm {
  int mom = 0;
  Rational coeff;
};

/// Symmetric-matrix-valued affine map of the moment vector: one term list
/// per entry (r, c) with r <= c.
struct LocalizingMap {
  int size = 0;
  std::vector<std::vector<MomentTerm>> entries;  // index r * size + c, r <= c

  const std::vector<MomentTerm>& at(int r, int c) const {
    return entries[std::min(r, c) * size + std::max(r, c)];
  }
};

/// Localizing map of g at the given row basis; every shifted monomial must
/// exist in `space` (OrderTooSmall otherwise).
LocalizingMap localizing_matrix_map(const Polynomial& g, const VarCatalog& cat,
                                    const MonomialBasis& rows, const MonomialBasis& space);

struct EqualityRow {
  std::vector<MomentTerm> terms;  // sorted by moment index
  Rational rhs;
};

struct PsdBlockMap {
  std::string label;
  int order = 0;
  LocalizingMap map;
};

/// The order-N moment relaxation of a PolySystem: one PSD block for the full
/// moment matrix and one localizing block per inequality; every entry of
/// every equality's localizing matrix becomes a scalar linear equation, plus
/// the normalization y_0 = 1. Feasibility problem (constant objective).
struct MomentRelaxation {
  VarCatalog catalog;
  int order = 0;
  MonomialBasis basis;    // order-N basis (moment block rows)
  MonomialBasis space;    // degree <= 2N moment index space
  std::vector<PsdBlockMap> blocks;      // blocks[0] = moment matrix
  std::vector<EqualityRow> equalities;  // deduplicated; includes y_0 = 1
  int system_index = 0;
  SysVariant variant = SysVariant::FullU;
  bool trivially_infeasible = false;
  int flat_gap = 1;  // floor(deg/2) maximized over the system's constraints

  /// Per-variable grid ranges used for unit-box rescaling by the solver.
  std::vector<Integer> var_scale;

  int num_moments() const { return space.size(); }
  /// prod over vars of scale^exponent for moment idx, as double.
  double moment_scale(int idx) const;
};

MomentRelaxation assemble_relaxation(const PolySystem& sys, int N, bool rescale = true);

}  // namespace molp
