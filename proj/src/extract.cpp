#include "molp/extract.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <random>

namespace molp {

int numeric_rank(const Eigen::MatrixXd& mat, double tol_rank, double gap_factor) {
  if (mat.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(mat);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double s1 = sv(0);
  if (s1 <= 0) return 0;
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) >= tol_rank * s1) ++r;
  if (r < sv.size() && sv(r) > 0) {
    if (sv(r - 1) / sv(r) < gap_factor)
      throw AmbiguousRank("sigma_" + std::to_string(r) + "/sigma_" + std::to_string(r + 1) +
                          " below the gap factor");
  }
  return r;
}

namespace {

// Size of the leading graded block of degree <= t.
int leading_size(const MonomialBasis& basis, int t) {
  int s = 0;
  for (int i = 0; i < basis.size(); ++i) {
    if (basis.degree_of(i) <= t) ++s;
    else break;
  }
  return s;
}

}  // namespace

FlatCheck flat_extension_check(const MomentRelaxation& rel, const Eigen::MatrixXd& moment_block,
                               const ExtractOptions& opts) {
  FlatCheck out;
  const int N = rel.order;
  const int d = std::max(1, rel.flat_gap);
  out.ranks.assign(N + 1, -1);
  for (int t = 0; t <= N; ++t) {
    const int st = leading_size(rel.basis, t);
    try {
      out.ranks[t] = numeric_rank(moment_block.topLeftCorner(st, st), opts.tol_rank,
                                  opts.gap_factor);
    } catch (const AmbiguousRank&) {
      out.ranks[t] = -1;
    }
  }
  bool saw_ambiguous = false;
  for (int t = d; t <= N; ++t) {
    if (out.ranks[t] < 0 || out.ranks[t - d] < 0) {
      saw_ambiguous = true;
      continue;
    }
    if (out.ranks[t] == out.ranks[t - d]) {
      out.flat = true;
      out.t = t;
      out.r = out.ranks[t];
      return out;
    }
  }
  out.ambiguous = saw_ambiguous;
  return out;
}

std::vector<int> extraction_basis(const Eigen::MatrixXd& Mt, int r, const MonomialBasis& basis,
                                  const ExtractOptions& opts) {
  const int st = static_cast<int>(Mt.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Mt);
  Eigen::MatrixXd Ur(st, r);
  for (int i = 0; i < r; ++i) Ur.col(i) = es.eigenvectors().col(st - 1 - i);

  std::vector<int> pivots;
  std::vector<Eigen::VectorXd> ortho;
  const double thr = 1e-6;
  for (int row = 0; row < st && static_cast<int>(pivots.size()) < r; ++row) {
    Eigen::VectorXd v = Ur.row(row).transpose();
    for (const auto& q : ortho) v -= q.dot(v) * q;
    const double nrm = v.norm();
    if (nrm >= thr) {
      pivots.push_back(row);
      ortho.push_back(v / nrm);
    }
  }
  if (static_cast<int>(pivots.size()) < r)
    throw IllConditionedBasis("could not find " + std::to_string(r) + " independent rows");

  Eigen::MatrixXd P(r, r);
  for (int i = 0; i < r; ++i) P.row(i) = Ur.row(pivots[i]);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(P);
  const double smin = svd.singularValues()(r - 1);
  if (smin <= 0 || svd.singularValues()(0) / smin > opts.cond_max)
    throw IllConditionedBasis("pivot basis condition number too large");
  return pivots;
}

std::vector<Eigen::MatrixXd> multiplication_matrices(const MomentRelaxation& rel,
                                                     const Eigen::VectorXd& y_scaled, int t,
                                                     const std::vector<int>& pivots) {
  const int st = leading_size(rel.basis, t);
  const int r = static_cast<int>(pivots.size());
  const int nvars = rel.space.nvars;

  auto shifted_column = [&](const std::vector<int>& target) {
    Eigen::VectorXd col(st);
    std::vector<int> sum(nvars);
    for (int a = 0; a < st; ++a) {
      for (int v = 0; v < nvars; ++v) sum[v] = rel.basis.monos[a][v] + target[v];
      const int idx = rel.space.index_of(sum);
      if (idx < 0)
        throw IllConditionedBasis("shifted moment column leaves the moment space");
      col(a) = y_scaled(idx);
    }
    return col;
  };

  Eigen::MatrixXd Pcols(st, r);
  for (int q = 0; q < r; ++q) Pcols.col(q) = shifted_column(rel.basis.monos[pivots[q]]);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Pcols);

  std::vector<Eigen::MatrixXd> mult;
  for (int v = 0; v < nvars; ++v) {
    Eigen::MatrixXd Mv(r, r);
    for (int q = 0; q < r; ++q) {
      std::vector<int> target = rel.basis.monos[pivots[q]];
      target[v] += 1;
      Mv.col(q) = qr.solve(shifted_column(target));
    }
    mult.push_back(Mv);
  }
  return mult;
}

std::vector<Eigen::VectorXd> common_eigen_extract(const std::vector<Eigen::MatrixXd>& mult,
                                                  std::uint64_t seed) {
  if (mult.empty()) return {};
  const int r = static_cast<int>(mult[0].rows());
  const int nvars = static_cast<int>(mult.size());

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.1, 1.0);
  Eigen::VectorXd w(nvars);
  for (int v = 0; v < nvars; ++v) w(v) = dist(rng);
  w /= w.sum();

  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(r, r);
  for (int v = 0; v < nvars; ++v) T += w(v) * mult[v];

  Eigen::RealSchur<Eigen::MatrixXd> schur(T);
  const Eigen::MatrixXd& U = schur.matrixT();
  const Eigen::MatrixXd& Q = schur.matrixU();
  const double scale = 1.0 + U.cwiseAbs().maxCoeff();
  for (int j = 0; j + 1 < r; ++j) {
    if (std::abs(U(j + 1, j)) > 1e-6 * scale)
      throw ComplexEigenvalue("2x2 block in the real Schur form");
  }

  std::vector<Eigen::VectorXd> pts;
  for (int j = 0; j < r; ++j) {
    Eigen::VectorXd q = Q.col(j);
    Eigen::VectorXd pt(nvars);
    for (int v = 0; v < nvars; ++v) pt(v) = q.dot(mult[v] * q);
    pts.push_back(pt);
  }
  return pts;
}

VerifiedPoints round_and_verify(const std::vector<Eigen::VectorXd>& points, const PolySystem& sys,
                                double tol_round) {
  VerifiedPoints out;
  const int nvars = sys.catalog.size();
  for (const auto& pt : points) {
    bool rejected = false;
    std::vector<Integer> ipt(nvars);
    for (int v = 0; v < nvars && !rejected; ++v) {
      const double x = pt(v);
      const Integer rounded = round_to_integer(x);
      if (std::abs(x - to_double(rounded)) > tol_round) {
        out.rejected.push_back({pt, "NonIntegral coordinate " + sys.catalog.vars[v].name});
        rejected = true;
        break;
      }
      if (rounded < 0 || rounded > sys.catalog.vars[v].range) {
        out.rejected.push_back({pt, "OutOfRange coordinate " + sys.catalog.vars[v].name});
        rejected = true;
        break;
      }
      ipt[v] = rounded;
    }
    if (rejected) continue;

    std::map<int, Rational> assign;
    for (int v = 0; v < nvars; ++v) assign[sys.catalog.vars[v].id] = Rational(ipt[v]);
    for (size_t e = 0; e < sys.equalities.size() && !rejected; ++e) {
      if (evaluate(sys.equalities[e], assign) != 0) {
        out.rejected.push_back({pt, "ConstraintViolation equality " + std::to_string(e + 1)});
        rejected = true;
      }
    }
    for (size_t g = 0; g < sys.inequalities.size() && !rejected; ++g) {
      if (evaluate(sys.inequalities[g], assign) < 0) {
        out.rejected.push_back({pt, "ConstraintViolation inequality " + std::to_string(g + 1)});
        rejected = true;
      }
    }
    if (!rejected) {
      // Duplicates can appear when the random combination merges clusters.
      bool dup = false;
      for (const auto& prev : out.points)
        if (prev == ipt) { dup = true; break; }
      if (!dup) out.points.push_back(std::move(ipt));
    }
  }
  return out;
}

std::vector<ParetoCandidate> unscale_and_project(const MolpProblem& p, const PolySystem& sys,
                                                 const VerifiedPoints& verified) {
  std::vector<ParetoCandidate> out;
  const Rational M(sys.M);
  const Rational Mi(sys.Mi);
  for (const auto& ipt : verified.points) {
    ValidTriplet t;
    t.x = RatVec::Zero(p.n);
    t.u = RatVec::Zero(p.m);
    t.lambda = RatVec::Zero(p.k);

    auto value_of = [&](int id, const Rational& fallback, const Rational& div) {
      const int pos = sys.catalog.index_of(id);
      if (pos < 0) return fallback;
      return Rational(ipt[pos]) / div;
    };
    for (int j = 0; j < p.n; ++j) t.x(j) = value_of(var_x(j), Rational(0), M);
    for (int s = 0; s < p.m; ++s) {
      // In the reduced variant the dropped dual variable is pinned to M_i,
      // i.e. 1 after unscaling.
      const Rational fallback = (sys.variant == SysVariant::ReducedU &&
                                 s == sys.system_index - 1)
                                    ? Rational(1)
                                    : Rational(0);
      t.u(s) = value_of(var_u(p.n, s), fallback, Mi);
    }
    for (int r = 0; r < p.k; ++r)
      t.lambda(r) = value_of(var_lambda(p.n, p.m, r), Rational(0), Mi);
    if (sys.lambda_eliminated && p.k >= 1) {
      Rational rest = 0;
      for (int r = 0; r + 1 < p.k; ++r) rest += t.lambda(r);
      t.lambda(p.k - 1) = 1 - rest;
    }

    if (!verify_sys1(p, t))
      throw std::logic_error("verified system point fails the unscaled system");
    if (!is_pareto(p, t.x))
      throw OracleContradiction("extracted point is not Pareto-optimal");
    out.push_back({t.x, std::move(t)});
  }
  return out;
}

ExtractionResult run_extraction(const MomentRelaxation& rel, const PolySystem& sys,
                                const ConicSolution& sol, const ExtractOptions& opts) {
  ExtractionResult res;
  const FlatCheck fc = flat_extension_check(rel, sol.block_values[0], opts);
  res.ranks = fc.ranks;
  if (!fc.flat) {
    res.failure = fc.ambiguous ? "ambiguous_rank" : "not_flat";
    return res;
  }
  res.flat = true;
  res.t = fc.t;
  res.r = fc.r;
  try {
    const int st = leading_size(rel.basis, fc.t);
    res.pivots = extraction_basis(sol.block_values[0].topLeftCorner(st, st), fc.r, rel.basis, opts);
    const auto mult = multiplication_matrices(rel, sol.y_scaled, fc.t, res.pivots);
    const auto pts_scaled = common_eigen_extract(mult, opts.seed);
    for (const auto& pt : pts_scaled) {
      Eigen::VectorXd up(pt.size());
      for (int v = 0; v < pt.size(); ++v) up(v) = pt(v) * to_double(rel.var_scale[v]);
      res.numeric_points.push_back(up);
    }
  } catch (const std::runtime_error& e) {
    res.failure = e.what();
    return res;
  }
  res.verified = round_and_verify(res.numeric_points, sys, opts.tol_round);
  return res;
}

}  // namespace molp
