#include "molp/sdp.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdio>
#include <limits>

namespace molp {

namespace {

struct ScaledRow {
  std::vector<std::pair<int, double>> terms;
  double rhs = 0.0;
};

// Unit-box congruence: block term coefficients pick up the scale of the
// g-term exponent only (S_idx / (S_row * S_col)); equality rows pick up the
// full moment scale and are then normalized to unit inf-norm.
std::vector<ScaledRow> build_scaled_rows(const MomentRelaxation& rel) {
  std::vector<ScaledRow> rows;
  rows.reserve(rel.equalities.size());
  for (const auto& eq : rel.equalities) {
    ScaledRow row;
    row.rhs = to_double(eq.rhs);
    double norm = std::abs(row.rhs);
    for (const auto& t : eq.terms) {
      const double c = to_double(t.coeff) * rel.moment_scale(t.mom);
      row.terms.emplace_back(t.mom, c);
      norm = std::max(norm, std::abs(c));
    }
    if (norm > 0) {
      for (auto& [m, c] : row.terms) c /= norm;
      row.rhs /= norm;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ConeBlockD> build_scaled_blocks(const MomentRelaxation& rel) {
  // Scale of each basis monomial per block order is resolved through the
  // moment space: S_entry = S_mom / (S_row * S_col).
  std::vector<double> mom_scale(rel.num_moments());
  for (int i = 0; i < rel.num_moments(); ++i) mom_scale[i] = rel.moment_scale(i);

  std::vector<ConeBlockD> out;
  for (const auto& blk : rel.blocks) {
    ConeBlockD b;
    b.label = blk.label;
    b.size = blk.map.size;
    const MonomialBasis rows = enumerate_monomials(rel.space.nvars, blk.order);
    std::vector<double> basis_scale(rows.size());
    for (int r = 0; r < rows.size(); ++r) {
      const int idx = rel.space.index_of(rows.monos[r]);
      basis_scale[r] = idx >= 0 ? mom_scale[idx] : 1.0;
    }
    double maxc = 0.0;
    std::vector<ConeTermD> terms;
    for (int r = 0; r < b.size; ++r) {
      for (int c = r; c < b.size; ++c) {
        for (const auto& t : blk.map.at(r, c)) {
          const double coeff =
              to_double(t.coeff) * mom_scale[t.mom] / (basis_scale[r] * basis_scale[c]);
          terms.push_back({r, c, t.mom, coeff});
          maxc = std::max(maxc, std::abs(coeff));
        }
      }
    }
    if (maxc > 0) {
      for (auto& t : terms) t.coeff /= maxc;
    }
    b.terms = std::move(terms);
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace

Eigen::MatrixXd ConeProblem::block_value(int b, const Eigen::VectorXd& y) const {
  const ConeBlockD& blk = blocks[b];
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(blk.size, blk.size);
  for (const auto& t : blk.terms) {
    const double v = t.coeff * y(t.mom);
    S(t.r, t.c) += v;
    if (t.r != t.c) S(t.c, t.r) += v;
  }
  return S;
}

ConeProblem lower_relaxation(const MomentRelaxation& rel) {
  ConeProblem cp;
  cp.nmom = rel.num_moments();
  cp.blocks = build_scaled_blocks(rel);

  const std::vector<ScaledRow> rows = build_scaled_rows(rel);
  const int E = static_cast<int>(rows.size());
  const int n = cp.nmom;

  // Dense Gauss-Jordan with partial pivoting; columns processed from the
  // highest moment index down so high-degree moments become the dependent
  // ones. Row-major storage keeps the row operations contiguous.
  using RowMajorMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMajorMat R = RowMajorMat::Zero(E, n + 1);
  for (int r = 0; r < E; ++r) {
    for (const auto& [m, c] : rows[r].terms) R(r, m) = c;
    R(r, n) = rows[r].rhs;
  }

  const double pivot_tol = 1e-9;
  std::vector<int> pivot_row_of_col(n, -1);
  std::vector<bool> row_used(E, false);

  for (int col = n - 1; col >= 0; --col) {
    int piv = -1;
    double best = pivot_tol;
    for (int r = 0; r < E; ++r) {
      if (row_used[r]) continue;
      const double a = std::abs(R(r, col));
      if (a > best) {
        best = a;
        piv = r;
      }
    }
    if (piv < 0) continue;
    row_used[piv] = true;
    pivot_row_of_col[col] = piv;
    R.row(piv) /= R(piv, col);
    for (int r = 0; r < E; ++r) {
      if (r == piv) continue;
      const double f = R(r, col);
      if (f == 0.0) continue;
      R.row(r) -= f * R.row(piv);
      R(r, col) = 0.0;
    }
  }

  // Unused rows must have vanished; a surviving right-hand side certifies
  // inconsistency.
  for (int r = 0; r < E; ++r) {
    if (row_used[r]) continue;
    if (std::abs(R(r, n)) > 1e-7) {
      cp.inconsistent_equalities = true;
    }
  }

  std::vector<int> free_cols;
  for (int c = 0; c < n; ++c)
    if (pivot_row_of_col[c] < 0) free_cols.push_back(c);
  const int p = static_cast<int>(free_cols.size());
  std::vector<int> free_pos(n, -1);
  for (int i = 0; i < p; ++i) free_pos[free_cols[i]] = i;

  cp.y_part = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Triplet<double>> trips;
  for (int i = 0; i < p; ++i) trips.emplace_back(free_cols[i], i, 1.0);
  for (int c = 0; c < n; ++c) {
    const int r = pivot_row_of_col[c];
    if (r < 0) continue;
    cp.y_part(c) = R(r, n);
    for (int f = 0; f < p; ++f) {
      const double v = R(r, free_cols[f]);
      if (std::abs(v) > 1e-14) trips.emplace_back(c, f, -v);
    }
  }
  cp.Z.resize(n, p);
  cp.Z.setFromTriplets(trips.begin(), trips.end());
  return cp;
}

namespace {

struct BlockWork {
  int size = 0;
  std::vector<std::vector<ConeTermD>> by_mom;  // active-moment local index -> terms
  Eigen::MatrixXd C;                           // constant part (at y_part)
  Eigen::MatrixXd s, z;
  Eigen::MatrixXd Rm, Rinv, W, V;              // NT scaling
  Eigen::VectorXd lam;
  Eigen::MatrixXd r_p;                         // current primal residual
  Eigen::MatrixXd M;                           // R X R^T + eta r_p (per direction)
  Eigen::MatrixXd ds, dz;                      // direction buffers
  Eigen::MatrixXd ds_aff, dz_aff;
};

double inner(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  return (A.cwiseProduct(B)).sum();
}

// <F_j, T> for every active moment j of one block, accumulated into gv.
void gather_block(const BlockWork& bw, const Eigen::MatrixXd& T, Eigen::VectorXd& gv) {
  const int nact = static_cast<int>(bw.by_mom.size());
  for (int j = 0; j < nact; ++j) {
    double acc = 0.0;
    for (const auto& t : bw.by_mom[j]) {
      if (t.r == t.c) acc += t.coeff * T(t.r, t.r);
      else acc += t.coeff * (T(t.r, t.c) + T(t.c, t.r));
    }
    if (acc != 0.0) gv(j) += acc;
  }
}

// Largest step alpha with P + alpha*D staying PSD; returns +inf when free.
double max_step(const Eigen::MatrixXd& P, const Eigen::MatrixXd& D) {
  Eigen::LLT<Eigen::MatrixXd> llt(P);
  if (llt.info() != Eigen::Success) return 0.0;
  const Eigen::MatrixXd L = llt.matrixL();
  Eigen::MatrixXd Mtmp = L.triangularView<Eigen::Lower>().solve(D);
  Eigen::MatrixXd Msym =
      L.triangularView<Eigen::Lower>().solve(Mtmp.transpose()).transpose();
  Msym = 0.5 * (Msym + Msym.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Msym, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  if (lmin >= 0) return std::numeric_limits<double>::infinity();
  return 1.0 / (-lmin);
}

}  // namespace

IpmOutcome hsde_solve(const ConeProblem& cp, const SolverOptions& opts) {
  IpmOutcome out;
  if (cp.inconsistent_equalities) {
    out.status = SolveStatus::Infeasible;
    return out;
  }

  const int p = cp.nfree();
  const int nB = static_cast<int>(cp.blocks.size());

  // Active moments: those referenced by any block.
  std::vector<int> act_of(cp.nmom, -1);
  std::vector<int> act_list;
  for (const auto& blk : cp.blocks)
    for (const auto& t : blk.terms)
      if (act_of[t.mom] < 0) {
        act_of[t.mom] = 0;
        act_list.push_back(t.mom);
      }
  std::sort(act_list.begin(), act_list.end());
  const int nact = static_cast<int>(act_list.size());
  for (int i = 0; i < nact; ++i) act_of[act_list[i]] = i;

  // Z restricted to active rows.
  Eigen::SparseMatrix<double> Zact(nact, std::max(p, 0));
  {
    std::vector<Eigen::Triplet<double>> trips;
    for (int k = 0; k < cp.Z.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(cp.Z, k); it; ++it)
        if (act_of[it.row()] >= 0) trips.emplace_back(act_of[it.row()], it.col(), it.value());
    Zact.setFromTriplets(trips.begin(), trips.end());
  }

  std::vector<BlockWork> W(nB);
  double nu = 0;
  for (int b = 0; b < nB; ++b) {
    BlockWork& bw = W[b];
    bw.size = cp.blocks[b].size;
    nu += bw.size;
    bw.by_mom.assign(nact, {});
    for (const auto& t : cp.blocks[b].terms) bw.by_mom[act_of[t.mom]].push_back(t);
    bw.C = cp.block_value(b, cp.y_part);
    bw.s = Eigen::MatrixXd::Identity(bw.size, bw.size);
    bw.z = Eigen::MatrixXd::Identity(bw.size, bw.size);
  }

  // Degenerate case: equalities pinned every moment.
  if (p == 0) {
    double mineig = std::numeric_limits<double>::infinity();
    for (int b = 0; b < nB; ++b) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(W[b].C, Eigen::EigenvaluesOnly);
      mineig = std::min(mineig, es.eigenvalues()(0));
    }
    out.status = mineig >= -opts.tol_psd ? SolveStatus::Solved : SolveStatus::Infeasible;
    out.y_scaled = cp.y_part;
    return out;
  }

  double Cnorm = 0;
  for (int b = 0; b < nB; ++b) Cnorm += W[b].C.squaredNorm();
  Cnorm = std::sqrt(Cnorm);

  Eigen::VectorXd t = Eigen::VectorXd::Zero(p);
  double tau = 1.0, kappa = 1.0;

  // Output-referenced acceptance: the tau-scaled moment vector must give
  // blocks with bounded-below spectra.
  auto candidate_mineig = [&](const Eigen::VectorXd& tv, double tauv) {
    Eigen::VectorXd y = cp.y_part + cp.Z * (tv / tauv);
    double mineig = std::numeric_limits<double>::infinity();
    for (int b = 0; b < nB; ++b) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cp.block_value(b, y),
                                                        Eigen::EigenvaluesOnly);
      mineig = std::min(mineig, es.eigenvalues()(0));
    }
    return mineig;
  };

  // Evaluates all blocks at Z * v.
  auto apply_gop = [&](const Eigen::VectorXd& v, std::vector<Eigen::MatrixXd>& dest) {
    Eigen::VectorXd yv = Zact * v;
    for (int b = 0; b < nB; ++b) {
      BlockWork& bw = W[b];
      Eigen::MatrixXd& S = dest[b];
      S.setZero(bw.size, bw.size);
      for (int j = 0; j < nact; ++j) {
        const double yj = yv(j);
        if (yj == 0.0) continue;
        for (const auto& term : bw.by_mom[j]) {
          const double v2 = term.coeff * yj;
          S(term.r, term.c) += v2;
          if (term.r != term.c) S(term.c, term.r) += v2;
        }
      }
    }
  };

  auto gather_all = [&](const std::vector<Eigen::MatrixXd>& Ts) {
    Eigen::VectorXd gv = Eigen::VectorXd::Zero(nact);
    for (int b = 0; b < nB; ++b) gather_block(W[b], Ts[b], gv);
    return Eigen::VectorXd(Zact.transpose() * gv);
  };

  std::vector<Eigen::MatrixXd> gop_t(nB), scratch(nB), Tbuf(nB);

  Eigen::MatrixXd Hy(nact, nact), Ht(p, p);
  Eigen::LLT<Eigen::MatrixXd> Hllt;
  Eigen::VectorXd uvec(p);
  double w0 = 0;

  const double mu0 = 1.0;
  double mu = 1.0;
  int iter = 0;
  double r_g = 0;
  Eigen::VectorXd r_d(p);

  // Best candidate (by block spectrum) once the gap target is reached.
  double best_cand_mineig = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_cand_t;
  double best_cand_tau = 1.0;
  int cand_stall = 0;
  bool gap_was_reached = false;

  auto converged_metrics = [&](double& pres, double& dres) {
    double rp2 = 0;
    for (int b = 0; b < nB; ++b) rp2 += W[b].r_p.squaredNorm();
    pres = std::sqrt(rp2) / tau / (1.0 + Cnorm);
    dres = r_d.cwiseAbs().maxCoeff() / tau / (1.0 + Cnorm);
  };

  for (iter = 0; iter < opts.max_iters; ++iter) {
    // Residuals.
    apply_gop(t, gop_t);
    for (int b = 0; b < nB; ++b) W[b].r_p = W[b].s - gop_t[b] - tau * W[b].C;
    {
      Eigen::VectorXd gz = Eigen::VectorXd::Zero(nact);
      for (int b = 0; b < nB; ++b) gather_block(W[b], W[b].z, gz);
      r_d = -(Zact.transpose() * gz);
    }
    double cz = 0;
    for (int b = 0; b < nB; ++b) cz += inner(W[b].C, W[b].z);
    r_g = kappa + cz;

    double sz = 0;
    for (int b = 0; b < nB; ++b) sz += inner(W[b].s, W[b].z);
    mu = (sz + tau * kappa) / (nu + 1.0);

    double pres, dres;
    converged_metrics(pres, dres);
    const double gap_rel = mu / (tau * tau) / (1.0 + Cnorm);
    const bool broken = !std::isfinite(mu) || !std::isfinite(pres) || !std::isfinite(tau);

    if (opts.verbose && !broken) {
      std::fprintf(stderr,
                   "it %3d mu %9.2e tau %9.2e kap %9.2e pres %9.2e dres %9.2e gap %9.2e\n",
                   iter, mu, tau, kappa, pres, dres, gap_rel);
    }

    // The dual infeasibility enters only through the certificate side of the
    // embedding; the accepted object is the tau-scaled moment vector, judged
    // by its own block spectra.
    bool stop = broken;
    if (!broken && gap_rel <= opts.tol_gap) gap_was_reached = true;
    const bool harvest =
        !broken && pres <= 1e-4 &&
        (gap_rel <= opts.tol_gap || (gap_was_reached && gap_rel <= 100 * opts.tol_gap));
    if (harvest) {
      const double cm = candidate_mineig(t, tau);
      if (opts.verbose) std::fprintf(stderr, "    candidate mineig %9.2e\n", cm);
      if (cm > best_cand_mineig) {
        best_cand_mineig = cm;
        best_cand_t = t;
        best_cand_tau = tau;
        cand_stall = 0;
      } else {
        ++cand_stall;
      }
      if (best_cand_mineig >= -opts.tol_psd || cand_stall >= 6) stop = true;
    } else if (!broken && gap_was_reached && gap_rel > 100 * opts.tol_gap) {
      // Left the converged region: the Newton systems are past their
      // accuracy floor.
      stop = true;
    }
    if (stop) {
      if (best_cand_t.size() > 0) {
        t = best_cand_t;
        tau = best_cand_tau;
        out.status = best_cand_mineig >= -opts.tol_psd ? SolveStatus::Solved
                                                       : SolveStatus::NumericalFailure;
      } else {
        out.status = SolveStatus::NumericalFailure;
      }
      break;
    }
    // Farkas certificate for infeasibility: z >= 0 with A*(z) ~ 0, <C,z> < 0.
    if (cz < 0) {
      Eigen::VectorXd gz = -r_d;  // = A*(z)
      const double cert = gz.cwiseAbs().maxCoeff() / (-cz);
      if (cert <= 1e-9 && kappa / tau > 1e6) {
        out.status = SolveStatus::Infeasible;
        break;
      }
    }
    if (mu <= 1e-14 * mu0) {
      out.status = pres <= 1e-7 ? SolveStatus::Solved : SolveStatus::NumericalFailure;
      break;
    }

    // NT scalings.
    bool scaling_ok = true;
    for (int b = 0; b < nB; ++b) {
      BlockWork& bw = W[b];
      Eigen::LLT<Eigen::MatrixXd> ls(bw.s), lz(bw.z);
      if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) {
        scaling_ok = false;
        break;
      }
      const Eigen::MatrixXd Ls = ls.matrixL();
      const Eigen::MatrixXd Lz = lz.matrixL();
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(Lz.transpose() * Ls,
                                            Eigen::ComputeThinU | Eigen::ComputeThinV);
      bw.lam = svd.singularValues();
      const Eigen::VectorXd lam_isqrt = bw.lam.cwiseSqrt().cwiseInverse();
      bw.Rm = Ls * svd.matrixV() * lam_isqrt.asDiagonal();
      Eigen::MatrixXd LsInv =
          Ls.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(bw.size, bw.size));
      bw.Rinv = bw.lam.cwiseSqrt().asDiagonal() * svd.matrixV().transpose() * LsInv;
      bw.W = bw.Rm * bw.Rm.transpose();
      bw.V = bw.Rinv.transpose() * bw.Rinv;
    }
    if (!scaling_ok) {
      out.status = SolveStatus::NumericalFailure;
      break;
    }

    // Schur complement in the reduced variables.
    Hy.setZero();
    for (int b = 0; b < nB; ++b) {
      BlockWork& bw = W[b];
      const int s = bw.size;
      Eigen::MatrixXd G(s, s);
      Eigen::MatrixXd L, Rt;
      for (int k = 0; k < nact; ++k) {
        const auto& terms = bw.by_mom[k];
        if (terms.empty()) continue;
        int w = 0;
        for (const auto& term : terms) w += (term.r == term.c) ? 1 : 2;
        L.resize(s, w);
        Rt.resize(s, w);
        int col = 0;
        for (const auto& term : terms) {
          if (term.r == term.c) {
            L.col(col) = term.coeff * bw.V.col(term.r);
            Rt.col(col) = bw.V.col(term.r);
            ++col;
          } else {
            L.col(col) = term.coeff * bw.V.col(term.r);
            Rt.col(col) = bw.V.col(term.c);
            ++col;
            L.col(col) = term.coeff * bw.V.col(term.c);
            Rt.col(col) = bw.V.col(term.r);
            ++col;
          }
        }
        G.noalias() = L * Rt.transpose();
        for (int j = 0; j <= k; ++j) {
          const auto& tj = bw.by_mom[j];
          if (tj.empty()) continue;
          double acc = 0;
          for (const auto& term : tj) {
            if (term.r == term.c) acc += term.coeff * G(term.r, term.r);
            else acc += term.coeff * (G(term.r, term.c) + G(term.c, term.r));
          }
          Hy(j, k) += acc;
        }
      }
    }
    Hy.triangularView<Eigen::StrictlyLower>() = Hy.transpose();
    {
      Eigen::MatrixXd ZtH = Zact.transpose() * Hy;
      Ht.noalias() = ZtH * Zact;
    }

    // u and w0.
    {
      for (int b = 0; b < nB; ++b) {
        Tbuf[b].noalias() = W[b].V * W[b].C * W[b].V;
      }
      uvec = gather_all(Tbuf);
      w0 = 0;
      for (int b = 0; b < nB; ++b) w0 += inner(W[b].C, Tbuf[b]);
    }

    // Jacobi-equilibrated Cholesky with iterative refinement on every solve.
    Eigen::VectorXd Dj = Ht.diagonal().cwiseMax(1e-300).cwiseSqrt();
    Eigen::VectorXd Dinv = Dj.cwiseInverse();
    {
      Eigen::MatrixXd Hs = Dinv.asDiagonal() * Ht * Dinv.asDiagonal();
      double reg = 0.0;
      for (;;) {
        Eigen::MatrixXd Hreg = Hs;
        if (reg > 0) Hreg.diagonal().array() += reg;
        Hllt.compute(Hreg);
        if (Hllt.info() == Eigen::Success) break;
        reg = reg == 0.0 ? 1e-14 : reg * 100;
        if (reg > 1e-4) break;
      }
    }
    if (Hllt.info() != Eigen::Success) {
      out.status = SolveStatus::NumericalFailure;
      break;
    }
    auto schur_solve = [&](const Eigen::VectorXd& b) {
      Eigen::VectorXd x = Dinv.cwiseProduct(Hllt.solve(Dinv.cwiseProduct(b)));
      for (int pass = 0; pass < 3; ++pass) {
        Eigen::VectorXd resid = b - Ht * x;
        x += Dinv.cwiseProduct(Hllt.solve(Dinv.cwiseProduct(resid)));
      }
      return x;
    };

    Eigen::VectorXd v2 = schur_solve(uvec);

    // One direction for given targets; fills ds/dz per block and returns
    // (dt, dtau, dkappa).
    auto direction = [&](double sigma, bool corrector, double dtk_extra,
                         Eigen::VectorXd& dt, double& dtau, double& dkappa) {
      const double eta = 1.0;
      for (int b = 0; b < nB; ++b) {
        BlockWork& bw = W[b];
        const int s = bw.size;
        Eigen::MatrixXd D(s, s);
        if (!corrector) {
          D = (-bw.lam.array().square()).matrix().asDiagonal();
        } else {
          Eigen::MatrixXd P = bw.Rinv * bw.ds_aff * bw.Rinv.transpose();
          Eigen::MatrixXd Q = bw.Rm.transpose() * bw.dz_aff * bw.Rm;
          Eigen::MatrixXd G = 0.5 * (P * Q + Q * P);
          D = -G;
          D.diagonal().array() += sigma * mu;
          D.diagonal() -= bw.lam.array().square().matrix();
        }
        // Lyapunov solve in the scaled eigenbasis.
        Eigen::MatrixXd X(s, s);
        for (int a = 0; a < s; ++a)
          for (int c2 = 0; c2 < s; ++c2) X(a, c2) = 2.0 * D(a, c2) / (bw.lam(a) + bw.lam(c2));
        bw.M.noalias() = bw.Rm * X * bw.Rm.transpose();
        bw.M += eta * bw.r_p;
        Tbuf[b].noalias() = bw.V * bw.M * bw.V;
      }
      Eigen::VectorXd b1 = gather_all(Tbuf) - eta * r_d;
      double cc0 = 0;
      for (int b = 0; b < nB; ++b) cc0 += inner(W[b].C, Tbuf[b]);
      const double d_tk = corrector ? dtk_extra : -tau * kappa;
      const double b2 = d_tk + tau * eta * r_g + tau * cc0;

      Eigen::VectorXd v1 = schur_solve(b1);
      const double denom = kappa + tau * w0 - tau * uvec.dot(v2);
      dtau = (b2 - tau * uvec.dot(v1)) / denom;
      dt = v1 - dtau * v2;

      apply_gop(dt, scratch);
      double cdz = 0;
      for (int b = 0; b < nB; ++b) {
        BlockWork& bw = W[b];
        // N is what W dz W equals by construction; using it directly keeps
        // the primal Newton row exact as the scaling degenerates.
        Eigen::MatrixXd N = bw.M - scratch[b] - dtau * bw.C;
        N = 0.5 * (N + N.transpose());
        bw.dz.noalias() = bw.V * N * bw.V;
        bw.dz = 0.5 * (bw.dz + bw.dz.transpose());
        // Two refinement passes against W dz W = N cancel the kappa(W)^2
        // roundoff that otherwise leaks into the dual row.
        for (int pass = 0; pass < 2; ++pass) {
          Eigen::MatrixXd R1 = N - bw.W * bw.dz * bw.W;
          bw.dz.noalias() += bw.V * R1 * bw.V;
          bw.dz = 0.5 * (bw.dz + bw.dz.transpose());
        }
        bw.ds.noalias() = (bw.M - eta * bw.r_p) - N;
        bw.ds = 0.5 * (bw.ds + bw.ds.transpose());
        cdz += inner(bw.C, bw.dz);
      }
      dkappa = -eta * r_g - cdz;
    };

    auto step_limit = [&](double dtau, double dkappa) {
      double a = std::numeric_limits<double>::infinity();
      for (int b = 0; b < nB; ++b) {
        a = std::min(a, max_step(W[b].s, W[b].ds));
        a = std::min(a, max_step(W[b].z, W[b].dz));
      }
      if (dtau < 0) a = std::min(a, -tau / dtau);
      if (dkappa < 0) a = std::min(a, -kappa / dkappa);
      return a;
    };

    // Predictor.
    Eigen::VectorXd dt_aff(p);
    double dtau_aff = 0, dkappa_aff = 0;
    direction(0.0, false, 0.0, dt_aff, dtau_aff, dkappa_aff);
    if (opts.verbose) {
      // Newton equation residuals for the affine direction.
      Eigen::VectorXd gdz = Eigen::VectorXd::Zero(nact);
      for (int b = 0; b < nB; ++b) gather_block(W[b], W[b].dz, gdz);
      Eigen::VectorXd eq1 = Eigen::VectorXd(Zact.transpose() * gdz) - r_d;
      apply_gop(dt_aff, scratch);
      double eq2 = 0;
      for (int b = 0; b < nB; ++b) {
        Eigen::MatrixXd lhs = W[b].ds - scratch[b] - dtau_aff * W[b].C + W[b].r_p;
        eq2 = std::max(eq2, lhs.cwiseAbs().maxCoeff());
      }
      double cdz2 = 0;
      for (int b = 0; b < nB; ++b) cdz2 += inner(W[b].C, W[b].dz);
      const double eq3 = std::abs(dkappa_aff + cdz2 + r_g);
      const double eq5 = std::abs(kappa * dtau_aff + tau * dkappa_aff + tau * kappa);
      std::fprintf(stderr, "    aff eq1 %9.2e eq2 %9.2e eq3 %9.2e eq5 %9.2e\n",
                   eq1.cwiseAbs().maxCoeff(), eq2, eq3, eq5);
    }
    for (int b = 0; b < nB; ++b) {
      W[b].ds_aff = W[b].ds;
      W[b].dz_aff = W[b].dz;
    }
    const double a_aff = std::min(1.0, step_limit(dtau_aff, dkappa_aff));

    double sz_aff = 0;
    for (int b = 0; b < nB; ++b)
      sz_aff += inner(W[b].s + a_aff * W[b].ds_aff, W[b].z + a_aff * W[b].dz_aff);
    const double mu_aff =
        (sz_aff + (tau + a_aff * dtau_aff) * (kappa + a_aff * dkappa_aff)) / (nu + 1.0);
    double sigma = std::pow(std::max(0.0, mu_aff / mu), 3.0);
    sigma = std::min(1.0, std::max(1e-8, sigma));

    // Corrector / combined step.
    Eigen::VectorXd dt(p);
    double dtau = 0, dkappa = 0;
    const double dtk = sigma * mu - tau * kappa - dtau_aff * dkappa_aff;
    direction(sigma, true, dtk, dt, dtau, dkappa);

    double alpha = step_limit(dtau, dkappa);
    alpha = std::min(1.0, opts.step_fraction * alpha);
    if (opts.verbose)
      std::fprintf(stderr, "    sigma %9.2e a_aff %9.2e alpha %9.2e\n", sigma, a_aff, alpha);
    if (!(alpha > 0) || !std::isfinite(alpha)) {
      out.status = SolveStatus::NumericalFailure;
      break;
    }

    t += alpha * dt;
    tau += alpha * dtau;
    kappa += alpha * dkappa;
    for (int b = 0; b < nB; ++b) {
      W[b].s += alpha * W[b].ds;
      W[b].z += alpha * W[b].dz;
      W[b].s = 0.5 * (W[b].s + W[b].s.transpose());
      W[b].z = 0.5 * (W[b].z + W[b].z.transpose());
    }
  }

  if (iter >= opts.max_iters) out.status = SolveStatus::MaxIters;
  // Salvage the best candidate after a late breakdown or iteration cap.
  if (out.status != SolveStatus::Solved && out.status != SolveStatus::Infeasible &&
      best_cand_t.size() > 0) {
    t = best_cand_t;
    tau = best_cand_tau;
    if (best_cand_mineig >= -opts.tol_psd) out.status = SolveStatus::Solved;
  }
  out.iterations = iter;
  out.mu_final = mu / (tau * tau);
  out.y_scaled = cp.y_part + cp.Z * (t / tau);
  return out;
}

std::pair<double, double> residuals(const MomentRelaxation& rel, const Eigen::VectorXd& y_scaled) {
  const std::vector<ScaledRow> rows = build_scaled_rows(rel);
  double eqres = 0;
  for (const auto& row : rows) {
    double acc = -row.rhs;
    for (const auto& [m, c] : row.terms) acc += c * y_scaled(m);
    eqres = std::max(eqres, std::abs(acc));
  }
  const std::vector<ConeBlockD> blocks = build_scaled_blocks(rel);
  ConeProblem tmp;
  tmp.nmom = rel.num_moments();
  tmp.blocks = blocks;
  double mineig = std::numeric_limits<double>::infinity();
  for (size_t b = 0; b < blocks.size(); ++b) {
    Eigen::MatrixXd S = tmp.block_value(static_cast<int>(b), y_scaled);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
    mineig = std::min(mineig, es.eigenvalues()(0));
  }
  return {eqres, mineig};
}

Eigen::VectorXd unscale_moments(const MomentRelaxation& rel, const Eigen::VectorXd& y_scaled) {
  Eigen::VectorXd y(y_scaled.size());
  for (int i = 0; i < y_scaled.size(); ++i) y(i) = y_scaled(i) * rel.moment_scale(i);
  return y;
}

ConicSolution solve(const MomentRelaxation& rel, const SolverOptions& opts) {
  ConicSolution sol;
  if (rel.trivially_infeasible) {
    sol.status = SolveStatus::Infeasible;
    return sol;
  }
  const ConeProblem cp = lower_relaxation(rel);
  const IpmOutcome ipm = hsde_solve(cp, opts);
  sol.status = ipm.status;
  sol.iterations = ipm.iterations;
  sol.mu_final = ipm.mu_final;
  if (ipm.y_scaled.size() == 0) return sol;

  sol.y_scaled = ipm.y_scaled;
  sol.y = unscale_moments(rel, sol.y_scaled);
  for (size_t b = 0; b < cp.blocks.size(); ++b)
    sol.block_values.push_back(cp.block_value(static_cast<int>(b), sol.y_scaled));
  const auto [eqres, mineig] = residuals(rel, sol.y_scaled);
  sol.eq_residual = eqres;
  sol.min_eigenvalue = mineig;
  if (sol.status == SolveStatus::Solved &&
      (eqres > opts.tol_eq || mineig < -opts.tol_psd)) {
    sol.status = SolveStatus::NumericalFailure;
  }
  return sol;
}

}  // namespace molp
