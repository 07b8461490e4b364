#pragma once

#include "molp/moment.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace molp {

enum class SolveStatus { Solved, MaxIters, Infeasible, NumericalFailure };

struct SolverOptions {
  double tol_eq = 1e-8;        // equality residual target (relative per row)
  double tol_psd = 1e-8;       // minimum block eigenvalue target
  double tol_gap = 1e-8;       // complementarity target for tau-scaled iterates
  int max_iters = 200;
  double step_fraction = 0.98; // fraction of the distance to the cone boundary
  bool verbose = false;
};

/// Dual-form conic problem over a reduced free variable t:
///   find t with  S_B(y_part + Z t) >= 0 for every block B,
/// where each block is a sparse symmetric affine map of the moment vector y.
/// Equality rows have already been eliminated into (y_part, Z).
struct ConeTermD {
  int r = 0, c = 0;   // r <= c; off-diagonal terms act on both (r,c) and (c,r)
  int mom = 0;
  double coeff = 0.0;
};

struct ConeBlockD {
  std::string label;
  int size = 0;
  std::vector<ConeTermD> terms;
};

struct ConeProblem {
  int nmom = 0;
  std::vector<ConeBlockD> blocks;
  Eigen::VectorXd y_part;
  Eigen::SparseMatrix<double> Z;  // nmom x nfree
  bool inconsistent_equalities = false;

  int nfree() const { return static_cast<int>(Z.cols()); }
  Eigen::MatrixXd block_value(int b, const Eigen::VectorXd& y) const;
};

/// Scales the relaxation onto the unit box (congruence by monomial scales),
/// normalizes rows/blocks, and eliminates the equality rows by Gaussian
/// elimination with partial pivoting. The ConeProblem is in scaled moments.
ConeProblem lower_relaxation(const MomentRelaxation& rel);

struct ConicSolution {
  SolveStatus status = SolveStatus::NumericalFailure;
  Eigen::VectorXd y;         // moment vector, original (unscaled) coordinates
  Eigen::VectorXd y_scaled;  // solver coordinates (unit-box variables)
  std::vector<Eigen::MatrixXd> block_values;  // solver coordinates
  double eq_residual = 0.0;      // max relative residual over equality rows
  double min_eigenvalue = 0.0;   // over all block values
  int iterations = 0;
  double mu_final = 0.0;
};

/// Homogeneous self-dual path-following interior-point solve of the
/// feasibility problem. The embedding's central path ends at a maximally
/// complementary point, so the returned moment matrix has maximal rank over
/// the solution face.
ConicSolution solve(const MomentRelaxation& rel, const SolverOptions& opts = {});

/// Raw HSDE entry point; `y_scaled` out is y_part + Z t at the final iterate.
struct IpmOutcome {
  SolveStatus status = SolveStatus::NumericalFailure;
  Eigen::VectorXd y_scaled;
  int iterations = 0;
  double mu_final = 0.0;
};
IpmOutcome hsde_solve(const ConeProblem& cp, const SolverOptions& opts);

/// (max relative equality residual, min block eigenvalue) of a moment vector
/// in solver (scaled) coordinates.
std::pair<double, double> residuals(const MomentRelaxation& rel, const Eigen::VectorXd& y_scaled);

/// Scaled -> original moment coordinates.
Eigen::VectorXd unscale_moments(const MomentRelaxation& rel, const Eigen::VectorXd& y_scaled);

}  // namespace molp
