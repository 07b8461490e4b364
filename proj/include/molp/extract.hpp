#pragma once

#include "molp/oracle.hpp"
#include "molp/sdp.hpp"

#include <cstdint>

namespace molp {

struct AmbiguousRank : std::runtime_error {
  explicit AmbiguousRank(const std::string& what) : std::runtime_error("ambiguous rank: " + what) {}
};
struct IllConditionedBasis : std::runtime_error {
  explicit IllConditionedBasis(const std::string& what)
      : std::runtime_error("ill-conditioned basis: " + what) {}
};
struct ComplexEigenvalue : std::runtime_error {
  explicit ComplexEigenvalue(const std::string& what)
      : std::runtime_error("complex eigenvalue: " + what) {}
};
struct OracleContradiction : std::runtime_error {
  explicit OracleContradiction(const std::string& what)
      : std::runtime_error("oracle contradiction: " + what) {}
};

struct ExtractOptions {
  double tol_rank = 1e-6;   // relative singular value cutoff
  double gap_factor = 1e3;  // required sigma_r / sigma_{r+1} separation
  double tol_round = 1e-4;  // max distance to the nearest integer
  double cond_max = 1e8;    // pivot basis conditioning limit
  std::uint64_t seed = 20240001ull;
};

/// Number of singular values >= tol_rank * sigma_1, requiring a gap of
/// gap_factor between the last kept and first dropped value.
int numeric_rank(const Eigen::MatrixXd& mat, double tol_rank, double gap_factor = 1e3);

struct FlatCheck {
  bool flat = false;
  bool ambiguous = false;  // every candidate order hit AmbiguousRank
  int t = 0;
  int r = 0;
  std::vector<int> ranks;  // rank of M_j for j = 0..N (-1 where ambiguous)
};

/// Smallest t in [d, N] with rank M_t = rank M_{t-d}, where d is the
/// system's flat gap stored on the relaxation and M_j are the leading
/// graded blocks of the moment matrix.
FlatCheck flat_extension_check(const MomentRelaxation& rel, const Eigen::MatrixXd& moment_block,
                               const ExtractOptions& opts);

/// r monomials (indices into the relaxation basis) whose rows span the
/// numeric column space of M_t; greedy lowest-degree-first selection.
std::vector<int> extraction_basis(const Eigen::MatrixXd& Mt, int r, const MonomialBasis& basis,
                                  const ExtractOptions& opts);

/// One r x r multiplication matrix per catalog variable, from least-squares
/// coordinates of the shifted pivot columns in the pivot column basis.
std::vector<Eigen::MatrixXd> multiplication_matrices(const MomentRelaxation& rel,
                                                     const Eigen::VectorXd& y_scaled, int t,
                                                     const std::vector<int>& pivots);

/// Simultaneous diagonalization of a seeded random convex combination via its
/// ordered real Schur form; coordinates are Schur-vector quadratic forms.
std::vector<Eigen::VectorXd> common_eigen_extract(const std::vector<Eigen::MatrixXd>& mult,
                                                  std::uint64_t seed);

struct RejectedPoint {
  Eigen::VectorXd point;
  std::string reason;
};

struct VerifiedPoints {
  std::vector<std::vector<Integer>> points;  // integer coordinates per catalog variable
  std::vector<RejectedPoint> rejected;
};

/// Rounds each coordinate to the nearest integer and keeps points that are
/// within tol_round, inside their grid ranges, and satisfy every system
/// constraint exactly.
VerifiedPoints round_and_verify(const std::vector<Eigen::VectorXd>& points, const PolySystem& sys,
                                double tol_round);

struct ParetoCandidate {
  RatVec x;
  ValidTriplet triplet;
};

/// Divides the x block by M and the u/lambda blocks by M_i, checks the
/// triplet against the unscaled system exactly and the x projection against
/// the Pareto oracle.
std::vector<ParetoCandidate> unscale_and_project(const MolpProblem& p, const PolySystem& sys,
                                                 const VerifiedPoints& verified);

struct ExtractionResult {
  bool flat = false;
  int t = 0;
  int r = 0;
  std::vector<int> ranks;
  std::vector<int> pivots;
  std::vector<Eigen::VectorXd> numeric_points;  // system (unscaled-variable) coordinates
  VerifiedPoints verified;
  std::string failure;  // empty on success
};

/// flat check -> pivots -> multiplication matrices -> eigenvalues -> rounding,
/// end to end for one solved relaxation.
ExtractionResult run_extraction(const MomentRelaxation& rel, const PolySystem& sys,
                                const ConicSolution& sol, const ExtractOptions& opts);

}  // namespace molp
