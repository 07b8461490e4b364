#pragma once

#include "molp/problem.hpp"

#include <string>
#include <vector>

namespace molp {

struct CombinatorialLimit : std::runtime_error {
  explicit CombinatorialLimit(const std::string& what)
      : std::runtime_error("combinatorial limit exceeded: " + what) {}
};

enum class ConstantProvenance { ComputedLcm, UserOverride, ConservativeMultiple };

struct ScalingConstants {
  Integer M = 1;
  std::vector<Integer> Mi;  // length m
  ConstantProvenance m_provenance = ConstantProvenance::ComputedLcm;
  std::vector<ConstantProvenance> mi_provenance;
};

/// Exact determinant by fraction-free (Bareiss) elimination.
Integer integer_determinant(const IntMat& sq);

enum class MRows { Stacked, RowsOnly };

/// lcm of |det| over all nonsingular n x n submatrices of [A; I_n]
/// (MRows::Stacked, default) or of A alone (MRows::RowsOnly).
Integer compute_M(const MolpProblem& p, MRows mode = MRows::Stacked,
                  long long cap = 1000000);

struct MiMode {
  enum class Kind { Enumerate, Override, Conservative } kind = Kind::Enumerate;
  Integer value = 1;    // Override: the value; Conservative: the factor bound F
};

/// Scaling constant for the dual/weight block of system i.
///  - Enumerate: lcm of |det| over all nonsingular square submatrices of the
///    weight-certificate coefficient matrices: dual-feasibility rows
///    [-A^T | C^T], the simplex row, and per primal basis T of [A; I_n] the
///    integerized optimality rows adj(S_T)^T C^T.
///  - Override: the given value.
///  - Conservative: lcm(1..F), a documented common multiple.
Integer compute_Mi(const MolpProblem& p, int i, const MiMode& mode,
                   long long cap = 1000000);

/// Sound per-row integer upper bounds on dual values across all weightings,
/// from the Hadamard bound on Cramer numerators (denominators are >= 1 for
/// nonsingular integer systems).
IntVec suggest_dual_bounds(const MolpProblem& p);

}  // namespace molp
