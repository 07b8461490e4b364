#pragma once

#include "molp/rational.hpp"

#include <optional>

namespace molp {

/// Solves the square rational system M x = rhs by Gaussian elimination.
/// Returns std::nullopt when M is singular.
std::optional<RatVec> solve_square(RatMat M, RatVec rhs);

/// Rank of a rational matrix (exact).
int rank_exact(RatMat M);

/// Exact inverse; nullopt when singular.
std::optional<RatMat> invert(RatMat M);

}  // namespace molp
