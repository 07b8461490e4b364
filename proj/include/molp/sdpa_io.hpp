#pragma once

#include "molp/moment.hpp"

#include <iosfwd>

namespace molp {

struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error("io error: " + what) {}
};

/// Parsed sparse SDPA data (dual form X = sum_j y_j F_j - F_0 >= 0).
struct SdpaData {
  int nvars = 0;
  std::vector<int> block_sizes;  // negative = diagonal block
  std::vector<double> objective;
  struct Entry {
    int matno = 0;  // 0 = F_0
    int block = 0;  // 1-based
    int i = 0, j = 0;  // 1-based, i <= j
    double value = 0.0;
  };
  std::vector<Entry> entries;
};

/// Writes the relaxation in SDPA sparse format. PSD blocks map directly;
/// every equality row a^T y = r becomes two entries of a trailing diagonal
/// block (a^T y - r >= 0 and r - a^T y >= 0). Objective is zero.
void export_sdpa(const MomentRelaxation& rel, std::ostream& os);
void export_sdpa_file(const MomentRelaxation& rel, const std::string& path);

SdpaData read_sdpa(std::istream& is);
SdpaData read_sdpa_file(const std::string& path);

}  // namespace molp
