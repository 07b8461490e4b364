#include "molp/sdpa_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace molp {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void export_sdpa(const MomentRelaxation& rel, std::ostream& os) {
  const int nvars = rel.num_moments();
  const int npsd = static_cast<int>(rel.blocks.size());
  const int neq = static_cast<int>(rel.equalities.size());
  const int nblocks = npsd + (neq > 0 ? 1 : 0);

  os << nvars << " = mDIM\n";
  os << nblocks << " = nBLOCK\n";
  for (int b = 0; b < npsd; ++b) os << rel.blocks[b].map.size << (b + 1 < nblocks ? " " : "");
  if (neq > 0) os << (npsd > 0 ? " " : "") << -(2 * neq);
  os << "\n";
  for (int j = 0; j < nvars; ++j) os << "0" << (j + 1 < nvars ? " " : "");
  os << "\n";

  for (int b = 0; b < npsd; ++b) {
    const auto& blk = rel.blocks[b];
    for (int r = 0; r < blk.map.size; ++r) {
      for (int c = r; c < blk.map.size; ++c) {
        for (const auto& t : blk.map.at(r, c)) {
          os << (t.mom + 1) << " " << (b + 1) << " " << (r + 1) << " " << (c + 1) << " "
             << fmt(to_double(t.coeff)) << "\n";
        }
      }
    }
  }
  for (int e = 0; e < neq; ++e) {
    const auto& row = rel.equalities[e];
    const int blk = npsd + 1;
    const int dpos = 2 * e + 1;
    for (const auto& t : row.terms) {
      os << (t.mom + 1) << " " << blk << " " << dpos << " " << dpos << " "
         << fmt(to_double(t.coeff)) << "\n";
      os << (t.mom + 1) << " " << blk << " " << (dpos + 1) << " " << (dpos + 1) << " "
         << fmt(-to_double(t.coeff)) << "\n";
    }
    if (row.rhs != 0) {
      os << 0 << " " << blk << " " << dpos << " " << dpos << " " << fmt(to_double(row.rhs))
         << "\n";
      os << 0 << " " << blk << " " << (dpos + 1) << " " << (dpos + 1) << " "
         << fmt(-to_double(row.rhs)) << "\n";
    }
  }
}

void export_sdpa_file(const MomentRelaxation& rel, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  export_sdpa(rel, os);
  if (!os) throw IoError("write failed for '" + path + "'");
}

SdpaData read_sdpa(std::istream& is) {
  SdpaData d;
  std::string line;
  int stage = 0;
  while (std::getline(is, line)) {
    // Comment lines and the "= mDIM" style suffixes are tolerated.
    if (line.empty() || line[0] == '"' || line[0] == '*') continue;
    std::istringstream ls(line);
    if (stage == 0) {
      ls >> d.nvars;
      if (!ls) throw IoError("bad mDIM line");
      stage = 1;
    } else if (stage == 1) {
      int nb;
      ls >> nb;
      if (!ls) throw IoError("bad nBLOCK line");
      d.block_sizes.reserve(nb);
      stage = 2;
    } else if (stage == 2) {
      int v;
      while (ls >> v) d.block_sizes.push_back(v);
      stage = 3;
    } else if (stage == 3) {
      double v;
      while (ls >> v) d.objective.push_back(v);
      stage = 4;
    } else {
      SdpaData::Entry e;
      ls >> e.matno >> e.block >> e.i >> e.j >> e.value;
      if (!ls) continue;
      d.entries.push_back(e);
    }
  }
  if (stage < 4) throw IoError("truncated SDPA file");
  return d;
}

SdpaData read_sdpa_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path + "'");
  return read_sdpa(is);
}

}  // namespace molp
