#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "spinsim/types.hpp"

namespace spinsim {

using IMatrix = Eigen::MatrixXi;

// Signed transition connectivity: +1 progressive, -1 regressive, 0 no shared level.
struct ConnectivityMatrix {
  std::vector<int> ids;  // transition id of each row
  IMatrix m;

  int size() const { return static_cast<int>(ids.size()); }
  void validate() const;
};

// An edge joins `lower` (larger M_z) and `upper` (M_z one smaller).
struct LevelEdge {
  int id = 0;
  int lower = 0;
  int upper = 0;
  bool ambiguous = false;

  bool operator==(const LevelEdge&) const = default;
};

struct LevelDiagram {
  int n = 0;
  std::vector<double> level_mz;  // one entry per level
  std::vector<LevelEdge> edges;  // one per transition, in row order of the connectivity

  int levels() const { return static_cast<int>(level_mz.size()); }
};

// +1 if the two edges chain through exactly one shared level, -1 if they share a common
// top or bottom level, 0 otherwise.
int connectivity_sign(const LevelEdge& a, const LevelEdge& b);

ConnectivityMatrix connectivity_of(const LevelDiagram& ld);

// Rows of -1/0/1 separated by whitespace; '#' comments. Ids are 1..T.
ConnectivityMatrix parse_connectivity(std::string_view text, const std::string& source = "<connectivity>");
ConnectivityMatrix load_connectivity(const std::string& path);
std::string format_connectivity(const ConnectivityMatrix& cm);

// `level <idx> mz <value>` lines then `edge <tid> <lower> <upper>` lines (levels 0-based).
std::string format_diagram(const LevelDiagram& ld);
LevelDiagram parse_diagram(std::string_view text, const std::string& source = "<diagram>");

}  // namespace spinsim
