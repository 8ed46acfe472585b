#pragma once

#include <string>
#include <vector>

#include "spinsim/connectivity.hpp"

namespace spinsim {

struct AssignmentOptions {
  int max_solutions = 64;
};

struct AssignmentResult {
  std::vector<LevelDiagram> diagrams;  // canonical, sorted
  bool truncated = false;              // more than max_solutions exist
  bool satisfiable = true;
  std::vector<int> conflict;           // transition ids of the first inconsistent triple
  std::string report;
};

// Levels of a reconstructed diagram are numbered manifold by manifold from the top
// (M_z = n/2) down. Edges follow the row order of the matrix. Transitions with an all-zero
// row (when there is more than one transition) are flagged ambiguous.
AssignmentResult reconstruct_levels(const ConnectivityMatrix& cm, int n, const AssignmentOptions& opt = {});

// Canonical representative under level permutations within each manifold and global
// top-bottom inversion: the lexicographically smallest edge list.
LevelDiagram canonical_diagram(const LevelDiagram& ld);

struct Discrepancy {
  int a = 0, b = 0;  // transition ids; b == 0 for problems with a single edge
  int expected = 0;
  int actual = 0;
  std::string message;
};

struct Verification {
  bool ok = true;
  std::vector<Discrepancy> discrepancies;
};

Verification verify_diagram(const LevelDiagram& ld, const ConnectivityMatrix& cm);

}  // namespace spinsim
