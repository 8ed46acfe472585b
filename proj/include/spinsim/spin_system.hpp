#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spinsim/types.hpp"

namespace spinsim {

// A catalog id pinned by hand to the transition between two labeled eigenstates.
struct PinnedTransition {
  int id = 0;
  std::string a;
  std::string b;
};

// N coupled spin-1/2 nuclei. All couplings in Hz; matrices are symmetric with zero diagonal.
struct SpinSystem {
  std::string name;
  int n = 0;
  std::vector<double> offset_hz;
  RMatrix j_hz;
  RMatrix d_hz;

  // Label transpositions applied after overlap labeling, in file order.
  std::vector<std::pair<std::string, std::string>> relabel;
  // Ids not pinned here are handed out in descending-intensity order.
  std::vector<PinnedTransition> pinned;

  static SpinSystem make(std::string name, std::vector<double> offsets);
  void set_j(int i, int j, double hz);
  void set_d(int i, int j, double hz);

  // Throws InputError when an invariant is violated.
  void validate() const;
};

// Line-oriented text format:
//   name <string> / nspins <int> / offset_hz <n floats>
//   j_hz <i> <j> <float> / d_hz <i> <j> <float>    (1-based indices)
//   relabel <bits> <bits> / transition <id> <bits> <bits>
SpinSystem parse_spin_system(std::string_view text, const std::string& source = "<input>");
SpinSystem load_spin_system(const std::string& path);
std::string format_spin_system(const SpinSystem& sys);

}  // namespace spinsim
