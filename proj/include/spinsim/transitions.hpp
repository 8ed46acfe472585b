#pragma once

#include <optional>
#include <span>
#include <vector>

#include "spinsim/eigensystem.hpp"
#include "spinsim/spin_system.hpp"

namespace spinsim {

struct Transition {
  int id = 0;
  int lower = 0;  // eigenstate with the larger M_z
  int upper = 0;  // eigenstate with M_z one smaller
  double freq_hz = 0.0;
  double intensity = 0.0;  // |<upper|F-|lower>|^2
  bool observable = false;
};

struct TransitionCatalog {
  std::vector<Transition> entries;  // sorted by id, ids are 1..size()
  double threshold = 0.05;

  const Transition& by_id(int id) const;
  // Id of the transition joining eigenstates a and b (either order), if single quantum.
  std::optional<int> find(int a, int b) const;
  int observable_count() const;
  double max_intensity() const;
};

inline constexpr double kDefaultThreshold = 0.05;

// Enumerates every Delta M_z = -1 eigenstate pair. Pinned ids are honored; the rest are
// assigned in descending intensity order with ties broken by ascending frequency.
TransitionCatalog transition_catalog(const EigenSystem& es, double threshold = kDefaultThreshold,
                                     std::span<const PinnedTransition> pinned = {});

// Catalog for `sys` using its pinned ids.
TransitionCatalog transition_catalog(const EigenSystem& es, const SpinSystem& sys,
                                     double threshold = kDefaultThreshold);

// binomial(2n, n-1)
long sq_transition_count(int n);

// Swaps two eigenstate labels in an eigen system and a catalog built from it. Catalog ids
// follow their transitions. The two states must share an M_z manifold.
EigenSystem swap_labels(const EigenSystem& es, const std::string& a, const std::string& b);
TransitionCatalog swap_labels(const TransitionCatalog& cat, const EigenSystem& es, const std::string& a,
                              const std::string& b);

}  // namespace spinsim
