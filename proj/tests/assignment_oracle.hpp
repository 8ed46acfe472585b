#pragma once
// Brute-force level-diagram references used by the assignment tests and the acceptance suite.

#include <algorithm>
#include <bit>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "spinsim/assignment.hpp"

namespace oracle {

using spinsim::AssignmentResult;
using spinsim::ConnectivityMatrix;
using spinsim::IMatrix;

// Levels are bit patterns; manifold = number of set bits.
struct Edge {
  int lower, upper;
};

inline int shared_sign(Edge a, Edge b) {
  const int shared = (a.lower == b.lower) + (a.lower == b.upper) + (a.upper == b.lower) + (a.upper == b.upper);
  if (shared != 1) return 0;
  return (a.lower == b.upper || a.upper == b.lower) ? 1 : -1;
}

inline std::vector<Edge> all_edges(int n) {
  std::vector<Edge> out;
  for (int a = 0; a < (1 << n); ++a) {
    for (int b = 0; b < (1 << n); ++b) {
      if (std::popcount(unsigned(b)) == std::popcount(unsigned(a)) + 1) out.push_back({a, b});
    }
  }
  return out;
}

// Lexicographically smallest edge list over every within-manifold relabeling and the
// global inversion, with levels numbered manifold by manifold.
inline std::vector<int> brute_canonical(const std::vector<Edge>& edges, int n) {
  std::vector<std::vector<int>> members(n + 1);
  for (int l = 0; l < (1 << n); ++l) members[std::popcount(unsigned(l))].push_back(l);
  std::vector<int> offset(n + 2, 0);
  for (int k = 0; k <= n; ++k) offset[k + 1] = offset[k] + static_cast<int>(members[k].size());
  std::vector<int> best;
  for (int flip = 0; flip < 2; ++flip) {
    std::vector<std::vector<int>> perm(n + 1);
    for (int k = 0; k <= n; ++k) {
      perm[k].resize(members[k].size());
      std::iota(perm[k].begin(), perm[k].end(), 0);
    }
    // odometer over the product of per-manifold permutations
    while (true) {
      std::vector<int> index(1 << n);
      for (int k = 0; k <= n; ++k) {
        for (std::size_t r = 0; r < members[k].size(); ++r) {
          const int kk = flip ? n - k : k;
          index[members[k][r]] = offset[kk] + perm[k][r];
        }
      }
      std::vector<int> key;
      for (const auto& e : edges) {
        key.push_back(flip ? index[e.upper] : index[e.lower]);
        key.push_back(flip ? index[e.lower] : index[e.upper]);
      }
      if (best.empty() || key < best) best = key;
      int k = 0;
      while (k <= n && !std::next_permutation(perm[k].begin(), perm[k].end())) ++k;
      if (k > n) break;
    }
  }
  return best;
}

// Plain depth-first enumeration over every edge for every transition in id order.
inline std::set<std::vector<int>> exhaustive(const ConnectivityMatrix& cm, int n) {
  const auto edges = all_edges(n);
  const int t = cm.size();
  std::vector<Edge> chosen;
  std::set<std::vector<int>> out;
  auto rec = [&](auto&& self) -> void {
    const int i = static_cast<int>(chosen.size());
    if (i == t) {
      out.insert(brute_canonical(chosen, n));
      return;
    }
    for (const auto& e : edges) {
      bool ok = true;
      for (int j = 0; j < i && ok; ++j) {
        const bool same = chosen[j].lower == e.lower && chosen[j].upper == e.upper;
        ok = !same && shared_sign(e, chosen[j]) == cm.m(i, j);
      }
      if (!ok) continue;
      chosen.push_back(e);
      self(self);
      chosen.pop_back();
    }
  };
  rec(rec);
  return out;
}

inline std::set<std::vector<int>> solver_keys(const AssignmentResult& res) {
  std::set<std::vector<int>> out;
  for (const auto& d : res.diagrams) {
    std::vector<int> key;
    for (const auto& e : d.edges) {
      key.push_back(e.lower);
      key.push_back(e.upper);
    }
    out.insert(key);
  }
  return out;
}

inline ConnectivityMatrix matrix_of(const std::vector<Edge>& edges) {
  ConnectivityMatrix cm;
  const int t = static_cast<int>(edges.size());
  cm.m = IMatrix::Zero(t, t);
  for (int i = 0; i < t; ++i) {
    cm.ids.push_back(i + 1);
    for (int j = 0; j < t; ++j) {
      if (i != j) cm.m(i, j) = shared_sign(edges[i], edges[j]);
    }
  }
  return cm;
}

inline std::vector<Edge> random_diagram(std::mt19937_64& rng, int n, int t) {
  auto edges = all_edges(n);
  std::shuffle(edges.begin(), edges.end(), rng);
  edges.resize(std::min<std::size_t>(t, edges.size()));
  return edges;
}

}  // namespace oracle
