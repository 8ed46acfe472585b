#include "spinsim/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "spinsim/transitions.hpp"

namespace spinsim {

namespace {

long choose(int n, int k) {
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

struct Layout {
  int n = 0;
  std::vector<int> offset;  // first level of each manifold
  std::vector<int> size;

  explicit Layout(int n_) : n(n_) {
    int at = 0;
    for (int k = 0; k <= n; ++k) {
      offset.push_back(at);
      size.push_back(static_cast<int>(choose(n, k)));
      at += size.back();
    }
    offset.push_back(at);
  }
  int levels() const { return offset.back(); }
  int manifold(int level) const {
    int k = 0;
    while (offset[k + 1] <= level) ++k;
    return k;
  }
  std::vector<double> mz() const {
    std::vector<double> out;
    for (int k = 0; k <= n; ++k) out.insert(out.end(), size[k], 0.5 * n - k);
    return out;
  }
};

using Key = std::vector<int>;

Key key_of(const LevelDiagram& ld) {
  Key k;
  for (const auto& e : ld.edges) {
    k.push_back(e.lower);
    k.push_back(e.upper);
  }
  return k;
}

// Relabels levels by first appearance in edge order, manifold by manifold.
LevelDiagram relabel_first_appearance(const std::vector<LevelEdge>& edges, const std::vector<int>& manifold_of,
                                      const Layout& lay) {
  std::vector<int> next(lay.n + 1, 0);
  std::map<int, int> renum;
  auto get = [&](int level) {
    auto it = renum.find(level);
    if (it != renum.end()) return it->second;
    const int k = manifold_of[level];
    const int id = lay.offset[k] + next[k]++;
    renum.emplace(level, id);
    return id;
  };
  LevelDiagram out;
  out.n = lay.n;
  out.level_mz = lay.mz();
  for (const auto& e : edges) {
    LevelEdge c = e;
    c.lower = get(e.lower);
    c.upper = get(e.upper);
    out.edges.push_back(c);
  }
  return out;
}

class Solver {
 public:
  Solver(const ConnectivityMatrix& cm, int n, int cap) : cm_(cm), lay_(n), cap_(cap), t_(cm.size()) {
    edges_.assign(t_, {-1, -1});
    placed_.assign(t_, false);
    count_.assign(n + 1, 0);
    build_order();
  }

  void run() {
    if (t_ == 0) {
      record();
      return;
    }
    search(0);
  }

  std::map<Key, LevelDiagram> found;
  bool truncated = false;

 private:
  const ConnectivityMatrix& cm_;
  Layout lay_;
  int cap_;
  int t_;
  std::vector<int> order_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<bool> placed_;
  std::vector<int> count_;  // levels in use per manifold; always a prefix

  void build_order() {
    std::vector<bool> seen(t_, false);
    std::vector<int> isolated;
    for (int s = 0; s < t_; ++s) {
      if (seen[s]) continue;
      if (cm_.m.row(s).isZero()) {
        isolated.push_back(s);
        seen[s] = true;
        continue;
      }
      std::vector<int> queue{s};
      seen[s] = true;
      for (std::size_t q = 0; q < queue.size(); ++q) {
        order_.push_back(queue[q]);
        for (int b = 0; b < t_; ++b) {
          if (!seen[b] && cm_.m(queue[q], b) != 0) {
            seen[b] = true;
            queue.push_back(b);
          }
        }
      }
    }
    order_.insert(order_.end(), isolated.begin(), isolated.end());
  }

  int sign(std::pair<int, int> a, std::pair<int, int> b) const {
    return connectivity_sign(LevelEdge{0, a.first, a.second, false}, LevelEdge{0, b.first, b.second, false});
  }

  bool consistent(int t, std::pair<int, int> e) const {
    for (int s = 0; s < t_; ++s) {
      if (!placed_[s]) continue;
      if (edges_[s] == e) return false;
      if (sign(e, edges_[s]) != cm_.m(t, s)) return false;
    }
    return true;
  }

  // Existing levels of manifold k plus the next unused one.
  std::vector<int> choices(int k) const {
    std::vector<int> out;
    if (k < 0 || k > lay_.n) return out;
    const int upto = std::min(count_[k] + 1, lay_.size[k]);
    for (int r = 0; r < upto; ++r) out.push_back(lay_.offset[k] + r);
    return out;
  }

  std::vector<std::pair<int, int>> candidates(int t, bool first) const {
    std::vector<std::pair<int, int>> out;
    int anchor = -1;
    for (int s : order_) {
      if (placed_[s] && cm_.m(t, s) != 0) {
        anchor = s;
        break;
      }
    }
    if (anchor < 0) {
      for (int k = 0; k < lay_.n; ++k) {
        if (first && k > lay_.n - 1 - k) break;
        if (count_[k] < lay_.size[k] && count_[k + 1] < lay_.size[k + 1]) {
          out.emplace_back(lay_.offset[k] + count_[k], lay_.offset[k + 1] + count_[k + 1]);
        }
      }
      return out;
    }
    const auto [lo, up] = edges_[anchor];
    const int k = lay_.manifold(lo);
    if (cm_.m(t, anchor) < 0) {
      for (int u : choices(k + 1)) {
        if (u != up) out.emplace_back(lo, u);
      }
      for (int l : choices(k)) {
        if (l != lo) out.emplace_back(l, up);
      }
    } else {
      for (int l : choices(k - 1)) out.emplace_back(l, lo);
      for (int u : choices(k + 2)) out.emplace_back(up, u);
    }
    return out;
  }

  void record() {
    std::vector<LevelEdge> edges;
    for (int t = 0; t < t_; ++t) {
      const bool ambiguous = t_ > 1 && cm_.m.row(t).isZero();
      edges.push_back({cm_.ids[t], edges_[t].first, edges_[t].second, ambiguous});
    }
    LevelDiagram ld;
    ld.n = lay_.n;
    ld.level_mz = lay_.mz();
    ld.edges = std::move(edges);
    LevelDiagram c = canonical_diagram(ld);
    const Key key = key_of(c);
    if (found.count(key)) return;
    if (static_cast<int>(found.size()) >= cap_) {
      truncated = true;
      return;
    }
    found.emplace(key, std::move(c));
  }

  void search(std::size_t depth) {
    if (truncated) return;
    if (depth == order_.size()) {
      record();
      return;
    }
    const int t = order_[depth];
    for (const auto& e : candidates(t, depth == 0)) {
      if (!consistent(t, e)) continue;
      const int kl = lay_.manifold(e.first);
      const int ku = lay_.manifold(e.second);
      const bool new_l = e.first - lay_.offset[kl] == count_[kl];
      const bool new_u = e.second - lay_.offset[ku] == count_[ku];
      count_[kl] += new_l;
      count_[ku] += new_u;
      edges_[t] = e;
      placed_[t] = true;
      search(depth + 1);
      placed_[t] = false;
      edges_[t] = {-1, -1};
      count_[kl] -= new_l;
      count_[ku] -= new_u;
      if (truncated) return;
    }
  }
};

bool satisfiable(const ConnectivityMatrix& cm, int n) {
  Solver s(cm, n, 1);
  s.run();
  return !s.found.empty();
}

ConnectivityMatrix submatrix(const ConnectivityMatrix& cm, const std::vector<int>& rows) {
  ConnectivityMatrix out;
  const int k = static_cast<int>(rows.size());
  out.m.resize(k, k);
  for (int i = 0; i < k; ++i) {
    out.ids.push_back(cm.ids[rows[i]]);
    for (int j = 0; j < k; ++j) out.m(i, j) = cm.m(rows[i], rows[j]);
  }
  return out;
}

}  // namespace

LevelDiagram canonical_diagram(const LevelDiagram& ld) {
  const Layout lay(ld.n);
  std::vector<int> manifold(ld.levels());
  for (int l = 0; l < ld.levels(); ++l) manifold[l] = static_cast<int>(std::lround(0.5 * ld.n - ld.level_mz[l]));
  const LevelDiagram plain = relabel_first_appearance(ld.edges, manifold, lay);

  std::vector<int> flipped(manifold.size());
  for (std::size_t l = 0; l < manifold.size(); ++l) flipped[l] = ld.n - manifold[l];
  std::vector<LevelEdge> inv = ld.edges;
  for (auto& e : inv) std::swap(e.lower, e.upper);
  const LevelDiagram inverted = relabel_first_appearance(inv, flipped, lay);
  return key_of(inverted) < key_of(plain) ? inverted : plain;
}

AssignmentResult reconstruct_levels(const ConnectivityMatrix& cm, int n, const AssignmentOptions& opt) {
  cm.validate();
  if (n < 1 || n > kMaxSpins) throw InputError("spin count must be between 1 and " + std::to_string(kMaxSpins));
  if (cm.size() > sq_transition_count(n)) {
    throw InputError(std::to_string(cm.size()) + " transitions exceed the " + std::to_string(sq_transition_count(n)) +
                     " single-quantum transitions of " + std::to_string(n) + " spins");
  }
  Solver solver(cm, n, std::max(1, opt.max_solutions));
  solver.run();

  AssignmentResult res;
  res.truncated = solver.truncated;
  for (auto& [key, ld] : solver.found) res.diagrams.push_back(std::move(ld));
  if (!res.diagrams.empty()) return res;

  res.satisfiable = false;
  const int t = cm.size();
  for (int a = 0; a < t && res.conflict.empty(); ++a) {
    for (int b = a + 1; b < t && res.conflict.empty(); ++b) {
      for (int c = b + 1; c < t && res.conflict.empty(); ++c) {
        if (!satisfiable(submatrix(cm, {a, b, c}), n)) res.conflict = {cm.ids[a], cm.ids[b], cm.ids[c]};
      }
    }
  }
  std::ostringstream msg;
  msg << "no consistent level diagram";
  if (!res.conflict.empty()) {
    msg << "; transitions " << res.conflict[0] << ", " << res.conflict[1] << ", " << res.conflict[2]
        << " cannot be placed together";
  } else {
    msg << "; every triple is consistent on its own";
  }
  res.report = msg.str();
  return res;
}

Verification verify_diagram(const LevelDiagram& ld, const ConnectivityMatrix& cm) {
  Verification v;
  auto fail = [&](int a, int b, int expected, int actual, std::string message) {
    v.ok = false;
    v.discrepancies.push_back({a, b, expected, actual, std::move(message)});
  };
  std::vector<const LevelEdge*> edge(cm.size(), nullptr);
  for (int i = 0; i < cm.size(); ++i) {
    for (const auto& e : ld.edges) {
      if (e.id != cm.ids[i]) continue;
      if (edge[i]) fail(e.id, 0, 0, 0, "transition has more than one edge");
      edge[i] = &e;
    }
    if (!edge[i]) {
      fail(cm.ids[i], 0, 0, 0, "transition has no edge");
      continue;
    }
    const auto& e = *edge[i];
    if (e.lower < 0 || e.upper < 0 || e.lower >= ld.levels() || e.upper >= ld.levels()) {
      fail(e.id, 0, 0, 0, "edge refers to an unknown level");
      edge[i] = nullptr;
    } else if (std::abs(ld.level_mz[e.lower] - ld.level_mz[e.upper] - 1.0) > 1e-9) {
      fail(e.id, 0, 0, 0, "edge does not join adjacent M_z manifolds");
    }
  }
  for (int i = 0; i < cm.size(); ++i) {
    for (int j = i + 1; j < cm.size(); ++j) {
      if (!edge[i] || !edge[j]) continue;
      if (edge[i]->lower == edge[j]->lower && edge[i]->upper == edge[j]->upper) {
        fail(cm.ids[i], cm.ids[j], 0, 0, "two transitions on the same edge");
        continue;
      }
      const int got = connectivity_sign(*edge[i], *edge[j]);
      if (got != cm.m(i, j)) fail(cm.ids[i], cm.ids[j], cm.m(i, j), got, "connectivity differs");
    }
  }
  return v;
}

}  // namespace spinsim
