#include "spinsim/transitions.hpp"

#include <algorithm>
#include <cmath>

#include "spinsim/hamiltonian.hpp"

namespace spinsim {

const Transition& TransitionCatalog::by_id(int id) const {
  if (id < 1 || id > static_cast<int>(entries.size())) {
    throw InputError("unknown transition t" + std::to_string(id));
  }
  return entries[id - 1];
}

std::optional<int> TransitionCatalog::find(int a, int b) const {
  for (const auto& t : entries) {
    if ((t.lower == a && t.upper == b) || (t.lower == b && t.upper == a)) return t.id;
  }
  return std::nullopt;
}

int TransitionCatalog::observable_count() const {
  return static_cast<int>(std::count_if(entries.begin(), entries.end(), [](const auto& t) { return t.observable; }));
}

double TransitionCatalog::max_intensity() const {
  double m = 0.0;
  for (const auto& t : entries) m = std::max(m, t.intensity);
  return m;
}

long sq_transition_count(int n) {
  if (n < 1 || n > kMaxSpins) throw InputError("spin count out of range");
  const int top = 2 * n;
  const int k = n - 1;
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (top - k + i) / i;
  return r;
}

TransitionCatalog transition_catalog(const EigenSystem& es, double threshold,
                                     std::span<const PinnedTransition> pinned) {
  if (!(threshold >= 0.0 && threshold < 1.0)) throw InputError("threshold must lie in [0, 1)");
  const int dim = es.dim();
  const CMatrix fm = es.to_eigenbasis(total_minus(es.n));

  std::vector<Transition> all;
  for (int l = 0; l < dim; ++l) {
    for (int u = 0; u < dim; ++u) {
      if (std::abs(es.mz[l] - es.mz[u] - 1.0) > 1e-9) continue;
      Transition t;
      t.lower = l;
      t.upper = u;
      t.freq_hz = (es.energies(l) - es.energies(u)) / kTwoPi;
      t.intensity = std::norm(fm(u, l));
      all.push_back(t);
    }
  }
  double imax = 0.0;
  for (const auto& t : all) imax = std::max(imax, t.intensity);
  for (auto& t : all) t.observable = imax > 0.0 && t.intensity >= threshold * imax;

  std::stable_sort(all.begin(), all.end(), [](const Transition& x, const Transition& y) {
    if (x.intensity != y.intensity) return x.intensity > y.intensity;
    return x.freq_hz < y.freq_hz;
  });
  // equal-within-rounding intensities are ordered by frequency
  const double tol = 1e-9 * std::max(imax, 1e-300);
  for (std::size_t begin = 0; begin < all.size();) {
    std::size_t end = begin + 1;
    while (end < all.size() && all[end - 1].intensity - all[end].intensity <= tol) ++end;
    std::stable_sort(all.begin() + begin, all.begin() + end,
                     [](const Transition& x, const Transition& y) { return x.freq_hz < y.freq_hz; });
    begin = end;
  }

  const int total = static_cast<int>(all.size());
  std::vector<int> id_of(total, 0);
  std::vector<bool> id_used(total + 1, false);
  for (const auto& pin : pinned) {
    if (pin.id > total) throw InputError("pinned transition id " + std::to_string(pin.id) + " exceeds catalog size");
    const int a = es.index_of(pin.a);
    const int b = es.index_of(pin.b);
    auto it = std::find_if(all.begin(), all.end(), [&](const Transition& t) {
      return (t.lower == a && t.upper == b) || (t.lower == b && t.upper == a);
    });
    if (it == all.end()) {
      throw InputError("pinned transition " + pin.a + "<->" + pin.b + " is not single quantum");
    }
    auto& slot = id_of[it - all.begin()];
    if (slot != 0 || id_used[pin.id]) throw InputError("conflicting pinned transition " + std::to_string(pin.id));
    slot = pin.id;
    id_used[pin.id] = true;
  }
  int next = 1;
  for (int k = 0; k < total; ++k) {
    if (id_of[k] != 0) continue;
    while (id_used[next]) ++next;
    id_of[k] = next;
    id_used[next] = true;
  }

  TransitionCatalog cat;
  cat.threshold = threshold;
  cat.entries.resize(total);
  for (int k = 0; k < total; ++k) {
    all[k].id = id_of[k];
    cat.entries[id_of[k] - 1] = all[k];
  }
  return cat;
}

TransitionCatalog transition_catalog(const EigenSystem& es, const SpinSystem& sys, double threshold) {
  return transition_catalog(es, threshold, sys.pinned);
}

EigenSystem swap_labels(const EigenSystem& es, const std::string& a, const std::string& b) {
  const int ia = es.index_of(a);
  const int ib = es.index_of(b);
  if (std::abs(es.mz[ia] - es.mz[ib]) > 1e-9) throw InputError("cannot swap labels across M_z manifolds");
  EigenSystem out = es;
  std::swap(out.energies(ia), out.energies(ib));
  out.vectors.col(ia).swap(out.vectors.col(ib));
  std::swap(out.product_label[ia], out.product_label[ib]);
  return out;
}

TransitionCatalog swap_labels(const TransitionCatalog& cat, const EigenSystem& es, const std::string& a,
                              const std::string& b) {
  const int ia = es.index_of(a);
  const int ib = es.index_of(b);
  if (std::abs(es.mz[ia] - es.mz[ib]) > 1e-9) throw InputError("cannot swap labels across M_z manifolds");
  TransitionCatalog out = cat;
  auto remap = [&](int k) { return k == ia ? ib : (k == ib ? ia : k); };
  for (auto& t : out.entries) {
    t.lower = remap(t.lower);
    t.upper = remap(t.upper);
  }
  return out;
}

}  // namespace spinsim
