#include "spinsim/eigensystem.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "spinsim/hamiltonian.hpp"
#include "spinsim/jacobi.hpp"

namespace spinsim {

int EigenSystem::index_of(const std::string& label) const {
  if (static_cast<int>(label.size()) != n || label.find_first_not_of("01") != std::string::npos) {
    throw InputError("'" + label + "' is not a " + std::to_string(n) + "-bit label");
  }
  return index_of_bits(label);
}

CMatrix EigenSystem::to_eigenbasis(const CMatrix& product_op) const {
  return vectors.adjoint() * product_op * vectors;
}

namespace {

void fix_phase(Eigen::Ref<CVector> v) {
  Eigen::Index best = 0;
  double best_mag = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    // first index wins ties so the choice is reproducible
    if (std::abs(v(i)) > best_mag * (1.0 + 1e-12)) {
      best_mag = std::abs(v(i));
      best = i;
    }
  }
  if (best_mag > 0.0) v *= std::conj(v(best)) / best_mag;
  v(best) = std::abs(v(best));
}

}  // namespace

EigenSystem diagonalize(const CMatrix& h, const SpinSystem& sys) {
  sys.validate();
  const int n = sys.n;
  const int dim = 1 << n;
  if (h.rows() != dim || h.cols() != dim) throw InputError("Hamiltonian dimension does not match spin count");

  const double hnorm = h.norm();
  std::map<double, std::vector<int>, std::greater<>> manifolds;
  for (int k = 0; k < dim; ++k) manifolds[product_mz(k, n)].push_back(k);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) {
      if (product_mz(r, n) != product_mz(c, n) && std::abs(h(r, c)) > 1e-12 * std::max(hnorm, 1.0)) {
        throw InputError("Hamiltonian couples different M_z manifolds");
      }
    }
  }

  // label (product index) -> (energy, vector)
  std::vector<double> energy_by_label(dim, 0.0);
  std::vector<CVector> vector_by_label(dim);
  std::vector<int> product_label(dim, -1);
  int conflicts = 0;

  for (const auto& [m, idx] : manifolds) {
    const int size = static_cast<int>(idx.size());
    CMatrix block(size, size);
    for (int a = 0; a < size; ++a) {
      for (int b = 0; b < size; ++b) block(a, b) = h(idx[a], idx[b]);
    }
    HermitianEigen eig = jacobi_eigen(block);
    for (int a = 0; a < size; ++a) fix_phase(eig.vectors.col(a));

    // greedy assignment by descending overlap |<product|eigen>|^2
    std::vector<std::tuple<double, int, int>> pairs;
    for (int a = 0; a < size; ++a) {
      for (int p = 0; p < size; ++p) pairs.emplace_back(std::norm(eig.vectors(p, a)), a, p);
    }
    std::stable_sort(pairs.begin(), pairs.end(), [](const auto& x, const auto& y) {
      if (std::get<0>(x) != std::get<0>(y)) return std::get<0>(x) > std::get<0>(y);
      if (std::get<1>(x) != std::get<1>(y)) return std::get<1>(x) < std::get<1>(y);
      return std::get<2>(x) < std::get<2>(y);
    });
    std::vector<int> eig_to_prod(size, -1);
    std::vector<bool> prod_taken(size, false);
    for (const auto& [ov, a, p] : pairs) {
      if (eig_to_prod[a] >= 0 || prod_taken[p]) continue;
      eig_to_prod[a] = p;
      prod_taken[p] = true;
    }
    for (int a = 0; a < size; ++a) {
      int best_p = 0;
      for (int p = 1; p < size; ++p) {
        if (std::norm(eig.vectors(p, a)) > std::norm(eig.vectors(best_p, a)) * (1.0 + 1e-9)) best_p = p;
      }
      if (best_p != eig_to_prod[a]) ++conflicts;
      const int label = idx[eig_to_prod[a]];
      CVector full = CVector::Zero(dim);
      for (int p = 0; p < size; ++p) full(idx[p]) = eig.vectors(p, a);
      energy_by_label[label] = eig.values(a);
      vector_by_label[label] = std::move(full);
      product_label[label] = label;
    }
  }

  // relabel transpositions: slot[k] = which overlap-labeled eigenstate now carries label k
  std::vector<int> slot(dim);
  for (int k = 0; k < dim; ++k) slot[k] = k;
  for (const auto& [a, b] : sys.relabel) {
    std::swap(slot[index_of_bits(a)], slot[index_of_bits(b)]);
  }

  EigenSystem es;
  es.n = n;
  es.energies.resize(dim);
  es.vectors.resize(dim, dim);
  es.labels.resize(dim);
  es.mz.resize(dim);
  es.product_label.resize(dim);
  for (int k = 0; k < dim; ++k) {
    const int src = slot[k];
    es.energies(k) = energy_by_label[src];
    es.vectors.col(k) = vector_by_label[src];
    es.labels[k] = bits_of(k, n);
    es.mz[k] = product_mz(src, n);
    es.product_label[k] = product_label[src];
  }
  es.label_conflicts = conflicts;
  es.hamiltonian_norm = hnorm;
  return es;
}

EigenSystem solve(const SpinSystem& sys, bool weak) { return diagonalize(build_hamiltonian(sys, weak), sys); }

double mixing_angle_ab(const SpinSystem& sys) {
  sys.validate();
  if (sys.n != 2) throw InputError("mixing angle is defined for two spins only");
  // the flip-flop coefficient is 2*pi*(J - D)/2 in the full Hamiltonian
  const double coupling = kTwoPi * (sys.j_hz(0, 1) - sys.d_hz(0, 1));
  const double delta = kTwoPi * (sys.offset_hz[0] - sys.offset_hz[1]);
  double theta = 0.5 * rad_to_deg(std::atan2(coupling, delta));
  if (theta > 45.0) theta -= 90.0;
  if (theta <= -45.0) theta += 90.0;
  return theta;
}

}  // namespace spinsim
