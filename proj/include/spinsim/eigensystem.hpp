#pragma once

#include <string>
#include <vector>

#include "spinsim/spin_system.hpp"
#include "spinsim/types.hpp"

namespace spinsim {

// Eigenstates of a spin Hamiltonian, indexed by qubit label: eigenstate k carries the
// n-bit label whose binary value is k. Columns of `vectors` are in the product basis.
struct EigenSystem {
  int n = 0;
  RVector energies;                 // rad/s
  CMatrix vectors;                  // unitary
  std::vector<std::string> labels;  // labels[k] == bits_of(k, n)
  std::vector<double> mz;           // physical M_z manifold of each eigenstate
  std::vector<int> product_label;   // best-overlap product state before relabeling
  int label_conflicts = 0;          // eigenstates that lost their best product label
  double hamiltonian_norm = 0.0;    // Frobenius norm of H

  int dim() const { return static_cast<int>(energies.size()); }
  double energy_hz(int k) const { return energies(k) / kTwoPi; }
  int index_of(const std::string& label) const;

  // Product-basis operator expressed in the eigenbasis (V^dagger A V).
  CMatrix to_eigenbasis(const CMatrix& product_op) const;
};

// Per-M_z-block Jacobi diagonalization with phase fixing and overlap labeling. The
// relabel transpositions of `sys` are applied last.
EigenSystem diagonalize(const CMatrix& h, const SpinSystem& sys);

// Convenience: build the full Hamiltonian and diagonalize it.
EigenSystem solve(const SpinSystem& sys, bool weak = false);

// Two-spin mixing angle in degrees, folded into (-45, 45].
double mixing_angle_ab(const SpinSystem& sys);

}  // namespace spinsim
