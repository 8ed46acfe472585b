#pragma once

#include "spinsim/spin_system.hpp"
#include "spinsim/types.hpp"

namespace spinsim {

// Product (Zeeman) basis: index bit (n-1-i) holds spin i, 0 = alpha (m = +1/2).
inline int spin_bit(int index, int n, int spin) { return (index >> (n - 1 - spin)) & 1; }
inline double spin_m(int index, int n, int spin) { return spin_bit(index, n, spin) ? -0.5 : 0.5; }

// Total magnetic quantum number of a product state.
double product_mz(int index, int n);

std::string bits_of(int index, int n);
int index_of_bits(const std::string& bits);

// Single-spin and collective operators in the product basis.
CMatrix spin_z(int n, int spin);
CMatrix spin_plus(int n, int spin);
CMatrix spin_minus(int n, int spin);
CMatrix total_z(int n);
CMatrix total_minus(int n);
CMatrix total_plus(int n);
// F_phi = sum_k (I_kx cos(phi) + I_ky sin(phi)).
CMatrix total_transverse(int n, double phase_rad);

// Rotating-frame Hamiltonian in rad/s. weak=true truncates the scalar term to I_iz I_jz;
// the dipolar term 2*pi*D(3 I_iz I_jz - I_i.I_j) is kept in both modes.
CMatrix build_hamiltonian(const SpinSystem& sys, bool weak = false);

}  // namespace spinsim
