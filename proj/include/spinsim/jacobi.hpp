#pragma once

#include "spinsim/types.hpp"

namespace spinsim {

struct HermitianEigen {
  RVector values;   // ascending
  CMatrix vectors;  // columns, orthonormal
  int sweeps = 0;
};

// Cyclic Jacobi diagonalization of a dense Hermitian matrix. Accurate to a few ulps of
// the matrix norm; intended for the small blocks produced by M_z factorization.
HermitianEigen jacobi_eigen(const CMatrix& a, int max_sweeps = 100);

}  // namespace spinsim
