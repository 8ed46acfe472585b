#include "spinsim/hamiltonian.hpp"

namespace spinsim {

double product_mz(int index, int n) {
  double m = 0.0;
  for (int s = 0; s < n; ++s) m += spin_m(index, n, s);
  return m;
}

std::string bits_of(int index, int n) {
  std::string out(n, '0');
  for (int s = 0; s < n; ++s) out[s] = spin_bit(index, n, s) ? '1' : '0';
  return out;
}

int index_of_bits(const std::string& bits) {
  int v = 0;
  for (char c : bits) v = (v << 1) | (c == '1' ? 1 : 0);
  return v;
}

CMatrix spin_z(int n, int spin) {
  const int dim = 1 << n;
  CMatrix m = CMatrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) m(k, k) = spin_m(k, n, spin);
  return m;
}

CMatrix spin_plus(int n, int spin) {
  const int dim = 1 << n;
  const int mask = 1 << (n - 1 - spin);
  CMatrix m = CMatrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) {
    if (k & mask) m(k ^ mask, k) = 1.0;  // beta -> alpha
  }
  return m;
}

CMatrix spin_minus(int n, int spin) { return spin_plus(n, spin).adjoint(); }

CMatrix total_z(int n) {
  const int dim = 1 << n;
  CMatrix m = CMatrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) m(k, k) = product_mz(k, n);
  return m;
}

CMatrix total_plus(int n) {
  CMatrix m = CMatrix::Zero(1 << n, 1 << n);
  for (int s = 0; s < n; ++s) m += spin_plus(n, s);
  return m;
}

CMatrix total_minus(int n) { return total_plus(n).adjoint(); }

CMatrix total_transverse(int n, double phase_rad) {
  // I_x cos + I_y sin = (e^{-i phi} I+ + e^{i phi} I-) / 2
  const cplx e = std::polar(1.0, -phase_rad);
  const CMatrix plus = total_plus(n);
  return 0.5 * (e * plus + std::conj(e) * plus.adjoint());
}

CMatrix build_hamiltonian(const SpinSystem& sys, bool weak) {
  sys.validate();
  const int n = sys.n;
  const int dim = 1 << n;
  CMatrix h = CMatrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) {
    double diag = 0.0;
    for (int i = 0; i < n; ++i) diag += kTwoPi * sys.offset_hz[i] * spin_m(k, n, i);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double zz = spin_m(k, n, i) * spin_m(k, n, j);
        const double jc = kTwoPi * sys.j_hz(i, j);
        const double dc = kTwoPi * sys.d_hz(i, j);
        // I.I contributes zz on the diagonal; 3zz - I.I contributes 2zz.
        diag += jc * zz + 2.0 * dc * zz;
        const int mi = 1 << (n - 1 - i);
        const int mj = 1 << (n - 1 - j);
        if (spin_bit(k, n, i) != spin_bit(k, n, j)) {
          // flip-flop part of I.I is (I+I- + I-I+)/2; dipolar term carries -1 times it.
          const double ff = 0.5 * ((weak ? 0.0 : jc) - dc);
          h(k ^ mi ^ mj, k) += ff;
        }
      }
    }
    h(k, k) += diag;
  }
  return h;
}

}  // namespace spinsim
