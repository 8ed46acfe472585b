#pragma once
// Reference constructions used only by tests. They deliberately avoid the library's
// bit-twiddling operator builders and work from Kronecker products of Pauli matrices.

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "spinsim/spin_system.hpp"

namespace oracle {

using spinsim::CMatrix;
using spinsim::cplx;

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline CMatrix pauli(char which) {
  CMatrix m(2, 2);
  switch (which) {
    case 'x': m << 0, 0.5, 0.5, 0; break;
    case 'y': m << 0, cplx(0, -0.5), cplx(0, 0.5), 0; break;
    case 'z': m << 0.5, 0, 0, -0.5; break;
    default: m = CMatrix::Identity(2, 2);
  }
  return m;
}

// Spin operator I_{spin, which} for n spins; spin 0 is the leftmost factor.
inline CMatrix spin_op(int n, int spin, char which) {
  CMatrix out = CMatrix::Identity(1, 1);
  for (int k = 0; k < n; ++k) out = kron(out, k == spin ? pauli(which) : CMatrix::Identity(2, 2));
  return out;
}

inline CMatrix hamiltonian(const spinsim::SpinSystem& sys, bool weak) {
  const double two_pi = 2.0 * 3.14159265358979323846;
  const int n = sys.n;
  const int dim = 1 << n;
  CMatrix h = CMatrix::Zero(dim, dim);
  for (int i = 0; i < n; ++i) h += two_pi * sys.offset_hz[i] * spin_op(n, i, 'z');
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const CMatrix zz = spin_op(n, i, 'z') * spin_op(n, j, 'z');
      const CMatrix dot = spin_op(n, i, 'x') * spin_op(n, j, 'x') + spin_op(n, i, 'y') * spin_op(n, j, 'y') + zz;
      h += two_pi * sys.j_hz(i, j) * (weak ? zz : dot);
      h += two_pi * sys.d_hz(i, j) * (3.0 * zz - dot);
    }
  }
  return h;
}

inline CMatrix f_minus(int n) {
  CMatrix out = CMatrix::Zero(1 << n, 1 << n);
  for (int k = 0; k < n; ++k) out += spin_op(n, k, 'x') - cplx(0, 1) * spin_op(n, k, 'y');
  return out;
}

inline CMatrix f_z(int n) {
  CMatrix out = CMatrix::Zero(1 << n, 1 << n);
  for (int k = 0; k < n; ++k) out += spin_op(n, k, 'z');
  return out;
}

// Dense exponential of a Hermitian generator: exp(-i theta G).
inline CMatrix expm_hermitian(const CMatrix& g, double theta) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(g);
  CMatrix d = CMatrix::Zero(g.rows(), g.cols());
  for (Eigen::Index k = 0; k < g.rows(); ++k) d(k, k) = std::polar(1.0, -theta * es.eigenvalues()(k));
  return es.eigenvectors() * d * es.eigenvectors().adjoint();
}

inline spinsim::SpinSystem random_system(std::mt19937_64& rng, int n, double offset_span, double j_span,
                                         double d_span) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> offs(n);
  for (auto& v : offs) v = offset_span * u(rng);
  auto sys = spinsim::SpinSystem::make("random", offs);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      sys.set_j(i, j, j_span * u(rng));
      sys.set_d(i, j, d_span * u(rng));
    }
  }
  return sys;
}

inline spinsim::SpinSystem citrate() {
  auto sys = spinsim::SpinSystem::make("citrate", {27.75, -27.75});
  sys.set_j(0, 1, 15.0);
  return sys;
}

}  // namespace oracle
