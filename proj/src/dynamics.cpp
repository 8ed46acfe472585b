#include "spinsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spinsim/hamiltonian.hpp"
#include "spinsim/jacobi.hpp"
#include "text_util.hpp"

namespace spinsim {

DensityMatrix DensityMatrix::diagonal(const std::vector<double>& populations) {
  const int dim = static_cast<int>(populations.size());
  CMatrix m = CMatrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) m(k, k) = populations[k];
  return DensityMatrix(std::move(m));
}

std::vector<double> DensityMatrix::populations() const {
  std::vector<double> p(dim());
  for (int k = 0; k < dim(); ++k) p[k] = mat(k, k).real();
  return p;
}

DensityMatrix equilibrium_deviation(const EigenSystem& es, double spectrometer_hz) {
  const int dim = es.dim();
  std::vector<double> p(dim);
  for (int k = 0; k < dim; ++k) {
    p[k] = es.mz[k];
    if (spectrometer_hz > 0.0) p[k] -= es.energies(k) / (kTwoPi * spectrometer_hz);
  }
  if (spectrometer_hz > 0.0) {
    double mean = 0.0;
    for (double v : p) mean += v;
    mean /= dim;
    const auto [lo, hi] = std::minmax_element(p.begin(), p.end());
    const double span = *hi - *lo;
    for (double& v : p) v = (v - mean) * (span > 0.0 ? es.n / span : 0.0);
  }
  return DensityMatrix::diagonal(p);
}

CMatrix selective_pulse_unitary(const EigenSystem& es, int r, int s, double theta_deg, double phase_deg) {
  const int dim = es.dim();
  if (r < 0 || s < 0 || r >= dim || s >= dim) throw InputError("selective pulse: eigenstate index out of range");
  if (std::abs(std::abs(es.mz[r] - es.mz[s]) - 1.0) > 1e-9) {
    throw InputError("selective pulse: " + es.labels[r] + "<->" + es.labels[s] + " is not a single-quantum transition");
  }
  if (es.mz[r] < es.mz[s]) std::swap(r, s);
  const double half = 0.5 * deg_to_rad(theta_deg);
  const double phi = deg_to_rad(phase_deg);
  CMatrix u = CMatrix::Identity(dim, dim);
  const cplx minus_i(0.0, -1.0);
  u(r, r) = std::cos(half);
  u(s, s) = std::cos(half);
  u(r, s) = minus_i * std::polar(1.0, -phi) * std::sin(half);
  u(s, r) = minus_i * std::polar(1.0, phi) * std::sin(half);
  return u;
}

CMatrix hard_pulse_unitary(const EigenSystem& es, double theta_deg, double phase_deg) {
  const double half = 0.5 * deg_to_rad(theta_deg);
  const double phi = deg_to_rad(phase_deg);
  const cplx minus_i(0.0, -1.0);
  // single-spin exp(-i theta I_phi), basis (alpha, beta)
  Eigen::Matrix2cd single;
  single << std::cos(half), minus_i * std::polar(1.0, -phi) * std::sin(half),
      minus_i * std::polar(1.0, phi) * std::sin(half), std::cos(half);
  // the spin operators commute, so the product-basis propagator factorizes
  const int dim = es.dim();
  CMatrix u(dim, dim);
  for (int row = 0; row < dim; ++row) {
    for (int col = 0; col < dim; ++col) {
      cplx v = 1.0;
      for (int spin = 0; spin < es.n; ++spin) {
        v *= single(spin_bit(row, es.n, spin), spin_bit(col, es.n, spin));
      }
      u(row, col) = v;
    }
  }
  return es.to_eigenbasis(u);
}

DensityMatrix conjugate(const CMatrix& u, const DensityMatrix& rho) {
  return DensityMatrix(u * rho.mat * u.adjoint());
}

DensityMatrix crush_gradient(const DensityMatrix& rho) {
  CMatrix out = CMatrix::Zero(rho.dim(), rho.dim());
  out.diagonal() = rho.mat.diagonal();
  return DensityMatrix(std::move(out));
}

DensityMatrix free_evolution(const EigenSystem& es, const DensityMatrix& rho, double t_seconds) {
  if (t_seconds < 0.0) throw InputError("free evolution time must be non-negative");
  DensityMatrix out = rho;
  for (int k = 0; k < rho.dim(); ++k) {
    for (int l = 0; l < rho.dim(); ++l) {
      if (k == l) continue;
      out.mat(k, l) *= std::polar(1.0, -(es.energies(k) - es.energies(l)) * t_seconds);
    }
  }
  return out;
}

std::pair<double, double> selective_population_update(double p_i, double p_j, double theta_deg) {
  const double c2 = std::pow(std::cos(0.5 * deg_to_rad(theta_deg)), 2);
  const double s2 = std::pow(std::sin(0.5 * deg_to_rad(theta_deg)), 2);
  return {p_i * c2 + p_j * s2, p_j * c2 + p_i * s2};
}

double fidelity(const CMatrix& a, const CMatrix& b) {
  const double na = (a.adjoint() * a).trace().real();
  const double nb = (b.adjoint() * b).trace().real();
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  return (a.adjoint() * b).trace().real() / std::sqrt(na * nb);
}

CMatrix pure_part(const DensityMatrix& rho) {
  const HermitianEigen eig = jacobi_eigen(rho.mat);
  CMatrix shifted = rho.mat - eig.values(0) * CMatrix::Identity(rho.dim(), rho.dim());
  const double tr = shifted.trace().real();
  if (tr <= 0.0) return CMatrix::Zero(rho.dim(), rho.dim());
  return shifted / tr;
}

double pseudopure_fidelity(const DensityMatrix& rho, int target) {
  return pure_part(rho)(target, target).real();
}

CMatrix pairwise_sum(const std::vector<CMatrix>& terms) {
  if (terms.empty()) throw Error("pairwise_sum of nothing");
  std::vector<CMatrix> level = terms;
  while (level.size() > 1) {
    std::vector<CMatrix> next;
    next.reserve((level.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) next.push_back(level[i] + level[i + 1]);
    if (level.size() % 2) next.push_back(level.back());
    level = std::move(next);
  }
  return level.front();
}

std::string format_density(const DensityMatrix& rho) {
  std::ostringstream os;
  os << "dim " << rho.dim() << "\n";
  for (int k = 0; k < rho.dim(); ++k) {
    for (int l = 0; l < rho.dim(); ++l) {
      const cplx v = rho.mat(k, l);
      if (std::abs(v) < 1e-14) continue;
      os << k + 1 << ' ' << l + 1 << ' ' << fmt_real(v.real()) << ' ' << fmt_real(v.imag()) << "\n";
    }
  }
  return os.str();
}

DensityMatrix parse_density(std::string_view text, const std::string& source) {
  int dim = 0;
  CMatrix m;
  int line_no = 0;
  for (const auto& raw : detail::split_lines(text)) {
    ++line_no;
    const auto toks = detail::tokenize(raw);
    if (toks.empty()) continue;
    if (toks[0].text == "dim") {
      if (toks.size() != 2) throw ParseError(source, line_no, toks[0].col, "'dim' expects one value");
      dim = detail::to_int(toks[1], source, line_no);
      if (dim < 1) throw ParseError(source, line_no, toks[1].col, "dimension must be positive");
      m = CMatrix::Zero(dim, dim);
      continue;
    }
    if (dim == 0) throw ParseError(source, line_no, toks[0].col, "entry before 'dim' header");
    if (toks.size() != 4) throw ParseError(source, line_no, toks[0].col, "expected 'k l re im'");
    const int k = detail::to_int(toks[0], source, line_no);
    const int l = detail::to_int(toks[1], source, line_no);
    if (k < 1 || k > dim) throw ParseError(source, line_no, toks[0].col, "row index out of range");
    if (l < 1 || l > dim) throw ParseError(source, line_no, toks[1].col, "column index out of range");
    m(k - 1, l - 1) = cplx(detail::to_real(toks[2], source, line_no), detail::to_real(toks[3], source, line_no));
  }
  if (dim == 0) throw ParseError(source, 1, 1, "missing 'dim' header");
  return DensityMatrix(std::move(m));
}

}  // namespace spinsim
