#include "spinsim/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "spinsim/hamiltonian.hpp"

namespace spinsim {

namespace {

CMatrix fplus_eigen(const EigenSystem& es) { return es.to_eigenbasis(total_plus(es.n)); }

std::vector<cplx> line_amplitudes_with(const CMatrix& fplus, const TransitionCatalog& cat, const CMatrix& rho) {
  std::vector<cplx> out;
  out.reserve(cat.entries.size());
  for (const auto& t : cat.entries) out.push_back(rho(t.upper, t.lower) * fplus(t.lower, t.upper));
  return out;
}

std::vector<cplx> fid_from_lines(const TransitionCatalog& cat, const std::vector<cplx>& amps, int points,
                                 double dwell) {
  std::vector<cplx> fid(points, cplx(0.0));
  for (std::size_t k = 0; k < amps.size(); ++k) {
    if (amps[k] == cplx(0.0)) continue;
    const double w = kTwoPi * cat.entries[k].freq_hz * dwell;
    for (int m = 0; m < points; ++m) fid[m] += amps[k] * std::polar(1.0, w * m);
  }
  return fid;
}

double norm2(const std::vector<cplx>& v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

void fftshift(std::vector<cplx>& v) { std::rotate(v.begin(), v.begin() + static_cast<long>(v.size() / 2), v.end()); }

std::vector<double> centered_axis(int points, double dwell) {
  std::vector<double> f(points);
  for (int k = 0; k < points; ++k) f[k] = (k - points / 2) / (points * dwell);
  return f;
}

double max_coherence_hz(const EigenSystem& es) {
  return (es.energies.maxCoeff() - es.energies.minCoeff()) / kTwoPi;
}

// Populations after each t1 increment of: free evolution, `u`, crusher.
RMatrix population_series(const EigenSystem& es, const DensityMatrix& rho, const CMatrix& u, int t1_points,
                          double dwell1) {
  RMatrix q(t1_points, es.dim());
  for (int j = 0; j < t1_points; ++j) {
    const auto p = crush_gradient(conjugate(u, free_evolution(es, rho, j * dwell1))).populations();
    for (int i = 0; i < es.dim(); ++i) q(j, i) = p[i];
  }
  return q;
}

// FID of every pure population |i><i| after the readout unitary: t2 x dim.
CMatrix readout_basis(const EigenSystem& es, const TransitionCatalog& cat, const CMatrix& readout, int t2_points,
                      double dwell2) {
  const CMatrix fplus = fplus_eigen(es);
  CMatrix h(t2_points, es.dim());
  for (int i = 0; i < es.dim(); ++i) {
    const CMatrix rho = readout.col(i) * readout.col(i).adjoint();
    const auto fid = fid_from_lines(cat, line_amplitudes_with(fplus, cat, rho), t2_points, dwell2);
    for (int m = 0; m < t2_points; ++m) h(m, i) = fid[m];
  }
  return h;
}

// Least-squares inverse of the readout map for real, trace-free population vectors.
RMatrix readout_inverse(const CMatrix& h) {
  const int t2 = static_cast<int>(h.rows());
  const int dim = static_cast<int>(h.cols());
  RMatrix a(2 * t2 + 1, dim);
  a.topRows(t2) = h.real();
  a.middleRows(t2, t2) = h.imag();
  a.row(2 * t2).setConstant(std::max(1.0, h.cwiseAbs().maxCoeff()));
  Eigen::CompleteOrthogonalDecomposition<RMatrix> cod(a);
  cod.setThreshold(1e-12);
  return cod.pseudoInverse();
}

RMatrix recover_populations(const Dataset2D& ds, const RMatrix& pinv) {
  const int t2 = ds.t2_points;
  RMatrix q(ds.t1_points, pinv.rows());
  Eigen::VectorXd b(2 * t2 + 1);
  for (int j = 0; j < ds.t1_points; ++j) {
    b.head(t2) = ds.data.row(j).real().transpose();
    b.segment(t2, t2) = ds.data.row(j).imag().transpose();
    b(2 * t2) = 0.0;
    q.row(j) = (pinv * b).transpose();
  }
  return q;
}


// One t1 series of populations with its per-coherence phase factor: the series sees
// X_ic exp(i shift p_c) for coherence c of order p_c.
struct Series {
  RMatrix q;
  double shift = 0.0;
};

// Fits q_i(t) = d_i + sum_c 2 Re(X_ic exp(i shift p_c) exp(-i w_c t)) jointly over all
// series, one least-squares problem per level.
CMatrix fit_pair_coefficients(const std::vector<Series>& series, double dwell1, const std::vector<double>& omega,
                              const std::vector<int>& order) {
  const int t1 = static_cast<int>(series.front().q.rows());
  const int dim = static_cast<int>(series.front().q.cols());
  const int nc = static_cast<int>(omega.size());
  const int ns = static_cast<int>(series.size());
  RMatrix a(ns * t1, 1 + 2 * nc);
  for (int s = 0; s < ns; ++s) {
    for (int j = 0; j < t1; ++j) {
      const int row = s * t1 + j;
      a(row, 0) = 1.0;
      for (int c = 0; c < nc; ++c) {
        const cplx g = std::polar(1.0, series[s].shift * order[c] - omega[c] * j * dwell1);
        a(row, 1 + 2 * c) = 2.0 * g.real();
        a(row, 2 + 2 * c) = -2.0 * g.imag();
      }
    }
  }
  Eigen::CompleteOrthogonalDecomposition<RMatrix> cod(a);
  CMatrix out(dim, nc);
  Eigen::VectorXd b(ns * t1);
  for (int i = 0; i < dim; ++i) {
    for (int s = 0; s < ns; ++s) b.segment(s * t1, t1) = series[s].q.col(i);
    const Eigen::VectorXd sol = cod.solve(b);
    for (int c = 0; c < nc; ++c) out(i, c) = cplx(sol(1 + 2 * c), sol(2 + 2 * c));
  }
  return out;
}

}  // namespace

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void fft_inplace(std::vector<cplx>& a, bool inverse) {
  const std::size_t n = a.size();
  if (!is_power_of_two(static_cast<int>(n))) throw InputError("FFT length must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 1.0 : -1.0) * kTwoPi / static_cast<double>(len);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const cplx w = std::polar(1.0, ang * static_cast<double>(k));
        const cplx u = a[i + k];
        const cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
  if (inverse) {
    for (auto& x : a) x /= static_cast<double>(n);
  }
}

std::vector<cplx> line_amplitudes(const EigenSystem& es, const TransitionCatalog& cat, const DensityMatrix& rho) {
  return line_amplitudes_with(fplus_eigen(es), cat, rho.mat);
}

StickSpectrum detect_small_angle(const EigenSystem& es, const TransitionCatalog& cat, const DensityMatrix& rho,
                                 double beta_deg) {
  StickSpectrum sp;
  const CMatrix off = rho.mat - CMatrix(rho.mat.diagonal().asDiagonal());
  sp.coherent_input = off.cwiseAbs().maxCoeff() > 1e-12;
  const double s = std::sin(deg_to_rad(beta_deg));
  (void)es;
  for (const auto& t : cat.entries) {
    const double amp = s * (rho.mat(t.lower, t.lower).real() - rho.mat(t.upper, t.upper).real()) * t.intensity;
    if (std::abs(amp) > 1e-12) sp.lines.push_back({t.freq_hz, amp, t.id});
  }
  return sp;
}

std::vector<cplx> acquire_fid(const EigenSystem& es, const TransitionCatalog& cat, const DensityMatrix& rho, int points,
                              double dwell) {
  if (!is_power_of_two(points)) throw InputError("acquisition points must be a power of two");
  if (!(dwell > 0)) throw InputError("dwell must be positive");
  return fid_from_lines(cat, line_amplitudes(es, cat, rho), points, dwell);
}

Spectrum1D fft_spectrum(const std::vector<cplx>& fid, double dwell) {
  Spectrum1D sp;
  sp.values = fid;
  fft_inplace(sp.values);
  fftshift(sp.values);
  sp.freq_hz = centered_axis(static_cast<int>(fid.size()), dwell);
  return sp;
}

RMatrix magnitude_spectrum(const Dataset2D& ds) {
  CMatrix s = ds.data;
  std::vector<cplx> buf;
  for (int j = 0; j < ds.t1_points; ++j) {
    buf.assign(s.row(j).begin(), s.row(j).end());
    fft_inplace(buf);
    fftshift(buf);
    for (int m = 0; m < ds.t2_points; ++m) s(j, m) = buf[m];
  }
  for (int m = 0; m < ds.t2_points; ++m) {
    buf.assign(s.col(m).begin(), s.col(m).end());
    fft_inplace(buf);
    fftshift(buf);
    for (int j = 0; j < ds.t1_points; ++j) s(j, m) = buf[j];
  }
  return s.cwiseAbs();
}

std::vector<OmegaPeak> pick_omega1_peaks(const Dataset2D& ds, double threshold) {
  const RMatrix mag = magnitude_spectrum(ds);
  const Eigen::VectorXd proj = mag.rowwise().sum();
  const double top = proj.maxCoeff();
  std::vector<OmegaPeak> peaks;
  if (!(top > 0)) return peaks;
  const int n = static_cast<int>(proj.size());
  const auto axis = centered_axis(n, ds.dwell1);
  for (int k = 0; k < n; ++k) {
    const double left = k > 0 ? proj(k - 1) : -1.0;
    const double right = k + 1 < n ? proj(k + 1) : -1.0;
    if (proj(k) < threshold * top || proj(k) <= left || proj(k) < right) continue;
    double w = 0.0, f = 0.0;
    for (int d = -1; d <= 1; ++d) {
      if (k + d < 0 || k + d >= n) continue;
      w += proj(k + d);
      f += proj(k + d) * axis[k + d];
    }
    peaks.push_back({f / w, proj(k)});
  }
  return peaks;
}

DiagonalEstimate tomo_diagonal(const EigenSystem& es, const TransitionCatalog& cat, const DensityMatrix& rho,
                               double beta_deg) {
  const DensityMatrix crushed = crush_gradient(rho);
  const auto sticks = detect_small_angle(es, cat, crushed, beta_deg);
  const double s = std::sin(deg_to_rad(beta_deg));
  std::vector<const Transition*> rows;
  for (const auto& t : cat.entries) {
    if (t.observable) rows.push_back(&t);
  }
  const int dim = es.dim();
  RMatrix a = RMatrix::Zero(static_cast<long>(rows.size()) + 1, dim);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(a.rows());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    a(r, rows[r]->lower) = s * rows[r]->intensity;
    a(r, rows[r]->upper) = -s * rows[r]->intensity;
    for (const auto& line : sticks.lines) {
      if (line.transition_id == rows[r]->id) b(r) = line.amplitude;
    }
  }
  a.row(rows.size()).setConstant(a.cwiseAbs().maxCoeff() > 0 ? a.cwiseAbs().maxCoeff() : 1.0);
  Eigen::CompleteOrthogonalDecomposition<RMatrix> cod(a);
  cod.setThreshold(1e-10);
  DiagonalEstimate est;
  est.rank = static_cast<int>(cod.rank());
  est.underdetermined = est.rank < dim;
  const Eigen::VectorXd p = cod.solve(b);
  est.populations.assign(p.data(), p.data() + dim);
  return est;
}

double default_dwell(const EigenSystem& es) {
  const double emax = es.energies.cwiseAbs().maxCoeff() / kTwoPi;
  return emax > 0 ? 1.0 / (5.0 * emax) : 1e-3;
}

OffDiagonalResult tomo_offdiagonal_2d(const EigenSystem& es, const TransitionCatalog& cat, const DensityMatrix& rho,
                                      const TomoOptions& opt) {
  if (!is_power_of_two(opt.t1_points) || !is_power_of_two(opt.t2_points)) {
    throw InputError("t1 and t2 points must be powers of two");
  }
  const double dw1 = opt.dwell1 > 0 ? opt.dwell1 : default_dwell(es);
  const double dw2 = opt.dwell2 > 0 ? opt.dwell2 : default_dwell(es);
  const double fmax = max_coherence_hz(es);
  if (fmax >= 0.5 / dw1) {
    throw InputError("spectral folding: dwell1 must be below " + fmt_real(0.5 / fmax) + " s");
  }
  OffDiagonalResult res;
  Dataset2D& ds = res.dataset;
  ds.t1_points = opt.t1_points;
  ds.t2_points = opt.t2_points;
  ds.dwell1 = dw1;
  ds.dwell2 = dw2;

  const CMatrix u90 = hard_pulse_unitary(es, 90, 90);
  const CMatrix u45 = hard_pulse_unitary(es, 45, 270);
  const CMatrix h = readout_basis(es, cat, u45, opt.t2_points, dw2);
  ds.data = population_series(es, rho, u90, opt.t1_points, dw1).cast<cplx>() * h.transpose();
  const int steps = 2 * es.n + 1;
  for (int m = 1; m < steps; ++m) {
    const double phase = 90.0 - 360.0 * m / steps;
    Dataset2D extra = ds;
    extra.data = population_series(es, rho, hard_pulse_unitary(es, 90, phase), opt.t1_points, dw1).cast<cplx>() *
                 h.transpose();
    res.phase_series.push_back(std::move(extra));
    res.read_phase_deg.push_back(phase);
  }

  res.peaks = pick_omega1_peaks(ds, opt.peak_threshold);

  // candidate coherences: |f_kl| within 1.5 omega1 bins of a peak or of the axial position
  const double bin = 1.0 / (opt.t1_points * dw1);
  std::vector<std::pair<int, int>> cand;
  std::vector<double> omega;
  std::vector<int> order;
  for (int k = 0; k < es.dim(); ++k) {
    for (int l = k + 1; l < es.dim(); ++l) {
      const double f = (es.energies(k) - es.energies(l)) / kTwoPi;
      const int p = static_cast<int>(std::lround(es.mz[k] - es.mz[l]));
      // a static zero-quantum term cannot be told apart from the populations
      if (p == 0 && std::abs(f) < 0.5 * bin) continue;
      bool near = std::abs(f) <= 1.5 * bin;
      for (const auto& pk : res.peaks) near = near || std::abs(std::abs(f) - std::abs(pk.freq_hz)) <= 1.5 * bin;
      if (!near) continue;
      cand.emplace_back(k, l);
      omega.push_back(es.energies(k) - es.energies(l));
      order.push_back(p);
    }
  }
  if (cand.empty()) return res;

  const RMatrix pinv = readout_inverse(h);
  // a read pulse turned by s about z multiplies an order-p coherence by exp(i s p)
  std::vector<Series> series{{recover_populations(ds, pinv), 0.0}};
  for (std::size_t m = 0; m < res.phase_series.size(); ++m) {
    series.push_back({recover_populations(res.phase_series[m], pinv), deg_to_rad(res.read_phase_deg[m] - 90.0)});
  }
  const CMatrix x = fit_pair_coefficients(series, dw1, omega, order);
  // X_ic = W_ic rho_kl with W_ic = U_ik conj(U_il)
  for (std::size_t c = 0; c < cand.size(); ++c) {
    const auto [k, l] = cand[c];
    cplx num(0.0);
    double den = 0.0;
    for (int i = 0; i < es.dim(); ++i) {
      const cplx w = u90(i, k) * std::conj(u90(i, l));
      num += std::conj(w) * x(i, static_cast<long>(c));
      den += std::norm(w);
    }
    Coherence coh;
    coh.k = k;
    coh.l = l;
    coh.order = order[c];
    coh.freq_hz = omega[c] / kTwoPi;
    coh.value = den > 1e-14 ? num / den : cplx(0.0);
    res.coherences.push_back(coh);
  }
  return res;
}

ScaleCalibration tomo_scale_calibration(const EigenSystem& es, const TransitionCatalog& cat, const DensityMatrix& rho,
                                        const std::vector<double>& diag, const std::vector<Coherence>& coherences) {
  const CMatrix fplus = fplus_eigen(es);
  const CMatrix ux = hard_pulse_unitary(es, 45, 0);
  const CMatrix uy = hard_pulse_unitary(es, 45, 90);
  auto lines = [&](const CMatrix& u, const CMatrix& m) { return line_amplitudes_with(fplus, cat, u * m * u.adjoint()); };
  ScaleCalibration cal;
  cal.sum_lines = lines(ux, rho.mat);
  cal.difference_lines = lines(uy, rho.mat);
  const double s = norm2(cal.sum_lines);
  const double d = norm2(cal.difference_lines);
  cal.ratio = s > 0 ? d / s : (d > 0 ? INFINITY : 0.0);

  if (static_cast<int>(diag.size()) == es.dim()) {
    CMatrix dmat = CMatrix::Zero(es.dim(), es.dim());
    for (int k = 0; k < es.dim(); ++k) dmat(k, k) = diag[k];
    CMatrix cmat = CMatrix::Zero(es.dim(), es.dim());
    for (const auto& c : coherences) {
      cmat(c.k, c.l) = c.value;
      cmat(c.l, c.k) = std::conj(c.value);
    }
    double num = 0.0, den = 0.0;
    for (const CMatrix* u : {&ux, &uy}) {
      const auto meas = lines(*u, rho.mat);
      const auto base = lines(*u, dmat);
      const auto model = lines(*u, cmat);
      for (std::size_t t = 0; t < meas.size(); ++t) {
        num += std::real(std::conj(model[t]) * (meas[t] - base[t]));
        den += std::norm(model[t]);
      }
    }
    if (den > 1e-20 * std::max(1.0, s * s + d * d)) {
      cal.scale = num / den;
      cal.scale_determined = true;
    }
  }
  return cal;
}

Reconstruction reconstruct_density(const std::vector<double>& diag, const std::vector<Coherence>& coherences,
                                   double scale) {
  const int dim = static_cast<int>(diag.size());
  Reconstruction rec;
  CMatrix m = CMatrix::Zero(dim, dim);
  Eigen::MatrixXi seen = Eigen::MatrixXi::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) m(k, k) = diag[k];
  for (const auto& c : coherences) {
    if (c.k < 0 || c.l < 0 || c.k >= dim || c.l >= dim || c.k == c.l) throw InputError("coherence index out of range");
    const int k = std::min(c.k, c.l);
    const int l = std::max(c.k, c.l);
    const cplx v = scale * (c.k < c.l ? c.value : std::conj(c.value));
    if (seen(k, l)) {
      rec.symmetrized = true;
      m(k, l) = 0.5 * (m(k, l) + v);
    } else {
      m(k, l) = v;
    }
    ++seen(k, l);
    m(l, k) = std::conj(m(k, l));
  }
  rec.rho = DensityMatrix(m);
  return rec;
}

TomographyResult full_tomography(const EigenSystem& es, const TransitionCatalog& cat, const DensityMatrix& rho,
                                 const TomoOptions& opt) {
  TomographyResult out;
  out.diagonal = tomo_diagonal(es, cat, rho);
  out.offdiagonal = tomo_offdiagonal_2d(es, cat, rho, opt);
  out.calibration =
      tomo_scale_calibration(es, cat, rho, out.diagonal.populations, out.offdiagonal.coherences);
  out.reconstruction = reconstruct_density(out.diagonal.populations, out.offdiagonal.coherences, out.calibration.scale);
  out.fidelity = fidelity(out.reconstruction.rho.mat, rho.mat);
  return out;
}

LevelDiagram catalog_diagram(const EigenSystem& es, const TransitionCatalog& cat, bool observable_only) {
  LevelDiagram ld;
  ld.n = es.n;
  ld.level_mz = es.mz;
  for (const auto& t : cat.entries) {
    if (!observable_only || t.observable) ld.edges.push_back({t.id, t.lower, t.upper, false});
  }
  return ld;
}

ConnectivityMatrix zcosy_connectivity(const EigenSystem& es, const TransitionCatalog& cat) {
  return connectivity_of(catalog_diagram(es, cat));
}

Dataset2D zcosy_dataset(const EigenSystem& es, const TransitionCatalog& cat, double beta_deg, int t1_points,
                        int t2_points, double dwell1, double dwell2, double first_phase_deg) {
  if (!is_power_of_two(t1_points) || !is_power_of_two(t2_points)) {
    throw InputError("t1 and t2 points must be powers of two");
  }
  Dataset2D ds;
  ds.t1_points = t1_points;
  ds.t2_points = t2_points;
  ds.dwell1 = dwell1 > 0 ? dwell1 : default_dwell(es);
  ds.dwell2 = dwell2 > 0 ? dwell2 : default_dwell(es);
  const CMatrix u = hard_pulse_unitary(es, beta_deg, 0);
  const DensityMatrix start = conjugate(hard_pulse_unitary(es, beta_deg, first_phase_deg), equilibrium_deviation(es));
  const RMatrix q = population_series(es, start, u, t1_points, ds.dwell1);
  const CMatrix h = readout_basis(es, cat, u, t2_points, ds.dwell2);
  ds.data = q.cast<cplx>() * h.transpose();
  return ds;
}

ConnectivityMatrix zcosy_connectivity_from_data(const EigenSystem& es, const TransitionCatalog& cat,
                                                const Dataset2D& ds_x, const Dataset2D& ds_y, double beta_deg,
                                                double threshold) {
  const CMatrix u = hard_pulse_unitary(es, beta_deg, 0);
  const CMatrix h = readout_basis(es, cat, u, ds_x.t2_points, ds_x.dwell2);
  const RMatrix pinv = readout_inverse(h);
  // a y excitation carries exp(-i p pi/2) on each order-p coherence
  const std::vector<Series> series{{recover_populations(ds_x, pinv), 0.0},
                                   {recover_populations(ds_y, pinv), -kPi / 2}};

  std::vector<std::pair<int, int>> pairs;
  std::vector<double> omega;
  std::vector<int> order;
  for (int k = 0; k < es.dim(); ++k) {
    for (int l = k + 1; l < es.dim(); ++l) {
      const int p = static_cast<int>(std::lround(es.mz[k] - es.mz[l]));
      if (p == 0 && std::abs(es.energies(k) - es.energies(l)) < 1e-9) continue;
      pairs.emplace_back(k, l);
      omega.push_back(es.energies(k) - es.energies(l));
      order.push_back(p);
    }
  }
  const CMatrix x = fit_pair_coefficients(series, ds_x.dwell1, omega, order);

  // readout amplitude of each line from each pure population
  const CMatrix fplus = fplus_eigen(es);
  CMatrix r(es.dim(), static_cast<long>(cat.entries.size()));
  for (int i = 0; i < es.dim(); ++i) {
    const auto amps = line_amplitudes_with(fplus, cat, u.col(i) * u.col(i).adjoint());
    for (std::size_t b = 0; b < amps.size(); ++b) r(i, static_cast<long>(b)) = amps[b];
  }

  std::vector<const Transition*> obs;
  for (const auto& t : cat.entries) {
    if (t.observable) obs.push_back(&t);
  }
  const int nt = static_cast<int>(obs.size());
  CMatrix peak(nt, nt);
  for (int a = 0; a < nt; ++a) {
    const int k = std::min(obs[a]->lower, obs[a]->upper);
    const int l = std::max(obs[a]->lower, obs[a]->upper);
    const auto it = std::find(pairs.begin(), pairs.end(), std::make_pair(k, l));
    const long c = it - pairs.begin();
    for (int b = 0; b < nt; ++b) {
      const long col = obs[b] - cat.entries.data();
      cplx s(0.0);
      for (int i = 0; i < es.dim(); ++i) s += x(i, c) * r(i, col);
      peak(a, b) = s;
    }
  }
  // diagonal peaks fix the reference phase; regressive cross peaks share their sign
  int ref = 0;
  for (int a = 1; a < nt; ++a) {
    if (std::abs(peak(a, a)) > std::abs(peak(ref, ref))) ref = a;
  }
  const cplx phase = nt > 0 ? peak(ref, ref) / std::abs(peak(ref, ref)) : cplx(1.0);
  ConnectivityMatrix cm;
  cm.m = IMatrix::Zero(nt, nt);
  for (int a = 0; a < nt; ++a) {
    cm.ids.push_back(obs[a]->id);
    for (int b = 0; b < nt; ++b) {
      const double scale = 0.5 * std::sqrt(std::abs(peak(a, a)) * std::abs(peak(b, b)));
      if (a == b || !(scale > 0)) continue;
      // ideal first-order cross peaks come out at -1 (progressive) and +1 (regressive)
      const double v = 0.5 * std::real((peak(a, b) + peak(b, a)) * std::conj(phase)) / scale;
      if (std::abs(v) >= threshold) cm.m(a, b) = v < 0 ? 1 : -1;
    }
  }
  return cm;
}

std::string format_stick_csv(const StickSpectrum& sp) {
  std::ostringstream out;
  out << "freq_hz,amplitude\n";
  for (const auto& l : sp.lines) out << fmt_real(l.freq_hz) << ',' << fmt_real(l.amplitude) << '\n';
  return out.str();
}

std::string format_spectrum_csv(const Spectrum1D& sp) {
  std::ostringstream out;
  out << "freq_hz,amplitude\n";
  for (std::size_t k = 0; k < sp.values.size(); ++k) {
    out << fmt_real(sp.freq_hz[k]) << ',' << fmt_real(std::abs(sp.values[k])) << '\n';
  }
  return out.str();
}

std::string format_dataset(const Dataset2D& ds) {
  std::ostringstream out;
  out << "# dataset2d t1_points " << ds.t1_points << " t2_points " << ds.t2_points << " dwell1 " << fmt_real(ds.dwell1)
      << " dwell2 " << fmt_real(ds.dwell2) << '\n';
  for (int j = 0; j < ds.t1_points; ++j) {
    for (int m = 0; m < ds.t2_points; ++m) {
      out << j << ' ' << m << ' ' << fmt_real(ds.data(j, m).real()) << ' ' << fmt_real(ds.data(j, m).imag()) << '\n';
    }
  }
  return out.str();
}

std::string format_magnitude_grid(const Dataset2D& ds) {
  const RMatrix mag = magnitude_spectrum(ds);
  const auto f1 = centered_axis(ds.t1_points, ds.dwell1);
  const auto f2 = centered_axis(ds.t2_points, ds.dwell2);
  std::ostringstream out;
  out << "# f1_hz f2_hz magnitude\n";
  for (int j = 0; j < ds.t1_points; ++j) {
    for (int m = 0; m < ds.t2_points; ++m) out << fmt_real(f1[j]) << ' ' << fmt_real(f2[m]) << ' ' << fmt_real(mag(j, m)) << '\n';
    out << '\n';
  }
  return out.str();
}

}  // namespace spinsim
