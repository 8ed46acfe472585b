#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spinsim/eigensystem.hpp"
#include "spinsim/types.hpp"

namespace spinsim {

// Traceless deviation part of the high-temperature density operator, stored in the
// eigenbasis of the EigenSystem it was built from (index k == eigenstate label k).
struct DensityMatrix {
  CMatrix mat;

  DensityMatrix() = default;
  explicit DensityMatrix(CMatrix m) : mat(std::move(m)) {}
  static DensityMatrix zero(int dim) { return DensityMatrix(CMatrix::Zero(dim, dim)); }
  static DensityMatrix diagonal(const std::vector<double>& populations);

  int dim() const { return static_cast<int>(mat.rows()); }
  cplx trace() const { return mat.trace(); }
  double hermiticity_error() const { return (mat - mat.adjoint()).cwiseAbs().maxCoeff(); }
  std::vector<double> populations() const;
};

// Populations proportional to M_z (high-field limit). A finite spectrometer frequency adds
// the first-order rotating-frame correction -E_k / (2 pi nu0). Normalized so that
// max - min population equals n.
DensityMatrix equilibrium_deviation(const EigenSystem& es, double spectrometer_hz = 0.0);

// exp(-i theta I_phi) restricted to the two-level subspace {r, s}. The pair is oriented
// so that r is the state with the larger M_z.
CMatrix selective_pulse_unitary(const EigenSystem& es, int r, int s, double theta_deg, double phase_deg);

// exp(-i theta F_phi) on all spins, returned in the eigenbasis.
CMatrix hard_pulse_unitary(const EigenSystem& es, double theta_deg, double phase_deg);

DensityMatrix conjugate(const CMatrix& u, const DensityMatrix& rho);

// Ideal gradient crusher: zeroes every eigenbasis coherence.
DensityMatrix crush_gradient(const DensityMatrix& rho);

DensityMatrix free_evolution(const EigenSystem& es, const DensityMatrix& rho, double t_seconds);

// Closed form for the populations of a pulsed two-level pair after a crusher.
std::pair<double, double> selective_population_update(double p_i, double p_j, double theta_deg);

// Normalized Frobenius overlap Tr(A B) / sqrt(Tr(A^2) Tr(B^2)).
double fidelity(const CMatrix& a, const CMatrix& b);

// Shifts rho by its smallest eigenvalue and normalizes to unit trace. For a pseudopure
// deviation this recovers the pure-state projector.
CMatrix pure_part(const DensityMatrix& rho);

// <target| pure_part(rho) |target>
double pseudopure_fidelity(const DensityMatrix& rho, int target);

// Sums matrices by recursive halving so the result does not depend on evaluation order.
CMatrix pairwise_sum(const std::vector<CMatrix>& terms);

// Text form: "dim N" then "k l re im" per entry with magnitude >= 1e-14 (1-based).
std::string format_density(const DensityMatrix& rho);
DensityMatrix parse_density(std::string_view text, const std::string& source = "<state>");

}  // namespace spinsim
