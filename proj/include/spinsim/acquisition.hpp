#pragma once

#include <string>
#include <vector>

#include "spinsim/connectivity.hpp"
#include "spinsim/dynamics.hpp"
#include "spinsim/eigensystem.hpp"
#include "spinsim/transitions.hpp"

namespace spinsim {

struct StickLine {
  double freq_hz = 0.0;
  double amplitude = 0.0;
  int transition_id = 0;
};

struct StickSpectrum {
  std::vector<StickLine> lines;  // catalog order, lines with |amplitude| <= 1e-12 dropped
  bool coherent_input = false;   // input had coherences; only its diagonal was used
};

// Linear-response small-angle detection of the populations:
// amplitude = sin(beta) (p_lower - p_upper) |<upper|F-|lower>|^2.
StickSpectrum detect_small_angle(const EigenSystem& es, const TransitionCatalog& cat, const DensityMatrix& rho,
                                 double beta_deg = 10.0);

// Complex amplitude of every catalog line in Tr(rho(t) F+), catalog order:
// rho_{upper,lower} <lower|F+|upper>. The FID is sum_t a_t exp(2 pi i f_t t).
std::vector<cplx> line_amplitudes(const EigenSystem& es, const TransitionCatalog& cat, const DensityMatrix& rho);

bool is_power_of_two(int n);

// In-place radix-2 FFT, forward sign exp(-2 pi i k m / N).
void fft_inplace(std::vector<cplx>& data, bool inverse = false);

struct Spectrum1D {
  std::vector<double> freq_hz;  // centered, ascending
  std::vector<cplx> values;
};

std::vector<cplx> acquire_fid(const EigenSystem& es, const TransitionCatalog& cat, const DensityMatrix& rho, int points,
                              double dwell);
Spectrum1D fft_spectrum(const std::vector<cplx>& fid, double dwell);

struct Dataset2D {
  int t1_points = 0;
  int t2_points = 0;
  double dwell1 = 0.0;
  double dwell2 = 0.0;
  CMatrix data;  // t1 x t2
};

// |2D FFT| with both axes centered.
RMatrix magnitude_spectrum(const Dataset2D& ds);

struct OmegaPeak {
  double freq_hz = 0.0;  // centroid
  double height = 0.0;
};

// Local maxima of the omega1 projection above `threshold` of the largest, refined by a
// 3-bin centroid.
std::vector<OmegaPeak> pick_omega1_peaks(const Dataset2D& ds, double threshold = 0.05);

struct Coherence {
  int k = 0, l = 0;  // k < l
  int order = 0;     // M_z(k) - M_z(l)
  double freq_hz = 0.0;
  cplx value;        // estimate of rho_kl
};

struct DiagonalEstimate {
  std::vector<double> populations;
  bool underdetermined = false;
  int rank = 0;
};

// Crusher, small-angle hard pulse, stick detection over observable lines, then a
// least-squares inversion with the trace-free gauge.
DiagonalEstimate tomo_diagonal(const EigenSystem& es, const TransitionCatalog& cat, const DensityMatrix& rho,
                               double beta_deg = 10.0);

struct TomoOptions {
  int t1_points = 512;
  int t2_points = 2048;
  double dwell1 = 0.0;  // 0 picks default_dwell
  double dwell2 = 0.0;
  double peak_threshold = 0.05;
};

// 1 / (5 max|E| / 2 pi): keeps every coherence frequency below the Nyquist limit.
double default_dwell(const EigenSystem& es);

struct OffDiagonalResult {
  Dataset2D dataset;                   // (pi/2)_y read pulse
  std::vector<Dataset2D> phase_series;  // read pulse at y - 360 m / (2n+1) degrees, m = 1..2n
  std::vector<double> read_phase_deg;   // phase of each phase_series entry
  std::vector<OmegaPeak> peaks;
  std::vector<Coherence> coherences;
};

// Multiple-quantum experiment: t1 evolution, (pi/2)_y, crusher, (pi/4)_-y, t2 detection.
// The read pulse phase is also stepped through 2n+1 values so every coherence order and
// the sign of its frequency can be separated. Coherences are located from omega1 peaks and
// their values fitted in the time domain.
OffDiagonalResult tomo_offdiagonal_2d(const EigenSystem& es, const TransitionCatalog& cat, const DensityMatrix& rho,
                                      const TomoOptions& opt = {});

struct ScaleCalibration {
  std::vector<cplx> sum_lines;         // (pi/4)_x: diagonal plus double quantum
  std::vector<cplx> difference_lines;  // (pi/4)_y: diagonal minus double quantum
  double ratio = 0.0;                  // |difference| / |sum|
  double scale = 1.0;                  // multiplier for the 2D coherences
  bool scale_determined = false;
};

// Two 1D experiments after the state. `diag` and `coherences` (if given) are used to fit
// the relative scale of the 2D coherence table.
ScaleCalibration tomo_scale_calibration(const EigenSystem& es, const TransitionCatalog& cat, const DensityMatrix& rho,
                                        const std::vector<double>& diag = {},
                                        const std::vector<Coherence>& coherences = {});

struct Reconstruction {
  DensityMatrix rho;
  bool symmetrized = false;
};

Reconstruction reconstruct_density(const std::vector<double>& diag, const std::vector<Coherence>& coherences,
                                   double scale);

struct TomographyResult {
  DiagonalEstimate diagonal;
  OffDiagonalResult offdiagonal;
  ScaleCalibration calibration;
  Reconstruction reconstruction;
  double fidelity = 0.0;  // against the input state
};

TomographyResult full_tomography(const EigenSystem& es, const TransitionCatalog& cat, const DensityMatrix& rho,
                                 const TomoOptions& opt = {});

// Analytic Z-COSY connectivity over the observable lines.
ConnectivityMatrix zcosy_connectivity(const EigenSystem& es, const TransitionCatalog& cat);

// Level diagram of the observable lines with eigenstates as levels.
LevelDiagram catalog_diagram(const EigenSystem& es, const TransitionCatalog& cat, bool observable_only = true);

// Small-angle beta - t1 - beta - crusher - beta - t2 dataset. `first_phase_deg` sets the
// phase of the excitation pulse only.
Dataset2D zcosy_dataset(const EigenSystem& es, const TransitionCatalog& cat, double beta_deg, int t1_points,
                        int t2_points, double dwell1 = 0.0, double dwell2 = 0.0, double first_phase_deg = 0.0);

// Cross-peak signs read from a pair of Z-COSY datasets with excitation phases x and y,
// mapped onto the connectivity convention. Each cross peak is scaled by half the geometric
// mean of its two diagonal peaks (ideal value +-1); below `threshold` it counts as absent.
ConnectivityMatrix zcosy_connectivity_from_data(const EigenSystem& es, const TransitionCatalog& cat,
                                                const Dataset2D& ds_x, const Dataset2D& ds_y, double beta_deg,
                                                double threshold = 0.1);

std::string format_stick_csv(const StickSpectrum& sp);
std::string format_spectrum_csv(const Spectrum1D& sp);  // magnitude
std::string format_dataset(const Dataset2D& ds);
std::string format_magnitude_grid(const Dataset2D& ds);

}  // namespace spinsim
