#pragma once
// Channel and shot-noise-unit estimation. The chain gain is referenced two
// ways: amp2 comes from a deterministic noiseless probe of the full DSP path
// (what a known-power reference measurement gives), and s comes from
// signal-off records pushed through the same receiver filters. T_hat then
// needs no absolute record scale, and the noise floor subtraction is exact in
// expectation whichever unit convention the calibration measured.

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "mcqkd/sim/dsp.hpp"

namespace mcqkd::sim {

struct SnuCalibration {
  std::vector<double> s;      // per-subcarrier unit: off-record complex var / 2
  std::vector<double> s_ref;  // unit at the reference (first) measurement
  std::vector<double> amp2;   // |chain amplitude gain|^2 per subcarrier, probe
  double eta = 1.0;           // detection efficiency folded out of T_hat
  bool valid = false;         // false: noiseless chain, floors are zero
};

struct ChannelEstimate {
  std::complex<double> h;  // raw-scale complex gain
  double t_hat = 0.0;
  double xi_hat = 0.0;     // channel-referred, SNU
  double resid_var = 0.0;  // raw residual variance
  double sym_var = 0.0;    // raw received variance
  std::size_t m = 0;
};

// Sufficient statistics of (tx, rx) pairs for the least-squares gain and its
// residual variance, so pooling across blocks never buffers the pairs.
struct PairAccumulator {
  double s_tx2 = 0.0;                   // sum |tx|^2
  double s_rx2 = 0.0;                   // sum |rx|^2
  std::complex<double> s_xy{0.0, 0.0};  // sum rx * conj(tx)
  std::size_t m = 0;

  void add(const cd* tx, const cd* rx, std::size_t n);
};

// Off-record per-subcarrier second moments -> unit update. update_ref also
// rebinds the reference unit (one-time calibration never rebinds it after the
// first call). Throws std::domain_error when no off data is present.
void calibrate_snu(SnuCalibration& cal,
                   const std::vector<cvec>& off_symbols, bool update_ref);

// Gain, residual variance, and the calibrated referral t_hat/xi_hat from
// accumulated pairs. Throws std::domain_error for fewer than two pairs or
// degenerate tx power.
ChannelEstimate estimate_from(const PairAccumulator& acc,
                              const SnuCalibration& cal, int subcarrier);

// Single-shot convenience over one pair set.
ChannelEstimate estimate_channel(const cvec& tx, const cvec& rx,
                                 const SnuCalibration& cal, int subcarrier);

} // namespace mcqkd::sim
