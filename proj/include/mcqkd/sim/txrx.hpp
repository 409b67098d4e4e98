#pragma once
// Transmitter, channel, detection, and receiver DSP for the multi-carrier
// Monte-Carlo chain. The signal path is: per-subcarrier symbols -> small
// inverse DFT across subcarriers -> serial stream -> RRC shaping at the DAC
// rate -> digital shift to f_shift. The pilot is an unmodulated tone at
// envelope frequency zero. Both co-propagate; detection beats the field
// against a local oscillator offset by delta_f_AB and records the real
// photocurrent, so the signal lands at IF delta_f_AB - f_shift and the pilot
// at delta_f_AB.

#include <complex>
#include <cstdint>
#include <vector>

#include "mcqkd/scenario.hpp"
#include "mcqkd/sim/dsp.hpp"
#include "mcqkd/sim/rng.hpp"

namespace mcqkd::sim {

struct IQFrame {
  cvec samples;            // complex envelope
  double rate_gsps = 0.0;  // sample rate
  int serial_symbols = 0;  // serial symbols represented
  std::vector<std::uint8_t> ts_mask;  // per serial symbol
};

// Training sequence: constant-amplitude pseudo-random QPSK per subcarrier,
// fixed for a whole run and known to the receiver.
struct TsSequence {
  std::vector<cvec> sym;  // [subcarrier][frame]
  double amplitude = 0.0;
};

TsSequence make_ts(int n_sub, int ts_frames, double amplitude,
                   std::uint64_t seed);

// Serial-domain waveform of the training segment (inverse DFT across
// subcarriers, frame by frame), the receiver's synchronization reference.
cvec ts_serial(const TsSequence& ts, int n_sub);

// key_symbols are frame-major (index f*N + k) and cover the non-TS frames.
// Throws std::invalid_argument when the count does not divide into frames.
IQFrame mc_generate(const cvec& key_symbols, const TsSequence& ts,
                    const TxPlan& plan);

// Unmodulated pilot at envelope frequency zero on the same sample grid.
IQFrame pilot_tone(const TxPlan& plan, double amplitude,
                   std::size_t nsamples);

// Everything the channel does to one block, precomputed so that the signal
// and pilot frames see the same trajectory. Excess noise is injected at the
// symbol level by the run driver: sample-level white injection would alias
// around the detection fold and land unevenly across subcarriers.
struct ImpairmentState {
  std::vector<double> phase_walk;  // rad per DAC sample, common to the field
  double drift_phase = 0.0;        // slow signal-vs-pilot differential, rad
  double cd_coeff = 0.0;           // 2*pi^2*beta2*L, envelope f^2 phase
  double sqrt_t = 1.0;             // amplitude transmittance
};

// Channel application; is_signal selects the differential drift (the pilot
// carries only the common phase walk).
IQFrame apply_channel(const IQFrame& in, const ImpairmentState& st,
                      bool is_signal);

// Mid-riser quantizer over [-range, range]; values outside clip.
void adc_quantize(std::vector<double>& r, int bits, double range);

struct DetectedPair {
  std::vector<double> y_sig;
  std::vector<double> y_pilot;
};

// Heterodyne detection of the combined field: scale by sqrt(eta) and gain,
// resample to the ADC rate, beat to the real IF record, add per-record shot
// and electronic noise, quantize, and apply the common trigger delay.
// quant_range <= 0 disables quantization; shot noise std sigma0 = 1 per real
// sample unless det.shot_noise is off.
DetectedPair heterodyne_detect(const IQFrame& sig, const IQFrame& pilot,
                               const DetectorModel& det, double gain,
                               double delta_f_ab_ghz, double quant_range,
                               std::size_t delay, Rng& rng_sig,
                               Rng& rng_pilot);

// Receiver configuration precomputed once per run. rx_filter is the fused
// frequency response on the ADC grid: matched-filter gain times the
// dispersion-correction phase.
struct RxParams {
  int n_sub = 1;
  int os_adc = 4;
  std::size_t serial_len = 0;  // serial symbols per block
  long ab_bins = 0;            // delta_f_AB on the record DFT grid
  long if_bins = 0;            // delta_f_AB - f_shift
  double adc_rate_hz = 0.0;
  double band_lo_hz = 0.0;     // signal IF band
  double band_hi_hz = 0.0;
  double pilot_bw_hz = 0.0;
  cvec rx_filter;              // applied to the downconverted baseband
  cvec ts_ref;                 // serial TS reference
  double sync_threshold = 0.5;
  bool pnc_fast = true;
};

// Downconverted and filtered block, not yet committed to a symbol timing.
// corr holds the circular complex correlation of each decimation phase
// against the TS reference; the trigger delay is fixed for a run, so the
// driver sums corr coherently over a superposition group before deciding.
struct SyncScan {
  cvec filtered;           // pilot-corrected, filtered baseband, ADC grid
  std::vector<cvec> corr;  // [decimation phase][symbol lag], empty if skipped
};

SyncScan mc_downconvert(const std::vector<double>& y_sig,
                        const std::vector<double>& y_pilot, const RxParams& rx,
                        bool correlate);

struct SyncDecision {
  bool ok = false;
  std::size_t phase = 0;   // decimation phase within a symbol
  std::size_t lag = 0;     // symbol lag
  double sidelobe = 1.0;   // strongest rival correlation / accepted peak
};

// Timing acceptance by peak dominance over the accumulated correlation.
SyncDecision sync_decide(const std::vector<cvec>& corr_sum, double threshold);

struct DemodBlock {
  std::vector<cvec> sym;  // [subcarrier][frame], before equalization
  bool sync_ok = true;
  std::size_t delay = 0;
  double sidelobe = 0.0;  // strongest rival correlation / accepted peak
};

// Symbol extraction at a committed timing.
DemodBlock mc_demodulate_at(const SyncScan& scan, const RxParams& rx,
                            std::size_t phase, std::size_t lag);

// Single-block receiver DSP. do_sync=false trusts zero delay (used for
// calibration records, which carry no training sequence).
DemodBlock mc_demodulate(const std::vector<double>& y_sig,
                         const std::vector<double>& y_pilot,
                         const RxParams& rx, bool do_sync);

} // namespace mcqkd::sim
