#include "mcqkd/sim/txrx.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mcqkd/kernels.hpp"

namespace mcqkd::sim {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Small inverse/forward DFT across subcarriers, unitary scaling. N stays in
// single digits so the direct form beats transform setup cost.
void frame_idft(const cd* in, cd* out, int n) {
  const double s = 1.0 / std::sqrt(double(n));
  for (int i = 0; i < n; ++i) {
    cd acc(0.0, 0.0);
    for (int k = 0; k < n; ++k)
      acc += in[k] * std::polar(1.0, 2.0 * kPi * double(i) * double(k) / n);
    out[i] = s * acc;
  }
}

void frame_dft(const cd* in, cd* out, int n) {
  const double s = 1.0 / std::sqrt(double(n));
  for (int k = 0; k < n; ++k) {
    cd acc(0.0, 0.0);
    for (int i = 0; i < n; ++i)
      acc += in[i] * std::polar(1.0, -2.0 * kPi * double(i) * double(k) / n);
    out[k] = s * acc;
  }
}

} // namespace

TsSequence make_ts(int n_sub, int ts_frames, double amplitude,
                   std::uint64_t seed) {
  TsSequence ts;
  ts.amplitude = amplitude;
  ts.sym.assign(std::size_t(n_sub), cvec(std::size_t(ts_frames)));
  Rng rng(seed);
  for (int k = 0; k < n_sub; ++k)
    for (int f = 0; f < ts_frames; ++f) {
      const double q = double(rng.bits() & 3u);
      ts.sym[std::size_t(k)][std::size_t(f)] =
          std::polar(amplitude, kPi / 4.0 + q * kPi / 2.0);
    }
  return ts;
}

cvec ts_serial(const TsSequence& ts, int n_sub) {
  if (ts.sym.empty()) return {};
  const std::size_t frames = ts.sym[0].size();
  cvec out(frames * std::size_t(n_sub));
  cvec col(std::size_t(n_sub), cd(0.0, 0.0));
  for (std::size_t f = 0; f < frames; ++f) {
    for (int k = 0; k < n_sub; ++k) col[std::size_t(k)] = ts.sym[std::size_t(k)][f];
    frame_idft(col.data(), out.data() + f * std::size_t(n_sub), n_sub);
  }
  return out;
}

IQFrame mc_generate(const cvec& key_symbols, const TsSequence& ts,
                    const TxPlan& plan) {
  const int n = plan.N;
  if (n < 1 || ts.sym.size() != std::size_t(n))
    throw std::invalid_argument("mc_generate: plan/TS subcarrier mismatch");
  if (key_symbols.size() % std::size_t(n) != 0)
    throw std::invalid_argument(
        "mc_generate: key symbol count not divisible by subcarrier count");
  const std::size_t key_frames = key_symbols.size() / std::size_t(n);
  const std::size_t ts_frames = ts.sym[0].size();
  const std::size_t frames = ts_frames + key_frames;
  const std::size_t serial = frames * std::size_t(n);

  cvec stream(serial);
  cvec col(std::size_t(n), cd(0.0, 0.0));
  for (std::size_t f = 0; f < frames; ++f) {
    for (int k = 0; k < n; ++k)
      col[std::size_t(k)] = f < ts_frames
                                ? ts.sym[std::size_t(k)][f]
                                : key_symbols[(f - ts_frames) * std::size_t(n) +
                                              std::size_t(k)];
    frame_idft(col.data(), stream.data() + f * std::size_t(n), n);
  }

  const int os = int(std::llround(plan.dac_rate_gsps / plan.f_sym_ghz));
  const std::size_t len = serial * std::size_t(os);
  cvec up(len, cd(0.0, 0.0));
  for (std::size_t m = 0; m < serial; ++m) up[m * std::size_t(os)] = stream[m];

  const double fs_hz = plan.dac_rate_gsps * 1e9;
  cvec spec = fft(up);
  apply_gain(spec, rrc_gain(len, fs_hz, plan.f_sym_ghz * 1e9, plan.rrc_rolloff,
                            double(os)));
  cvec shaped = ifft(spec);
  const long shift_bins =
      std::llround(plan.f_shift_ghz / plan.f_sym_ghz * double(serial));
  rotate_tone(shaped, shift_bins);

  IQFrame out;
  out.samples = std::move(shaped);
  out.rate_gsps = plan.dac_rate_gsps;
  out.serial_symbols = int(serial);
  out.ts_mask.assign(serial, 0);
  for (std::size_t m = 0; m < ts_frames * std::size_t(n); ++m) out.ts_mask[m] = 1;
  return out;
}

IQFrame pilot_tone(const TxPlan& plan, double amplitude,
                   std::size_t nsamples) {
  IQFrame out;
  out.samples.assign(nsamples, cd(amplitude, 0.0));
  out.rate_gsps = plan.dac_rate_gsps;
  out.serial_symbols = 0;
  return out;
}

IQFrame apply_channel(const IQFrame& in, const ImpairmentState& st,
                      bool is_signal) {
  IQFrame out = in;
  const std::size_t n = out.samples.size();
  if (!st.phase_walk.empty() && st.phase_walk.size() != n)
    throw std::invalid_argument("apply_channel: phase walk length mismatch");

  for (cd& v : out.samples) v *= st.sqrt_t;
  cd_apply(out.samples, out.rate_gsps * 1e9, st.cd_coeff);

  const double drift = is_signal ? st.drift_phase : 0.0;
  if (!st.phase_walk.empty() || drift != 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      const double ph = (st.phase_walk.empty() ? 0.0 : st.phase_walk[i]) + drift;
      out.samples[i] *= std::polar(1.0, ph);
    }
  }
  return out;
}

void adc_quantize(std::vector<double>& r, int bits, double range) {
  if (range <= 0.0 || bits < 1) return;
  const double levels = std::pow(2.0, bits);
  const double delta = 2.0 * range / levels;
  const double top = range - 0.5 * delta;
  for (double& x : r) {
    double q = delta * (std::floor(x / delta) + 0.5);
    q = std::min(std::max(q, -top), top);
    x = q;
  }
}

DetectedPair heterodyne_detect(const IQFrame& sig, const IQFrame& pilot,
                               const DetectorModel& det, double gain,
                               double delta_f_ab_ghz, double quant_range,
                               std::size_t delay, Rng& rng_sig,
                               Rng& rng_pilot) {
  if (sig.samples.size() != pilot.samples.size())
    throw std::invalid_argument("heterodyne_detect: frame length mismatch");
  cvec env(sig.samples.size());
  for (std::size_t i = 0; i < env.size(); ++i)
    env[i] = sig.samples[i] + pilot.samples[i];

  const double ratio = det.adc_rate_gsps / sig.rate_gsps;
  const double lo = double(env.size()) * ratio;
  const std::size_t len4 = std::size_t(std::llround(lo));
  if (std::fabs(lo - double(len4)) > 1e-9)
    throw std::invalid_argument(
        "heterodyne_detect: ADC/DAC rate ratio not record-commensurate");
  cvec e4 = resample_fft(env, len4);

  const double fs_hz = det.adc_rate_gsps * 1e9;
  const long ab_bins =
      std::llround(delta_f_ab_ghz * 1e9 / fs_hz * double(len4));
  rotate_tone(e4, -ab_bins);

  const double root_eta = std::sqrt(det.eta);
  const double sigma0 = det.shot_noise ? 1.0 : 0.0;
  const double sigma_el = sigma0 * std::sqrt(0.5 * det.v_el);

  DetectedPair out;
  out.y_sig.resize(len4);
  out.y_pilot.resize(len4);
  for (std::size_t i = 0; i < len4; ++i) {
    const double beat = root_eta * e4[i].real();
    out.y_sig[i] =
        gain * (beat + sigma0 * rng_sig.gauss() + sigma_el * rng_sig.gauss());
    out.y_pilot[i] = gain * (beat + sigma0 * rng_pilot.gauss() +
                             sigma_el * rng_pilot.gauss());
  }
  if (det.quantization && quant_range > 0.0) {
    adc_quantize(out.y_sig, det.adc_bits, quant_range);
    adc_quantize(out.y_pilot, det.adc_bits, quant_range);
  }
  if (delay > 0) {
    std::rotate(out.y_sig.rbegin(), out.y_sig.rbegin() + long(delay),
                out.y_sig.rend());
    std::rotate(out.y_pilot.rbegin(), out.y_pilot.rbegin() + long(delay),
                out.y_pilot.rend());
  }
  return out;
}

namespace {

// Analytic signal restricted to [lo,hi] Hz, brought to baseband by an integer
// bin shift, then conjugated. The record is the real part of env*exp(-jWt),
// so the positive-frequency content is the conjugate envelope; conjugation
// after the shift recovers the envelope itself.
cvec extract_band(const std::vector<double>& r, double fs_hz, double lo_hz,
                  double hi_hz, long downshift_bins) {
  const std::size_t n = r.size();
  cvec x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = cd(r[i], 0.0);
  cvec s = fft(x);
  for (std::size_t k = 1; k < (n + 1) / 2; ++k) s[k] *= 2.0;
  for (std::size_t k = n / 2 + 1; k < n; ++k) s[k] = 0.0;
  bandpass(s, fs_hz, lo_hz, hi_hz);
  cvec z = ifft(s);
  rotate_tone(z, -downshift_bins);
  for (cd& v : z) v = std::conj(v);
  return z;
}

} // namespace

SyncScan mc_downconvert(const std::vector<double>& y_sig,
                        const std::vector<double>& y_pilot, const RxParams& rx,
                        bool correlate) {
  SyncScan out;
  const std::size_t len = y_sig.size();
  const double fs = rx.adc_rate_hz;

  cvec z = extract_band(y_sig, fs, rx.band_lo_hz, rx.band_hi_hz, rx.if_bins);

  if (rx.pnc_fast) {
    const double ab_hz = bin_freq_hz(std::size_t(rx.ab_bins), len, fs);
    cvec zp = extract_band(y_pilot, fs, ab_hz - 0.5 * rx.pilot_bw_hz,
                           ab_hz + 0.5 * rx.pilot_bw_hz, rx.ab_bins);
    for (cd& v : zp) {
      const double a = std::abs(v);
      v = a > 1e-12 ? v / a : cd(1.0, 0.0);
    }
    kern::cmul_conj(z.data(), z.data(), zp.data(), len);
  }

  cvec spec = fft(z);
  for (std::size_t k = 0; k < len; ++k) spec[k] *= rx.rx_filter[k];
  out.filtered = ifft(spec);

  if (correlate) {
    const std::size_t os = std::size_t(rx.os_adc);
    const std::size_t nsym = rx.serial_len;
    cvec ts_pad(nsym, cd(0.0, 0.0));
    std::copy(rx.ts_ref.begin(), rx.ts_ref.end(), ts_pad.begin());
    const cvec ts_spec = fft(ts_pad);

    out.corr.assign(os, cvec());
    cvec cand(nsym);
    for (std::size_t t = 0; t < os; ++t) {
      for (std::size_t m = 0; m < nsym; ++m) cand[m] = out.filtered[m * os + t];
      cvec ws = fft(cand);
      for (std::size_t k = 0; k < nsym; ++k) ws[k] *= std::conj(ts_spec[k]);
      out.corr[t] = ifft(ws);
    }
  }
  return out;
}

SyncDecision sync_decide(const std::vector<cvec>& corr_sum, double threshold) {
  SyncDecision out;
  if (corr_sum.empty() || corr_sum[0].empty()) return out;
  const std::size_t os = corr_sum.size();
  const std::size_t nsym = corr_sum[0].size();

  double best = -1.0;
  for (std::size_t t = 0; t < os; ++t)
    for (std::size_t lag = 0; lag < nsym; ++lag) {
      const double m = std::abs(corr_sum[t][lag]);
      if (m > best) {
        best = m;
        out.phase = t;
        out.lag = lag;
      }
    }
  // acceptance by peak dominance: the winner must beat every rival lag by
  // the threshold factor. Rivals within one symbol (any sampling phase) are
  // the peak's own fractional-timing shoulder, not competitors. A ratio test
  // stays calibrated at any shot-noise level, where a peak value normalized
  // by window energy would sink with the SNR.
  double second = 0.0;
  for (std::size_t t = 0; t < os; ++t)
    for (std::size_t lag = 0; lag < nsym; ++lag) {
      const std::size_t dist = (lag + nsym - out.lag) % nsym;
      if (dist <= 1 || dist + 1 >= nsym) continue;
      second = std::max(second, std::abs(corr_sum[t][lag]));
    }
  out.sidelobe = best > 0.0 ? second / best : 1.0;
  out.ok = out.sidelobe < threshold;
  return out;
}

DemodBlock mc_demodulate_at(const SyncScan& scan, const RxParams& rx,
                            std::size_t phase, std::size_t lag) {
  const std::size_t os = std::size_t(rx.os_adc);
  const std::size_t nsym = rx.serial_len;
  cvec serial(nsym);
  for (std::size_t m = 0; m < nsym; ++m)
    serial[m] = scan.filtered[((m + lag) % nsym) * os + phase];

  DemodBlock out;
  const int n = rx.n_sub;
  const std::size_t frames = nsym / std::size_t(n);
  out.sym.assign(std::size_t(n), cvec(frames));
  cvec col(std::size_t(n), cd(0.0, 0.0));
  for (std::size_t f = 0; f < frames; ++f) {
    frame_dft(serial.data() + f * std::size_t(n), col.data(), n);
    for (int k = 0; k < n; ++k) out.sym[std::size_t(k)][f] = col[std::size_t(k)];
  }
  out.sync_ok = true;
  out.delay = lag * os + phase;
  return out;
}

DemodBlock mc_demodulate(const std::vector<double>& y_sig,
                         const std::vector<double>& y_pilot,
                         const RxParams& rx, bool do_sync) {
  const SyncScan scan = mc_downconvert(y_sig, y_pilot, rx, do_sync);
  if (!do_sync) return mc_demodulate_at(scan, rx, 0, 0);

  const SyncDecision sd = sync_decide(scan.corr, rx.sync_threshold);
  if (!sd.ok) {
    DemodBlock out;
    out.sync_ok = false;
    out.sidelobe = sd.sidelobe;
    return out;
  }
  DemodBlock out = mc_demodulate_at(scan, rx, sd.phase, sd.lag);
  out.sidelobe = sd.sidelobe;
  return out;
}

} // namespace mcqkd::sim
