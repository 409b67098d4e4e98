#include "mcqkd/sim/run.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "mcqkd/sim/dsp.hpp"
#include "mcqkd/sim/estimate.hpp"
#include "mcqkd/sim/rng.hpp"
#include "mcqkd/sim/txrx.hpp"

namespace mcqkd::sim {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Seed streams. Every consumer of randomness owns one, so toggling a
// receiver option never shifts the draws of an unrelated consumer and
// matched-seed comparisons stay matched.
enum : std::uint64_t {
  kTs = 1,
  kSym,
  kWalk,
  kDrift,
  kChanNoise,
  kShotSig,
  kShotPilot,
  kDelay,
  kCalSym,
  kCalWalk,
  kCalShotSig,
  kCalShotPilot,
  kProbe
};

struct RunGeometry {
  int n = 0;
  std::size_t serial = 0;  // serial symbols per block
  std::size_t frames = 0;
  std::size_t ts_frames = 0;
  int os_dac = 0;
  int os_adc = 0;
  std::size_t len_dac = 0;
  std::size_t len_adc = 0;
  long shift_bins = 0;
  long ab_bins = 0;
  double fs_dac_hz = 0.0;
  double fs_adc_hz = 0.0;
  double env_lo_hz = 0.0;  // signal envelope band, positive frequencies
  double env_hi_hz = 0.0;
  double va_mean = 0.0;
  double pilot_amp = 0.0;
  double cd_coeff = 0.0;
  double quant_range = 0.0;
  double xi_flat = 0.0;  // per-symbol injected channel noise, SNU
  double leak = 0.0;     // signal amplitude leakage of an off record
};

int integer_ratio(double num, double den, const char* field) {
  const double r = num / den;
  const long n = std::lround(r);
  if (n < 1 || std::fabs(r - double(n)) > 1e-9 * std::max(1.0, r))
    throw config_error(std::string(field) + " must be an integer");
  return int(n);
}

RunGeometry make_geometry(const Scenario& sc) {
  const TxPlan& tx = sc.tx;
  RunGeometry g;
  g.n = tx.N;
  if (sc.sim.symbols_per_block % tx.N != 0)
    throw config_error(
        "sim.symbols_per_block must be a multiple of tx.n_subcarriers");
  g.serial = std::size_t(sc.sim.symbols_per_block);
  g.frames = g.serial / std::size_t(tx.N);

  const double tsf = double(g.frames) * tx.ts_fraction;
  const long tsn = std::lround(tsf);
  if (tsn < 1 || std::size_t(tsn) >= g.frames ||
      std::fabs(tsf - double(tsn)) > 1e-9)
    throw config_error(
        "tx.ts_fraction must select a whole number of frames in [1, frames)");
  g.ts_frames = std::size_t(tsn);

  g.os_dac = integer_ratio(tx.dac_rate_gsps, tx.f_sym_ghz,
                           "tx.dac_rate_gsps / tx.f_sym_ghz");
  g.os_adc = integer_ratio(sc.detector.adc_rate_gsps, tx.f_sym_ghz,
                           "detector.adc_rate_gsps / tx.f_sym_ghz");
  g.len_dac = g.serial * std::size_t(g.os_dac);
  g.len_adc = g.serial * std::size_t(g.os_adc);
  g.fs_dac_hz = tx.dac_rate_gsps * 1e9;
  g.fs_adc_hz = sc.detector.adc_rate_gsps * 1e9;

  // both record grids share the bin spacing f_sym / serial
  const auto grid_bins = [&](double f_ghz, const char* field) {
    const double r = f_ghz / tx.f_sym_ghz * double(g.serial);
    const long b = std::lround(r);
    if (std::fabs(r - double(b)) > 1e-6)
      throw config_error(std::string(field) +
                         " must sit on the record frequency grid");
    return b;
  };
  g.shift_bins = grid_bins(tx.f_shift_ghz, "tx.f_shift_ghz");
  g.ab_bins = grid_bins(sc.imp.delta_f_ab_ghz, "imp.delta_f_ab_ghz");

  const double half_bw_hz = 0.5 * (1.0 + tx.rrc_rolloff) * tx.f_sym_ghz * 1e9;
  g.env_lo_hz = tx.f_shift_ghz * 1e9 - half_bw_hz;
  g.env_hi_hz = tx.f_shift_ghz * 1e9 + half_bw_hz;
  if (g.env_lo_hz < 0.0)
    throw config_error(
        "tx.f_shift_ghz: signal envelope band crosses zero frequency");

  const double ab_hz = sc.imp.delta_f_ab_ghz * 1e9;
  const double nyq_hz = 0.5 * g.fs_adc_hz;
  if (ab_hz - g.env_hi_hz <= 0.0)
    throw config_error("imp.delta_f_ab_ghz: beat tone inside the signal band");
  if (ab_hz - g.env_lo_hz > nyq_hz)
    throw config_error("signal IF band exceeds the ADC Nyquist frequency");
  const double pilot_half_hz = 0.5 * sc.sim.pilot_bw_ghz * 1e9;
  if (ab_hz + pilot_half_hz > nyq_hz)
    throw config_error("pilot band exceeds the ADC Nyquist frequency");
  if (pilot_half_hz > g.env_lo_hz)
    throw config_error("sim.pilot_bw_ghz: pilot band overlaps the signal IF band");

  double va_sum = 0.0;
  for (int k = 0; k < tx.N; ++k) va_sum += tx.va_at(k);
  g.va_mean = va_sum / double(tx.N);
  g.pilot_amp = std::sqrt(std::pow(10.0, sc.imp.pilot_gain_db / 10.0) *
                          g.va_mean / (double(tx.N) * double(g.os_dac)));

  if (sc.imp.dispersion) {
    const double b2 = beta2_from_dispersion(sc.fiber.dispersion_ps_nm_km, 1550.0);
    g.cd_coeff = 2.0 * kPi * kPi * b2 * sc.fiber.length_km * 1e3;
  }

  // deterministic record rms so data and calibration share one range
  const double t_chan = sc.fiber.transmittance();
  const double sigma0 = sc.detector.shot_noise ? 1.0 : 0.0;
  const double rms2 =
      0.5 * sc.detector.eta * t_chan *
          (g.va_mean / double(g.os_dac) + g.pilot_amp * g.pilot_amp) +
      sigma0 * sigma0 * (1.0 + 0.5 * sc.detector.v_el);
  g.quant_range = sc.detector.adc_headroom * std::sqrt(rms2);

  if (sc.imp.channel_noise) {
    const NoiseConfig& nc = sc.noise;
    g.xi_flat = sc.imp.xi_inject >= 0.0
                    ? sc.imp.xi_inject
                    : nc.rin + nc.dac + nc.leakage + nc.mod_er + nc.mod_iq;
  }
  g.leak = std::pow(10.0, -sc.imp.extinction_ratio_db / 20.0);
  return g;
}

RxParams make_rx(const Scenario& sc, const RunGeometry& g, const cvec& ts_ref) {
  RxParams rx;
  rx.n_sub = g.n;
  rx.os_adc = g.os_adc;
  rx.serial_len = g.serial;
  rx.ab_bins = g.ab_bins;
  rx.if_bins = g.ab_bins - g.shift_bins;
  rx.adc_rate_hz = g.fs_adc_hz;
  const double ab_hz = sc.imp.delta_f_ab_ghz * 1e9;
  rx.band_lo_hz = ab_hz - g.env_hi_hz;
  rx.band_hi_hz = ab_hz - g.env_lo_hz;
  rx.pilot_bw_hz = sc.sim.pilot_bw_ghz * 1e9;
  rx.ts_ref = ts_ref;
  rx.sync_threshold = sc.sim.sync_threshold;
  rx.pnc_fast = sc.sim.pnc_fast;

  const std::vector<double> gain =
      rrc_gain(g.len_adc, g.fs_adc_hz, sc.tx.f_sym_ghz * 1e9, sc.tx.rrc_rolloff,
               double(g.os_adc));
  std::vector<double> centers(std::size_t(g.n));
  for (int k = 0; k < g.n; ++k) {
    double fr = double(k) / double(g.n);
    if (fr >= 0.5) fr -= 1.0;
    centers[std::size_t(k)] = fr * sc.tx.f_sym_ghz * 1e9;
  }
  const std::vector<double> phase = piecewise_cd_phase(
      g.len_adc, g.fs_adc_hz, g.cd_coeff, sc.tx.f_shift_ghz * 1e9, centers);
  rx.rx_filter.resize(g.len_adc);
  for (std::size_t i = 0; i < g.len_adc; ++i)
    rx.rx_filter[i] = std::polar(gain[i], -phase[i]);
  return rx;
}

std::vector<double> make_walk(std::size_t len, double lw_hz, double dt_s,
                              std::uint64_t seed) {
  std::vector<double> w(len);
  Rng r(seed);
  const double sd = std::sqrt(2.0 * kPi * lw_hz * dt_s);
  double p = 0.0;
  for (double& v : w) {
    p += sd * r.gauss();
    v = p;
  }
  return w;
}

double det_gain(const Scenario& sc, int b, int blocks) {
  if (sc.detector.gain_drift == 0.0 || blocks < 2) return 1.0;
  return 1.0 +
         sc.detector.gain_drift * (2.0 * double(b) / double(blocks - 1) - 1.0);
}

// Wideband known-symbol probe of the noiseless chain at unit transmittance
// and unit efficiency: amp2 absorbs the shaping cascade and the residual of
// the dispersion correction, which data blocks see identically.
std::vector<double> run_probe(const Scenario& sc, const RunGeometry& g,
                              const TsSequence& ts, const RxParams& rx,
                              std::uint64_t seed) {
  DetectorModel det = sc.detector;
  det.eta = 1.0;
  det.v_el = 0.0;
  det.quantization = false;
  det.shot_noise = false;
  RxParams prx = rx;
  prx.pnc_fast = false;

  ImpairmentState st;
  st.cd_coeff = g.cd_coeff;

  const std::size_t key_frames = g.frames - g.ts_frames;
  std::vector<PairAccumulator> acc(std::size_t(g.n));
  Rng silent(0);
  for (int j = 0; j < 2; ++j) {
    Rng rp(derive_seed(seed, kProbe, std::uint64_t(j)));
    cvec key(key_frames * std::size_t(g.n));
    for (cd& v : key) {
      const double q = double(rp.bits() & 3u);
      v = std::polar(1.0, kPi / 4.0 + q * kPi / 2.0);
    }
    IQFrame sig = apply_channel(mc_generate(key, ts, sc.tx), st, true);
    const IQFrame pil = pilot_tone(sc.tx, 0.0, sig.samples.size());
    const DetectedPair d = heterodyne_detect(
        sig, pil, det, 1.0, sc.imp.delta_f_ab_ghz, 0.0, 0, silent, silent);
    const DemodBlock dem = mc_demodulate(d.y_sig, d.y_pilot, prx, false);
    cvec tx_k(key_frames), rx_k(key_frames);
    for (int k = 0; k < g.n; ++k) {
      for (std::size_t f = 0; f < key_frames; ++f) {
        tx_k[f] = key[f * std::size_t(g.n) + std::size_t(k)];
        rx_k[f] = dem.sym[std::size_t(k)][g.ts_frames + f];
      }
      acc[std::size_t(k)].add(tx_k.data(), rx_k.data(), key_frames);
    }
  }
  std::vector<double> amp2(std::size_t(g.n));
  for (int k = 0; k < g.n; ++k) {
    const PairAccumulator& a = acc[std::size_t(k)];
    amp2[std::size_t(k)] = std::norm(a.s_xy / a.s_tx2);
  }
  return amp2;
}

// Signal-off records: the transmitter output is suppressed to the extinction
// leakage while the pilot keeps running, and the receiver measures its noise
// floor through the unchanged DSP chain. Quantization and the record range
// match the data blocks.
void run_calibration(const Scenario& sc, const RunGeometry& g,
                     const TsSequence& ts, const RxParams& rx,
                     SnuCalibration& cal, std::uint64_t seed,
                     std::uint64_t group_tag, double drift_phase, double gain,
                     bool update_ref) {
  const std::size_t key_frames = g.frames - g.ts_frames;
  const double sqrt_t = std::sqrt(sc.fiber.transmittance());
  std::vector<cvec> off(std::size_t(g.n));
  for (int j = 0; j < sc.sim.calib_blocks; ++j) {
    const std::uint64_t idx = (group_tag << 8) | std::uint64_t(j);
    Rng rs(derive_seed(seed, kCalSym, idx));
    cvec key(key_frames * std::size_t(g.n));
    for (std::size_t f = 0; f < key_frames; ++f)
      for (int k = 0; k < g.n; ++k)
        key[f * std::size_t(g.n) + std::size_t(k)] =
            rs.cgauss(sc.tx.va_at(k));
    IQFrame sig = mc_generate(key, ts, sc.tx);
    for (cd& v : sig.samples) v *= g.leak;

    ImpairmentState st;
    st.cd_coeff = g.cd_coeff;
    st.sqrt_t = sqrt_t;
    st.drift_phase = drift_phase;
    if (sc.imp.phase_noise)
      st.phase_walk = make_walk(g.len_dac, sc.imp.combined_linewidth_hz(),
                                1.0 / g.fs_dac_hz,
                                derive_seed(seed, kCalWalk, idx));
    const IQFrame sigc = apply_channel(sig, st, true);
    const IQFrame pilc = apply_channel(
        pilot_tone(sc.tx, g.pilot_amp, sig.samples.size()), st, false);

    Rng rss(derive_seed(seed, kCalShotSig, idx));
    Rng rsp(derive_seed(seed, kCalShotPilot, idx));
    const DetectedPair d =
        heterodyne_detect(sigc, pilc, sc.detector, gain, sc.imp.delta_f_ab_ghz,
                          g.quant_range, 0, rss, rsp);
    const DemodBlock dem = mc_demodulate(d.y_sig, d.y_pilot, rx, false);
    for (int k = 0; k < g.n; ++k)
      off[std::size_t(k)].insert(off[std::size_t(k)].end(),
                                 dem.sym[std::size_t(k)].begin(),
                                 dem.sym[std::size_t(k)].end());
  }
  calibrate_snu(cal, off, update_ref);
}

} // namespace

SimReport run_simulation(const Scenario& sc, std::uint64_t seed, int blocks,
                         DumpSink* dump) {
  validate(sc);
  if (blocks < 1) throw config_error("blocks must be at least 1");
  const RunGeometry g = make_geometry(sc);
  const std::size_t n = std::size_t(g.n);
  const std::size_t key_frames = g.frames - g.ts_frames;

  const TsSequence ts =
      make_ts(g.n, int(g.ts_frames), sc.sim.ts_amplitude,
              derive_seed(seed, kTs, 0));
  const RxParams rx = make_rx(sc, g, ts_serial(ts, g.n));

  SnuCalibration cal;
  cal.eta = sc.detector.eta;
  cal.amp2 = run_probe(sc, g, ts, rx, seed);

  SimReport rep;
  rep.blocks_requested = blocks;
  rep.seed = seed;
  rep.eta = sc.detector.eta;
  rep.v_el = sc.detector.v_el;

  const bool do_cal = sc.detector.shot_noise;
  if (do_cal && sc.detector.one_time_calibration)
    run_calibration(sc, g, ts, rx, cal, seed, 0, 0.0, det_gain(sc, 0, blocks),
                    true);

  const double sqrt_t = std::sqrt(sc.fiber.transmittance());
  const double block_s = double(g.len_dac) / g.fs_dac_hz;
  const double drift_sd = std::sqrt(2.0 * kPi * sc.imp.slow_drift_hz * block_s);
  Rng rng_drift(derive_seed(seed, kDrift, 0));
  double drift = 0.0;

  // one physical path length per run; the receiver still re-acquires it on
  // every block. A per-block delay would also rotate each block's baseband
  // by carrier x delay and break the training-sequence superposition.
  std::size_t delay = 0;
  if (sc.sim.random_delay)
    delay = Rng(derive_seed(seed, kDelay, 0)).index(g.len_adc);

  const int m_group = std::max(1, sc.sim.m_superimpose);
  std::vector<cd> tap(n, cd(1.0, 0.0));
  bool tap_ready = false;
  std::vector<PairAccumulator> run_acc(n);

  struct BlockBuf {
    int b = 0;
    SyncScan scan;  // downconverted, not yet timed
    cvec key;       // clean frame-major transmit symbols
  };
  cvec tx_k(key_frames), y_ref(key_frames);

  for (int b0 = 0; b0 < blocks; b0 += m_group) {
    const int bend = std::min(blocks, b0 + m_group);
    const std::uint64_t group = std::uint64_t(b0 / m_group);
    if (do_cal && !sc.detector.one_time_calibration)
      run_calibration(sc, g, ts, rx, cal, seed, group + 1, drift,
                      det_gain(sc, b0, blocks), group == 0);

    std::vector<BlockBuf> buf;
    std::vector<cvec> corr_sum(std::size_t(g.os_adc),
                               cvec(g.serial, cd(0.0, 0.0)));
    for (int b = b0; b < bend; ++b) {
      if (sc.imp.phase_noise) drift += drift_sd * rng_drift.gauss();

      Rng rs(derive_seed(seed, kSym, std::uint64_t(b)));
      cvec key(key_frames * n);
      for (std::size_t f = 0; f < key_frames; ++f)
        for (int k = 0; k < g.n; ++k)
          key[f * n + std::size_t(k)] = rs.cgauss(sc.tx.va_at(k));

      // channel excess noise, referred to the transmitted symbols
      TsSequence tsb = ts;
      cvec key_tx = key;
      if (g.xi_flat > 0.0) {
        Rng rn(derive_seed(seed, kChanNoise, std::uint64_t(b)));
        for (std::size_t f = 0; f < g.ts_frames; ++f)
          for (std::size_t k = 0; k < n; ++k)
            tsb.sym[k][f] += rn.cgauss(g.xi_flat);
        for (cd& v : key_tx) v += rn.cgauss(g.xi_flat);
      }

      ImpairmentState st;
      st.sqrt_t = sqrt_t;
      st.cd_coeff = g.cd_coeff;
      st.drift_phase = drift;
      if (sc.imp.phase_noise)
        st.phase_walk = make_walk(g.len_dac, sc.imp.combined_linewidth_hz(),
                                  1.0 / g.fs_dac_hz,
                                  derive_seed(seed, kWalk, std::uint64_t(b)));
      const IQFrame sigc =
          apply_channel(mc_generate(key_tx, tsb, sc.tx), st, true);
      const IQFrame pilc = apply_channel(
          pilot_tone(sc.tx, g.pilot_amp, sigc.samples.size()), st, false);

      Rng rss(derive_seed(seed, kShotSig, std::uint64_t(b)));
      Rng rsp(derive_seed(seed, kShotPilot, std::uint64_t(b)));
      const DetectedPair d = heterodyne_detect(
          sigc, pilc, sc.detector, det_gain(sc, b, blocks),
          sc.imp.delta_f_ab_ghz, g.quant_range, delay, rss, rsp);
      SyncScan scan = mc_downconvert(d.y_sig, d.y_pilot, rx, true);
      for (std::size_t t = 0; t < scan.corr.size(); ++t)
        for (std::size_t m = 0; m < g.serial; ++m)
          corr_sum[t][m] += scan.corr[t][m];
      scan.corr.clear();
      scan.corr.shrink_to_fit();
      buf.push_back(BlockBuf{b, std::move(scan), std::move(key)});
    }

    // timing acquisition integrates the TS correlation coherently over the
    // group (the pilot correction keeps the blocks co-phased), so acceptance
    // improves with the number of superimposed blocks
    const SyncDecision sd =
        sync_decide(corr_sum, sc.sim.sync_threshold);
    if (!sd.ok) {
      rep.sync_failures += int(buf.size());
      continue;
    }
    const int synced = int(buf.size());

    std::vector<std::vector<cvec>> sym(buf.size());
    std::vector<cvec> ts_sum(n, cvec(g.ts_frames, cd(0.0, 0.0)));
    for (std::size_t i = 0; i < buf.size(); ++i) {
      sym[i] = mc_demodulate_at(buf[i].scan, rx, sd.phase, sd.lag).sym;
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t f = 0; f < g.ts_frames; ++f)
          ts_sum[k][f] += sym[i][k][f];
    }

    // averaging the demodulated training frames over the group is the
    // superimposed training sequence (the chain is linear); one-shot LS tap
    // then stochastic refinement
    if (sc.sim.pnc_slow || !tap_ready) {
      for (std::size_t k = 0; k < n; ++k) {
        const cvec& a = ts.sym[k];
        cd num(0.0, 0.0);
        double den = 0.0;
        for (std::size_t f = 0; f < g.ts_frames; ++f) {
          const cd ybar = ts_sum[k][f] / double(synced);
          num += ybar * std::conj(a[f]);
          den += std::norm(a[f]);
        }
        cd c = num / den;
        for (int e = 0; e < sc.sim.lms_epochs; ++e)
          for (std::size_t f = 0; f < g.ts_frames; ++f) {
            const cd ybar = ts_sum[k][f] / double(synced);
            const cd err = ybar - c * a[f];
            c += sc.sim.lms_step * std::conj(a[f]) * err / std::norm(a[f]);
          }
        tap[k] = c;
      }
      tap_ready = true;
    }

    std::vector<PairAccumulator> gacc(n);
    for (std::size_t i = 0; i < buf.size(); ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        // estimation keeps the raw amplitude and removes only the tracked
        // phase; full equalization is for the constellation consumers
        const cd rot = std::polar(1.0, -std::arg(tap[k]));
        for (std::size_t f = 0; f < key_frames; ++f) {
          tx_k[f] = buf[i].key[f * n + k];
          y_ref[f] = sym[i][k][g.ts_frames + f] * rot;
        }
        gacc[k].add(tx_k.data(), y_ref.data(), key_frames);
        run_acc[k].add(tx_k.data(), y_ref.data(), key_frames);
        if (dump) {
          for (std::size_t f = 0; f < g.frames; ++f) {
            const cd y = sym[i][k][f] / tap[k];
            dump->row(buf[i].b, int(k), y.real(), y.imag(), f < g.ts_frames);
          }
        }
      }
    }
    rep.blocks_used += synced;

    double t_sum = 0.0;
    int t_cnt = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (gacc[k].m < 2) continue;
      t_sum += estimate_from(gacc[k], cal, int(k)).t_hat;
      ++t_cnt;
    }
    if (t_cnt > 0) rep.t_hat_by_group.push_back(t_sum / double(t_cnt));
  }

  if (rep.blocks_used == 0)
    throw sim_error("synchronization failed for every block");

  rep.calibrated = cal.valid;
  if (cal.valid) {
    double s_sum = 0.0;
    for (double s : cal.s) s_sum += s;
    rep.snu_unit_mean = s_sum / double(cal.s.size());
  }
  for (std::size_t k = 0; k < n; ++k) {
    const ChannelEstimate e = estimate_from(run_acc[k], cal, int(k));
    SubcarrierResult r;
    r.k = int(k);
    r.t_hat = e.t_hat;
    r.xi_hat = e.xi_hat;
    r.sym_var_snu = e.sym_var / (cal.valid ? cal.s[k] : 1.0);
    r.m = e.m;
    r.h = e.h;
    rep.sub.push_back(r);
  }
  return rep;
}

} // namespace mcqkd::sim
