#include "mcqkd/sim/estimate.hpp"

#include <algorithm>
#include <cmath>

#include "mcqkd/kernels.hpp"

namespace mcqkd::sim {

void calibrate_snu(SnuCalibration& cal,
                   const std::vector<cvec>& off_symbols, bool update_ref) {
  if (off_symbols.empty() || off_symbols[0].empty())
    throw std::domain_error("calibrate_snu: no off segment found");
  const std::size_t n = off_symbols.size();
  // one detector, one unit: the matched filter leaves the noise floor white
  // across serial symbols, so the frame transform spreads it evenly over the
  // subcarriers and pooling them estimates the single physical scale
  double sum = 0.0;
  std::size_t cnt = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const cvec& v = off_symbols[k];
    if (v.empty()) throw std::domain_error("calibrate_snu: no off segment found");
    sum += kern::sumsq(v.data(), v.size());
    cnt += v.size();
  }
  cal.s.assign(n, 0.5 * sum / double(cnt));
  if (update_ref || cal.s_ref.size() != n) cal.s_ref = cal.s;
  cal.valid = true;
}

void PairAccumulator::add(const cd* tx, const cd* rx, std::size_t n) {
  s_tx2 += kern::sumsq(tx, n);
  s_rx2 += kern::sumsq(rx, n);
  s_xy += kern::dot_conj(rx, tx, n);
  m += n;
}

ChannelEstimate estimate_from(const PairAccumulator& acc,
                              const SnuCalibration& cal, int subcarrier) {
  if (acc.m < 2) throw std::domain_error("estimate_from: need at least 2 pairs");
  if (!(acc.s_tx2 > 0.0))
    throw std::domain_error("estimate_from: degenerate tx variance");

  ChannelEstimate e;
  e.m = acc.m;
  e.h = acc.s_xy / acc.s_tx2;

  // sum |rx - h tx|^2 = s_rx2 - |s_xy|^2 / s_tx2 at the LS optimum; one
  // complex parameter consumed
  const double rsum =
      std::max(0.0, acc.s_rx2 - std::norm(acc.s_xy) / acc.s_tx2);
  e.resid_var = rsum / double(acc.m - 1);
  e.sym_var = acc.s_rx2 / double(acc.m);

  const std::size_t k = std::size_t(subcarrier);
  const double amp2 = k < cal.amp2.size() ? cal.amp2[k] : 1.0;
  const double s = cal.valid && k < cal.s.size() ? cal.s[k] : 0.0;
  const double s_ref = cal.valid && k < cal.s_ref.size() ? cal.s_ref[k] : 0.0;
  // unit drift between calibration and reference rescales the apparent gain
  const double gain_ratio = (cal.valid && s_ref > 0.0) ? s / s_ref : 1.0;

  const double h2 = std::norm(e.h);
  e.t_hat = h2 / (cal.eta * amp2 * gain_ratio);
  const double floor = cal.valid ? 2.0 * s : 0.0;
  e.xi_hat = h2 > 0.0 ? (e.resid_var - floor) / h2 : 0.0;
  return e;
}

ChannelEstimate estimate_channel(const cvec& tx, const cvec& rx,
                                 const SnuCalibration& cal, int subcarrier) {
  if (tx.size() != rx.size())
    throw std::domain_error("estimate_channel: length mismatch");
  PairAccumulator acc;
  acc.add(tx.data(), rx.data(), tx.size());
  return estimate_from(acc, cal, subcarrier);
}

} // namespace mcqkd::sim
