#include "mcqkd/sim/dsp.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>

namespace mcqkd::sim {

namespace {

constexpr double kPi = 3.14159265358979323846;

// One cached plan pair per length, always executed on the same aligned
// buffers. FFTW planning is not thread-safe and plan choice can depend on
// buffer alignment, so a single lock serializes transforms; the simulator is
// block-sequential anyway.
struct PlanEntry {
  fftw_complex* buf = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

std::mutex g_fft_mutex;
std::map<std::size_t, PlanEntry>& plan_cache() {
  static std::map<std::size_t, PlanEntry> cache;
  return cache;
}

PlanEntry& plan_for(std::size_t n) {
  auto& cache = plan_cache();
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  PlanEntry e;
  e.buf = fftw_alloc_complex(n);
  if (!e.buf) throw std::bad_alloc();
  e.fwd = fftw_plan_dft_1d(int(n), e.buf, e.buf, FFTW_FORWARD, FFTW_ESTIMATE);
  e.bwd = fftw_plan_dft_1d(int(n), e.buf, e.buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  return cache.emplace(n, e).first->second;
}

cvec transform(const cvec& x, bool forward) {
  if (x.empty()) return {};
  std::lock_guard<std::mutex> lock(g_fft_mutex);
  PlanEntry& e = plan_for(x.size());
  std::memcpy(e.buf, x.data(), x.size() * sizeof(fftw_complex));
  fftw_execute(forward ? e.fwd : e.bwd);
  cvec y(x.size());
  std::memcpy(y.data(), e.buf, x.size() * sizeof(fftw_complex));
  if (!forward) {
    const double inv = 1.0 / double(x.size());
    for (cd& v : y) v *= inv;
  }
  return y;
}

} // namespace

cvec fft(const cvec& x) { return transform(x, true); }
cvec ifft(const cvec& x) { return transform(x, false); }

double bin_freq_hz(std::size_t k, std::size_t len, double fs_hz) {
  const double idx = (k <= len / 2) ? double(k) : double(k) - double(len);
  return idx * fs_hz / double(len);
}

cvec analytic(const std::vector<double>& r) {
  const std::size_t n = r.size();
  cvec x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = cd(r[i], 0.0);
  cvec s = fft(x);
  for (std::size_t k = 1; k < (n + 1) / 2; ++k) s[k] *= 2.0;
  for (std::size_t k = n / 2 + 1; k < n; ++k) s[k] = 0.0;
  return ifft(s);
}

void rotate_tone(cvec& x, long bins) {
  const std::size_t n = x.size();
  if (n == 0 || bins % long(n) == 0) return;
  const double w = 2.0 * kPi * double(bins) / double(n);
  const cd step = std::polar(1.0, w);
  cd ph(1.0, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] *= ph;
    ph *= step;
    if ((i & 0xFFu) == 0xFFu) ph = std::polar(1.0, w * double(i + 1));
  }
}

cvec resample_fft(const cvec& x, std::size_t len_out) {
  const std::size_t li = x.size();
  if (li == 0 || len_out == li) return x;
  cvec s = fft(x);
  cvec t(len_out, cd(0.0, 0.0));
  const std::size_t half = std::min(li, len_out) / 2;
  for (std::size_t k = 0; k < half; ++k) t[k] = s[k];
  for (std::size_t k = 1; k < half; ++k) t[len_out - k] = s[li - k];
  // shared Nyquist bin: split when growing, fold when shrinking
  if (len_out > li && li % 2 == 0) {
    t[half] = 0.5 * s[half];
    t[len_out - half] = 0.5 * s[half];
  } else if (len_out < li && len_out % 2 == 0) {
    t[half] = s[half] + s[li - half];
  }
  cvec y = ifft(t);
  const double scale = double(len_out) / double(li);
  for (cd& v : y) v *= scale;
  return y;
}

std::vector<double> rrc_gain(std::size_t len, double fs_hz, double sym_hz,
                             double rolloff, double os) {
  std::vector<double> g(len, 0.0);
  const double f1 = 0.5 * (1.0 - rolloff) * sym_hz;
  const double f2 = 0.5 * (1.0 + rolloff) * sym_hz;
  for (std::size_t k = 0; k < len; ++k) {
    const double f = std::fabs(bin_freq_hz(k, len, fs_hz));
    double h;
    if (f <= f1) {
      h = 1.0;
    } else if (f < f2 && rolloff > 0.0) {
      h = 0.5 * (1.0 + std::cos(kPi / (rolloff * sym_hz) * (f - f1)));
    } else {
      h = 0.0;
    }
    g[k] = std::sqrt(os * h);
  }
  return g;
}

void apply_gain(cvec& spec, const std::vector<double>& gain) {
  if (spec.size() != gain.size())
    throw std::invalid_argument("apply_gain: length mismatch");
  for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= gain[k];
}

void bandpass(cvec& spec, double fs_hz, double lo_hz, double hi_hz) {
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double f = bin_freq_hz(k, spec.size(), fs_hz);
    if (f < lo_hz || f > hi_hz) spec[k] = 0.0;
  }
}

double beta2_from_dispersion(double d_ps_nm_km, double lambda_nm) {
  const double d_si = d_ps_nm_km * 1e-6;  // s/m^2
  const double lambda = lambda_nm * 1e-9;
  const double c0 = 299792458.0;
  return -d_si * lambda * lambda / (2.0 * kPi * c0);
}

void cd_apply(cvec& x, double fs_hz, double a_coeff) {
  if (a_coeff == 0.0 || x.empty()) return;
  cvec s = fft(x);
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double f = bin_freq_hz(k, s.size(), fs_hz);
    s[k] *= std::polar(1.0, a_coeff * f * f);
  }
  x = ifft(s);
}

std::vector<double> piecewise_cd_phase(std::size_t len, double fs_hz,
                                       double a_coeff, double f_shift_hz,
                                       const std::vector<double>& centers_hz) {
  std::vector<double> phase(len, 0.0);
  if (a_coeff == 0.0 || centers_hz.empty()) return phase;
  std::vector<double> centers = centers_hz;
  std::sort(centers.begin(), centers.end());
  for (std::size_t k = 0; k < len; ++k) {
    const double f = bin_freq_hz(k, len, fs_hz);
    // segment of the nearest center, boundaries at midpoints
    std::size_t j = 0;
    while (j + 1 < centers.size() && f > 0.5 * (centers[j] + centers[j + 1]))
      ++j;
    const double c = centers[j] + f_shift_hz;
    phase[k] = a_coeff * (c * c + 2.0 * c * (f - centers[j]));
  }
  return phase;
}

void cd_correct(cvec& x, double fs_hz, double a_coeff, double f_shift_hz,
                const std::vector<double>& centers_hz) {
  if (a_coeff == 0.0 || x.empty() || centers_hz.empty()) return;
  const std::vector<double> phase =
      piecewise_cd_phase(x.size(), fs_hz, a_coeff, f_shift_hz, centers_hz);
  cvec s = fft(x);
  for (std::size_t k = 0; k < s.size(); ++k)
    s[k] *= std::polar(1.0, -phase[k]);
  x = ifft(s);
}

} // namespace mcqkd::sim
