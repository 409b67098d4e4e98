// AVX2+FMA variants. Compiled with -mavx2 -mfma in this TU only; callers reach
// them through the runtime dispatch table in kernels.cpp.

#include "mcqkd/kernels.hpp"

#include <immintrin.h>

namespace mcqkd::kern::avx2 {

namespace {

// Two complex doubles per 256-bit lane pair: [re0 im0 re1 im1].
// For p = a*b:       even lanes re = ar*br - ai*bi, odd lanes im = ar*bi + ai*br.
// For p = a*conj(b): even lanes re = ar*br + ai*bi, odd lanes im = ai*br - ar*bi.
inline __m256d cmul2(__m256d va, __m256d vb) {
  const __m256d br = _mm256_movedup_pd(vb);
  const __m256d bi = _mm256_permute_pd(vb, 0xF);
  const __m256d asw = _mm256_permute_pd(va, 0x5);
  return _mm256_fmaddsub_pd(va, br, _mm256_mul_pd(asw, bi));
}

inline __m256d cmul_conj2(__m256d va, __m256d vb) {
  const __m256d br = _mm256_movedup_pd(vb);
  const __m256d bi = _mm256_permute_pd(vb, 0xF);
  const __m256d asw = _mm256_permute_pd(va, 0x5);
  return _mm256_fmsubadd_pd(va, br, _mm256_mul_pd(asw, bi));
}

inline const double* dp(const cd* p) { return reinterpret_cast<const double*>(p); }
inline double* dp(cd* p) { return reinterpret_cast<double*>(p); }

} // namespace

void cmul(cd* dst, const cd* a, const cd* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(dp(a + i));
    const __m256d vb = _mm256_loadu_pd(dp(b + i));
    _mm256_storeu_pd(dp(dst + i), cmul2(va, vb));
  }
  for (; i < n; ++i) dst[i] = a[i] * b[i];
}

void cmul_conj(cd* dst, const cd* a, const cd* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(dp(a + i));
    const __m256d vb = _mm256_loadu_pd(dp(b + i));
    _mm256_storeu_pd(dp(dst + i), cmul_conj2(va, vb));
  }
  for (; i < n; ++i) dst[i] = a[i] * std::conj(b[i]);
}

cd dot_conj(const cd* a, const cd* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(dp(a + i));
    const __m256d vb = _mm256_loadu_pd(dp(b + i));
    acc = _mm256_add_pd(acc, cmul_conj2(va, vb));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double re = lanes[0] + lanes[2];
  double im = lanes[1] + lanes[3];
  for (; i < n; ++i) {
    const cd p = a[i] * std::conj(b[i]);
    re += p.real();
    im += p.imag();
  }
  return {re, im};
}

namespace {

double sumsq_raw(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = (lanes[0] + lanes[2]) + (lanes[1] + lanes[3]);
  for (; i < n; ++i) s += x[i] * x[i];
  return s;
}

} // namespace

double sumsq(const cd* a, std::size_t n) { return sumsq_raw(dp(a), 2 * n); }
double sumsq(const double* a, std::size_t n) { return sumsq_raw(a, n); }

void axpy(cd* dst, cd alpha, const cd* x, std::size_t n) {
  const __m256d ar = _mm256_set1_pd(alpha.real());
  const __m256d ai4 = _mm256_set1_pd(alpha.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d vx = _mm256_loadu_pd(dp(x + i));
    const __m256d xsw = _mm256_permute_pd(vx, 0x5);
    const __m256d prod = _mm256_fmaddsub_pd(vx, ar, _mm256_mul_pd(xsw, ai4));
    const __m256d vd = _mm256_loadu_pd(dp(dst + i));
    _mm256_storeu_pd(dp(dst + i), _mm256_add_pd(vd, prod));
  }
  for (; i < n; ++i) dst[i] += alpha * x[i];
}

} // namespace mcqkd::kern::avx2
