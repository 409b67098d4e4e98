#include "mcqkd/kernels.hpp"

namespace mcqkd::kern {

namespace ref {

void cmul(cd* dst, const cd* a, const cd* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] * b[i];
}

void cmul_conj(cd* dst, const cd* a, const cd* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] * std::conj(b[i]);
}

cd dot_conj(const cd* a, const cd* b, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const cd p = a[i] * std::conj(b[i]);
    re += p.real();
    im += p.imag();
  }
  return {re, im};
}

double sumsq(const cd* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::norm(a[i]);
  return s;
}

double sumsq(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * a[i];
  return s;
}

void axpy(cd* dst, cd alpha, const cd* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] += alpha * x[i];
}

} // namespace ref

#ifdef MCQKD_HAVE_AVX2_TU
namespace avx2 {
void cmul(cd* dst, const cd* a, const cd* b, std::size_t n);
void cmul_conj(cd* dst, const cd* a, const cd* b, std::size_t n);
cd dot_conj(const cd* a, const cd* b, std::size_t n);
double sumsq(const cd* a, std::size_t n);
double sumsq(const double* a, std::size_t n);
void axpy(cd* dst, cd alpha, const cd* x, std::size_t n);
}
#endif

namespace {

struct Table {
  void (*cmul)(cd*, const cd*, const cd*, std::size_t);
  void (*cmul_conj)(cd*, const cd*, const cd*, std::size_t);
  cd (*dot_conj)(const cd*, const cd*, std::size_t);
  double (*sumsq_c)(const cd*, std::size_t);
  double (*sumsq_r)(const double*, std::size_t);
  void (*axpy)(cd*, cd, const cd*, std::size_t);
};

constexpr Table kScalar{ref::cmul, ref::cmul_conj, ref::dot_conj,
                        ref::sumsq, ref::sumsq, ref::axpy};

#ifdef MCQKD_HAVE_AVX2_TU
constexpr Table kAvx2{avx2::cmul, avx2::cmul_conj, avx2::dot_conj,
                      avx2::sumsq, avx2::sumsq, avx2::axpy};

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}
#endif

struct State {
  Table table;
  Isa isa;
  State() : table(kScalar), isa(Isa::scalar) {
#ifdef MCQKD_HAVE_AVX2_TU
    if (cpu_has_avx2()) {
      table = kAvx2;
      isa = Isa::avx2;
    }
#endif
  }
};

State& state() {
  static State s;
  return s;
}

} // namespace

Isa active() { return state().isa; }

bool select(Isa isa) {
  if (isa == Isa::scalar) {
    state().table = kScalar;
    state().isa = Isa::scalar;
    return true;
  }
#ifdef MCQKD_HAVE_AVX2_TU
  if (isa == Isa::avx2 && cpu_has_avx2()) {
    state().table = kAvx2;
    state().isa = Isa::avx2;
    return true;
  }
#endif
  return false;
}

void cmul(cd* dst, const cd* a, const cd* b, std::size_t n) {
  state().table.cmul(dst, a, b, n);
}
void cmul_conj(cd* dst, const cd* a, const cd* b, std::size_t n) {
  state().table.cmul_conj(dst, a, b, n);
}
cd dot_conj(const cd* a, const cd* b, std::size_t n) {
  return state().table.dot_conj(a, b, n);
}
double sumsq(const cd* a, std::size_t n) { return state().table.sumsq_c(a, n); }
double sumsq(const double* a, std::size_t n) { return state().table.sumsq_r(a, n); }
void axpy(cd* dst, cd alpha, const cd* x, std::size_t n) {
  state().table.axpy(dst, alpha, x, n);
}

} // namespace mcqkd::kern
