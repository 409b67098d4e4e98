#pragma once
// Data-parallel arithmetic kernels used by the DSP inner loops.
// Scalar reference versions always exist; wider variants are selected at
// runtime when the CPU supports them. All variants agree to rounding noise
// (reductions reassociate, so bit-equality is not promised).

#include <complex>
#include <cstddef>

namespace mcqkd::kern {

using cd = std::complex<double>;

enum class Isa { scalar, avx2 };

Isa active();
// Returns false (and leaves the selection unchanged) if the requested ISA is
// not available on this CPU/build. scalar always succeeds.
bool select(Isa isa);

// dst[i] = a[i] * b[i]
void cmul(cd* dst, const cd* a, const cd* b, std::size_t n);
// dst[i] = a[i] * conj(b[i])
void cmul_conj(cd* dst, const cd* a, const cd* b, std::size_t n);
// sum_i a[i] * conj(b[i])
cd dot_conj(const cd* a, const cd* b, std::size_t n);
// sum_i |a[i]|^2
double sumsq(const cd* a, std::size_t n);
double sumsq(const double* a, std::size_t n);
// dst[i] += alpha * x[i]
void axpy(cd* dst, cd alpha, const cd* x, std::size_t n);

namespace ref {
void cmul(cd* dst, const cd* a, const cd* b, std::size_t n);
void cmul_conj(cd* dst, const cd* a, const cd* b, std::size_t n);
cd dot_conj(const cd* a, const cd* b, std::size_t n);
double sumsq(const cd* a, std::size_t n);
double sumsq(const double* a, std::size_t n);
void axpy(cd* dst, cd alpha, const cd* x, std::size_t n);
}

} // namespace mcqkd::kern
