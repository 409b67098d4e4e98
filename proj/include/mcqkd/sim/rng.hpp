#pragma once
// Seeded draws for the Monte-Carlo chain. Uniform and Gaussian variates are
// generated explicitly (53-bit mantissa fill, Box-Muller) instead of through
// std::*_distribution so that streams are identical across standard library
// implementations.

#include <complex>
#include <cstdint>
#include <random>

namespace mcqkd::sim {

std::uint64_t splitmix64(std::uint64_t& state);

// Decorrelated seed for (stream, index) under one run seed. Every consumer of
// randomness in a run owns a distinct stream id, so adding a draw to one
// consumer never shifts another's sequence.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                          std::uint64_t index);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t bits() { return eng_(); }

  // [0,1), 53-bit resolution
  double uniform() {
    return double(eng_() >> 11) * 0x1.0p-53;
  }

  double gauss();

  // complex Gaussian with total variance var (var/2 per quadrature)
  std::complex<double> cgauss(double var);

  // integer in [0,n); multiply-shift map of one 64-bit draw
  std::uint64_t index(std::uint64_t n);

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

} // namespace mcqkd::sim
