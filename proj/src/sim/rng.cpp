#include "mcqkd/sim/rng.hpp"

#include <cmath>

namespace mcqkd::sim {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                          std::uint64_t index) {
  std::uint64_t s = base;
  std::uint64_t a = splitmix64(s);
  s ^= stream * 0xD1342543DE82EF95ull;
  std::uint64_t b = splitmix64(s);
  s ^= index * 0xB5026F5AA96619E9ull;
  std::uint64_t c = splitmix64(s);
  return a ^ (b + 0x9E3779B97F4A7C15ull * c);
}

double Rng::gauss() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // u1 in (0,1] keeps the log finite
  const double u1 = double((eng_() >> 11) + 1) * 0x1.0p-53;
  const double u2 = double(eng_() >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double th = 2.0 * 3.14159265358979323846 * u2;
  spare_ = r * std::sin(th);
  have_spare_ = true;
  return r * std::cos(th);
}

std::complex<double> Rng::cgauss(double var) {
  const double s = std::sqrt(0.5 * var);
  const double re = gauss();
  const double im = gauss();
  return {s * re, s * im};
}

std::uint64_t Rng::index(std::uint64_t n) {
  // Lemire multiply-shift; the residual modulo bias is O(n/2^64).
  const unsigned __int128 m = (unsigned __int128)bits() * (unsigned __int128)n;
  return std::uint64_t(m >> 64);
}

} // namespace mcqkd::sim
