// Post-processing accounting and privacy amplification. The Toeplitz hash is
// checked bit-for-bit against a dense matrix oracle, for exact linearity, and
// for the pairwise collision bound of the hash family.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "mcqkd/postproc.hpp"
#include "mcqkd/toeplitz.hpp"
#include "oracles.hpp"

using namespace mcqkd;

namespace {

BitBlock random_block(std::mt19937_64& rng, std::size_t nbits) {
  BitBlock b = make_bitblock(nbits);
  for (auto& w : b.words) w = rng();
  if (nbits & 63) b.words.back() &= (std::uint64_t(1) << (nbits & 63)) - 1;
  return b;
}

std::vector<std::uint8_t> unpack(const BitBlock& b) {
  std::vector<std::uint8_t> v(b.nbits);
  for (std::size_t i = 0; i < b.nbits; ++i) v[i] = b.get(i);
  return v;
}

} // namespace

TEST_CASE("default code table is valid and matches the deployment rates") {
  const CodeTable t = default_code_table();
  CHECK_NOTHROW(validate(t));
  REQUIRE(t.entries.size() == 6);
  CHECK(t.entries[0] == std::pair<double, double>{5.0, 0.33});
  CHECK(t.entries[3] == std::pair<double, double>{50.0, 0.07});
  CHECK(t.entries[5] == std::pair<double, double>{100.0, 0.02});
}

TEST_CASE("code rate lookup is exact on the grid and nearest off it") {
  const CodeTable t = default_code_table();
  CHECK(code_rate_for_distance(50.0, t) == 0.07);
  CHECK(code_rate_for_distance(25.0, t) == 0.18);
  CHECK(code_rate_for_distance(30.0, t) == 0.18);   // 25 closer than 50
  CHECK(code_rate_for_distance(40.0, t) == 0.07);   // 50 closer than 25
  CHECK(code_rate_for_distance(37.4, t) == 0.18);
  CHECK(code_rate_for_distance(37.6, t) == 0.07);
  CHECK(code_rate_for_distance(1.0, t) == 0.33);    // clamps to the ends
  CHECK(code_rate_for_distance(500.0, t) == 0.02);
}

TEST_CASE("code table validation rejects malformed tables") {
  CHECK_THROWS_AS(validate(CodeTable{}), std::domain_error);
  CHECK_THROWS_AS(validate(CodeTable{{{10.0, 0.3}, {10.0, 0.2}}}),
                  std::domain_error);
  CHECK_THROWS_AS(validate(CodeTable{{{10.0, 0.0}}}), std::domain_error);
  CHECK_THROWS_AS(validate(CodeTable{{{10.0, 1.0}}}), std::domain_error);
  CHECK_THROWS_AS(validate(CodeTable{{{10.0, 0.2}, {20.0, 0.3}}}),
                  std::domain_error);
}

TEST_CASE("beta ties the code rate to half the channel capacity") {
  std::mt19937_64 rng(0x62657461);
  std::uniform_real_distribution<double> usnr(0.5, 50.0);
  std::uniform_real_distribution<double> ufrac(0.1, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double snr = usnr(rng);
    const double half_i = 0.5 * std::log2(1.0 + snr);
    const double cr = ufrac(rng) * half_i;  // keeps beta feasible
    const double beta = beta_from_code(cr, snr);
    CHECK(beta > 0.0);
    CHECK(beta <= 1.0);
    CHECK(beta * half_i == doctest::Approx(cr).epsilon(1e-12));
  }
  CHECK_THROWS_AS(beta_from_code(0.33, 0.01), infeasible_code);
  CHECK_THROWS_AS(beta_from_code(0.33, 0.0), std::domain_error);
  CHECK_THROWS_AS(beta_from_code(0.0, 1.0), std::domain_error);
}

TEST_CASE("ec leakage accounts for the efficiency gap") {
  CHECK(leak_ec(1e6, 4.0, 0.95, 2.0) ==
        doctest::Approx(1e6 * (4.0 - 1.9)).epsilon(1e-15));
  CHECK(leak_ec(100.0, 2.0, 1.0, 2.0) == 0.0);  // perfect reconciliation
  CHECK_THROWS_AS(leak_ec(1e6, 1.0, 0.95, 2.0), std::domain_error);
  CHECK_THROWS_AS(leak_ec(0.0, 4.0, 0.95, 2.0), std::domain_error);
}

TEST_CASE("fer fit reproduces its anchors") {
  const auto anchors = default_fer_anchors();
  const FerFit fit = fit_fer(anchors);
  CHECK(fit.slope == doctest::Approx(376.49395008800985).epsilon(1e-9));
  CHECK(fit.intercept == doctest::Approx(-353.83361023583814).epsilon(1e-9));
  CHECK(fit.beta_lo == 0.9296);
  CHECK(fit.beta_hi == 0.9311);
  for (const auto& [b, f] : anchors) {
    bool clamped = true;
    CHECK(std::abs(fer_model(b, fit, &clamped) - f) < 5e-4);
    CHECK_FALSE(clamped);
  }
}

TEST_CASE("fer model is monotone and flags extrapolation") {
  const FerFit fit = fit_fer(default_fer_anchors());
  double prev = 0.0;
  for (double b : {0.90, 0.92, 0.93, 0.94, 0.96}) {
    const double f = fer_model(b, fit);
    CHECK(f >= prev);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    prev = f;
  }
  bool clamped = false;
  fer_model(0.90, fit, &clamped);
  CHECK(clamped);
  fer_model(0.94, fit, &clamped);
  CHECK(clamped);
  fer_model(0.9305, fit, &clamped);
  CHECK_FALSE(clamped);
}

TEST_CASE("fer fit rejects degenerate anchor sets") {
  CHECK_THROWS_AS(fit_fer({}), std::domain_error);
  CHECK_THROWS_AS(fit_fer({{0.93, 0.02}, {0.93, 0.03}}), std::domain_error);
  CHECK_THROWS_AS(fit_fer({{0.93, 0.0}}), std::domain_error);
  CHECK_THROWS_AS(fit_fer({{0.93, 1.0}}), std::domain_error);
}

TEST_CASE("bit blocks pack lsb first and round trip through bits") {
  BitBlock b = make_bitblock(70, 3, 42);
  CHECK(b.nbits == 70);
  CHECK(b.words.size() == 2);
  CHECK(b.subcarrier == 3);
  CHECK(b.block_id == 42);
  b.set(0, true);
  b.set(69, true);
  CHECK(b.words[0] == 1u);
  CHECK(b.words[1] == (std::uint64_t(1) << 5));
  const BitBlock c = bitblock_from_bits({1, 0, 1, 1});
  CHECK(c.nbits == 4);
  CHECK(c.get(0));
  CHECK_FALSE(c.get(1));
  CHECK(c.get(2));
  CHECK(c.get(3));
}

TEST_CASE("hex encoding is msb first per nibble and pads the tail") {
  CHECK(to_hex(bitblock_from_bits({1, 0, 1, 1})) == "b");
  CHECK(to_hex(bitblock_from_bits({1, 1, 1, 1, 1})) == "f8");
  CHECK(to_hex(bitblock_from_bits({0, 0, 0, 1, 1, 1, 1, 0})) == "1e");
  CHECK(to_hex(make_bitblock(8)) == "00");
}

TEST_CASE("toeplitz hash matches the dense matrix oracle") {
  std::mt19937_64 rng(0x746f6570);
  auto run_sizes = [&](std::size_t lo, std::size_t hi, int count) {
    std::uniform_int_distribution<std::size_t> un(lo, hi);
    for (int i = 0; i < count; ++i) {
      const std::size_t n = un(rng);
      const std::size_t out_len =
          1 + std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
      const BitBlock x = random_block(rng, n);
      const BitBlock seed = random_block(rng, n + out_len - 1);
      const BitBlock got = toeplitz_pa(x, seed, out_len);
      const std::vector<std::uint8_t> want =
          oracle::toeplitz_dense(unpack(x), unpack(seed), out_len);
      REQUIRE(got.nbits == out_len);
      for (std::size_t j = 0; j < out_len; ++j)
        CHECK(got.get(j) == bool(want[j]));
    }
  };
  run_sizes(1, 64, 200);
  run_sizes(65, 1024, 150);
  run_sizes(1025, 4096, 50);
}

TEST_CASE("toeplitz hash is linear over gf2") {
  std::mt19937_64 rng(0x6c696e65);
  const std::size_t n = 256, out = 64;
  for (int i = 0; i < 100; ++i) {
    const BitBlock x = random_block(rng, n);
    const BitBlock y = random_block(rng, n);
    const BitBlock seed = random_block(rng, n + out - 1);
    BitBlock z = make_bitblock(n);
    for (std::size_t w = 0; w < z.words.size(); ++w)
      z.words[w] = x.words[w] ^ y.words[w];
    const BitBlock tx = toeplitz_pa(x, seed, out);
    const BitBlock ty = toeplitz_pa(y, seed, out);
    const BitBlock tz = toeplitz_pa(z, seed, out);
    CHECK(tz.words[0] == (tx.words[0] ^ ty.words[0]));
  }
}

TEST_CASE("collision rate of distinct inputs meets the universality bound") {
  std::mt19937_64 rng(0x636f6c6c);
  const std::size_t n = 64, out = 8;
  BitBlock x = make_bitblock(n), y = make_bitblock(n);
  x.words[0] = 0xdeadbeefcafef00dULL;
  y.words[0] = 0x0123456789abcdefULL;
  const int trials = 100000;
  int collisions = 0;
  for (int i = 0; i < trials; ++i) {
    const BitBlock seed = random_block(rng, n + out - 1);
    if (toeplitz_pa(x, seed, out).words[0] ==
        toeplitz_pa(y, seed, out).words[0])
      ++collisions;
  }
  // pairwise collision probability is exactly 2^-out; allow five sigma
  const double p = std::ldexp(1.0, -int(out));
  const double bound = trials * p + 5.0 * std::sqrt(trials * p * (1.0 - p));
  CHECK(double(collisions) <= bound);
  CHECK(collisions > 0);  // sanity: the statistic is not degenerate
}

TEST_CASE("toeplitz rejects inconsistent shapes") {
  std::mt19937_64 rng(1);
  const BitBlock x = random_block(rng, 100);
  const BitBlock seed = random_block(rng, 100 + 40 - 1);
  CHECK_THROWS_AS(toeplitz_pa(x, seed, 41), seed_length_mismatch);
  CHECK_THROWS_AS(toeplitz_pa(x, seed, 0), std::domain_error);
  CHECK_THROWS_AS(toeplitz_pa(x, seed, 101), std::domain_error);
  CHECK_THROWS_AS(toeplitz_pa(make_bitblock(0), seed, 1), std::domain_error);
}

TEST_CASE("toeplitz output keeps the block identity") {
  std::mt19937_64 rng(2);
  BitBlock x = random_block(rng, 128);
  x.subcarrier = 4;
  x.block_id = 1234;
  const BitBlock seed = random_block(rng, 128 + 32 - 1);
  const BitBlock out = toeplitz_pa(x, seed, 32);
  CHECK(out.subcarrier == 4);
  CHECK(out.block_id == 1234);
  CHECK(out.nbits == 32);
}
