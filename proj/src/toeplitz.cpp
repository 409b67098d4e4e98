#include "mcqkd/toeplitz.hpp"

namespace mcqkd {

namespace {

std::size_t word_count(std::size_t nbits) { return (nbits + 63) / 64; }

// Clears pad bits above nbits so word-wise parity sees only real bits.
void mask_tail(BitBlock& b) {
  if (b.nbits & 63) {
    const std::uint64_t mask = (std::uint64_t(1) << (b.nbits & 63)) - 1;
    b.words.back() &= mask;
  }
}

} // namespace

BitBlock make_bitblock(std::size_t nbits, int subcarrier, std::int64_t block_id) {
  BitBlock b;
  b.nbits = nbits;
  b.words.assign(word_count(nbits), 0);
  b.subcarrier = subcarrier;
  b.block_id = block_id;
  return b;
}

BitBlock bitblock_from_bits(const std::vector<std::uint8_t>& bits) {
  BitBlock b = make_bitblock(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) b.set(i, true);
  return b;
}

BitBlock toeplitz_pa(const BitBlock& block, const BitBlock& seed,
                     std::size_t out_len) {
  const std::size_t n = block.nbits;
  if (n == 0) throw std::domain_error("toeplitz_pa: empty input block");
  if (out_len == 0 || out_len > n)
    throw std::domain_error("toeplitz_pa: out_len must be in [1, input length]");
  if (seed.nbits != n + out_len - 1) throw seed_length_mismatch();

  // out[j] = parity(x AND seed[j .. j+n-1 :: reversed-by-index]). With the
  // seed reversed once up front this becomes a sliding window at shift
  // s = out_len-1-j, so each output bit costs one masked word pass.
  const std::size_t L = seed.nbits;
  std::vector<std::uint64_t> rev(word_count(L) + 1, 0);
  for (std::size_t i = 0; i < L; ++i) {
    if (seed.get(L - 1 - i)) rev[i >> 6] |= std::uint64_t(1) << (i & 63);
  }

  const std::size_t xw = word_count(n);
  BitBlock out = make_bitblock(out_len, block.subcarrier, block.block_id);
  for (std::size_t j = 0; j < out_len; ++j) {
    const std::size_t s = out_len - 1 - j;
    const std::size_t wo = s >> 6;
    const unsigned bo = unsigned(s & 63);
    std::uint64_t acc = 0;
    for (std::size_t t = 0; t < xw; ++t) {
      std::uint64_t win = rev[wo + t] >> bo;
      if (bo) win |= rev[wo + t + 1] << (64 - bo);
      // block.words keeps pad bits above nbits zero, so no tail mask needed.
      acc ^= win & block.words[t];
    }
    if (__builtin_parityll(acc)) out.set(j, true);
  }
  mask_tail(out);
  return out;
}

std::string to_hex(const BitBlock& b) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  s.reserve((b.nbits + 3) / 4);
  for (std::size_t t = 0; t < b.nbits; t += 4) {
    unsigned nib = 0;
    for (unsigned k = 0; k < 4; ++k) {
      nib <<= 1;
      if (t + k < b.nbits && b.get(t + k)) nib |= 1;
    }
    s.push_back(digits[nib]);
  }
  return s;
}

} // namespace mcqkd
