#pragma once
// Toeplitz-hash privacy amplification over GF(2). Semantics: with input length
// n and output length r, the seed holds n+r-1 bits and output bit j is the
// parity of AND between the input and the j-th diagonal slice of the seed,
// matrix entry M[j][i] = seed[(n-1) + j - i].

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcqkd {

// Bits packed LSB-first into 64-bit words: bit i lives at words[i/64] >> (i%64).
struct BitBlock {
  std::vector<std::uint64_t> words;
  std::size_t nbits = 0;
  int subcarrier = 0;
  std::int64_t block_id = 0;

  bool get(std::size_t i) const { return (words[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i, bool v) {
    if (v)
      words[i >> 6] |= std::uint64_t(1) << (i & 63);
    else
      words[i >> 6] &= ~(std::uint64_t(1) << (i & 63));
  }
};

BitBlock make_bitblock(std::size_t nbits, int subcarrier = 0,
                       std::int64_t block_id = 0);
BitBlock bitblock_from_bits(const std::vector<std::uint8_t>& bits);

struct seed_length_mismatch : std::runtime_error {
  seed_length_mismatch() : std::runtime_error(
      "toeplitz seed length must equal input length + output length - 1") {}
};

BitBlock toeplitz_pa(const BitBlock& block, const BitBlock& seed,
                     std::size_t out_len);

// Hex encoding of the packed bits, MSB-first within the block, for key output.
std::string to_hex(const BitBlock& b);

} // namespace mcqkd
