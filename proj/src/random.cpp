#include "odoq/random.hpp"

#include <openssl/rand.h>

#include <array>

#include "odoq/errors.hpp"

namespace odoq {

uint8_t RandomSource::u8() {
  uint8_t b;
  fill({&b, 1});
  return b;
}

uint16_t RandomSource::u16() {
  std::array<uint8_t, 2> b{};
  fill(b);
  return static_cast<uint16_t>(b[0] << 8 | b[1]);
}

uint32_t RandomSource::u32() {
  std::array<uint8_t, 4> b{};
  fill(b);
  return static_cast<uint32_t>(b[0]) << 24 | static_cast<uint32_t>(b[1]) << 16 |
         static_cast<uint32_t>(b[2]) << 8 | static_cast<uint32_t>(b[3]);
}

uint64_t RandomSource::u64() {
  return static_cast<uint64_t>(u32()) << 32 | u32();
}

uint64_t RandomSource::below(uint64_t bound) {
  // Rejection sampling keeps the draw unbiased.
  uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  uint64_t v;
  do {
    v = u64();
  } while (v >= limit);
  return v % bound;
}

void SystemRandom::fill(std::span<uint8_t> out) {
  if (out.empty()) return;
  if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
    throw Error("system randomness unavailable");
  }
}

void SeededRandom::fill(std::span<uint8_t> out) {
  size_t i = 0;
  while (i < out.size()) {
    uint64_t v = gen_();
    for (int j = 0; j < 8 && i < out.size(); ++j, ++i) {
      out[i] = static_cast<uint8_t>(v >> (8 * j));
    }
  }
}

}  // namespace odoq
