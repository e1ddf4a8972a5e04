#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace odoq {

// Source of randomness threaded through every operation that needs it, so
// scenario runs can be made bit-reproducible by seeding.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual void fill(std::span<uint8_t> out) = 0;

  uint8_t u8();
  uint16_t u16();
  uint32_t u32();
  uint64_t u64();
  // Uniform in [0, bound). bound must be nonzero.
  uint64_t below(uint64_t bound);
};

// OS randomness (OpenSSL RAND_bytes).
class SystemRandom final : public RandomSource {
 public:
  void fill(std::span<uint8_t> out) override;
};

// Deterministic stream from a fixed seed; identical on every platform.
class SeededRandom final : public RandomSource {
 public:
  explicit SeededRandom(uint64_t seed) : gen_(seed) {}
  void fill(std::span<uint8_t> out) override;

 private:
  std::mt19937_64 gen_;
};

}  // namespace odoq
