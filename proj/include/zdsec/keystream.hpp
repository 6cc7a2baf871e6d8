#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "zdsec/bits.hpp"
#include "zdsec/errors.hpp"

namespace zdsec {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

namespace detail {

// Bit source: either a counter-mode PRG (random access by block index, so a
// stream is reproducible bit-for-bit from its seed alone) or a replay buffer
// for exhaustive enumeration.
class BitTape {
 public:
  static BitTape prg(uint64_t key) {
    BitTape t;
    t.key_ = key;
    t.replay_ = false;
    return t;
  }

  static BitTape replay(Bits bits) {
    BitTape t;
    t.buf_ = std::move(bits);
    t.replay_ = true;
    return t;
  }

  int next_bit() {
    if (replay_) {
      if (pos_ >= buf_.size()) throw TapeExhausted("BitTape: replay buffer exhausted");
      return buf_[pos_++];
    }
    uint64_t block = splitmix64(key_ + (pos_ / 64 + 1) * 0x9E3779B97F4A7C15ull);
    int bit = static_cast<int>((block >> (63 - pos_ % 64)) & 1);
    ++pos_;
    return bit;
  }

 private:
  uint64_t key_ = 0;
  Bits buf_;
  size_t pos_ = 0;
  bool replay_ = false;
};

inline constexpr uint64_t kKeyDomain = 0x4B45595354524541ull;   // "KEYSTREA"
inline constexpr uint64_t kPrivDomain = 0x5052495652414E44ull;  // "PRIVRAND"

}  // namespace detail

// Shared secret key bit stream with per-stage consumption accounting.
// Encoder and decoder each construct one from the same seed and stay in
// lockstep as long as they consume identically.
class KeyStream {
 public:
  explicit KeyStream(uint64_t seed)
      : tape_(detail::BitTape::prg(splitmix64(seed ^ detail::kKeyDomain))) {}

  static KeyStream from_bits(Bits bits) { return KeyStream(detail::BitTape::replay(std::move(bits))); }

  int next_bit() {
    ++consumed_;
    return tape_.next_bit();
  }

  Bits next_bits(size_t n) {
    Bits out;
    for (size_t i = 0; i < n; ++i) out.push_back(next_bit());
    return out;
  }

  // Closes the current stage: records the bits consumed since the last mark.
  void mark_stage() {
    per_stage_.push_back(consumed_ - stage_start_);
    stage_start_ = consumed_;
  }

  uint64_t consumed_bits() const { return consumed_; }
  const std::vector<uint64_t>& per_stage_consumption() const { return per_stage_; }

 private:
  explicit KeyStream(detail::BitTape tape) : tape_(std::move(tape)) {}

  detail::BitTape tape_;
  uint64_t consumed_ = 0;
  uint64_t stage_start_ = 0;
  std::vector<uint64_t> per_stage_;
};

// Encoder-local randomness (padding), never shared with the decoder. Seeded
// in a domain distinct from KeyStream so the two streams are unrelated even
// under the same seed.
class PrivateRandomness {
 public:
  explicit PrivateRandomness(uint64_t seed)
      : tape_(detail::BitTape::prg(splitmix64(seed ^ detail::kPrivDomain))) {}

  static PrivateRandomness from_bits(Bits bits) {
    return PrivateRandomness(detail::BitTape::replay(std::move(bits)));
  }

  int next_bit() {
    ++consumed_;
    return tape_.next_bit();
  }

  Bits next_bits(size_t n) {
    Bits out;
    for (size_t i = 0; i < n; ++i) out.push_back(next_bit());
    return out;
  }

  uint64_t consumed_bits() const { return consumed_; }

 private:
  explicit PrivateRandomness(detail::BitTape tape) : tape_(std::move(tape)) {}

  detail::BitTape tape_;
  uint64_t consumed_ = 0;
};

inline double key_rate(const KeyStream& stream, uint64_t n_stages) {
  if (n_stages == 0) throw std::invalid_argument("key_rate: zero stages");
  return static_cast<double>(stream.consumed_bits()) / static_cast<double>(n_stages);
}

}
