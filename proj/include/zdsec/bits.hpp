#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace zdsec {

// Growable bit string, one byte per bit. Sized for desk-scale experiments,
// not bulk storage.
class Bits {
 public:
  Bits() = default;
  explicit Bits(size_t n, int fill = 0) : v_(n, static_cast<uint8_t>(fill & 1)) {}

  static Bits from_string(std::string_view s) {
    Bits b;
    b.v_.reserve(s.size());
    for (char c : s) {
      if (c != '0' && c != '1') throw std::invalid_argument("Bits: expected '0' or '1'");
      b.v_.push_back(static_cast<uint8_t>(c - '0'));
    }
    return b;
  }

  // Big-endian: bit 0 of the string is the most significant bit of value.
  static Bits from_uint(uint64_t value, size_t width) {
    if (width > 63) throw std::invalid_argument("Bits::from_uint: width > 63");
    Bits b;
    b.v_.resize(width);
    for (size_t i = 0; i < width; ++i)
      b.v_[i] = static_cast<uint8_t>((value >> (width - 1 - i)) & 1);
    return b;
  }

  uint64_t to_uint() const {
    if (size() > 63) throw std::invalid_argument("Bits::to_uint: too wide");
    uint64_t v = 0;
    for (uint8_t bit : v_) v = (v << 1) | bit;
    return v;
  }

  void push_back(int bit) { v_.push_back(static_cast<uint8_t>(bit & 1)); }
  void append(const Bits& other) { v_.insert(v_.end(), other.v_.begin(), other.v_.end()); }

  int operator[](size_t i) const { return v_[i]; }
  void set(size_t i, int bit) { v_[i] = static_cast<uint8_t>(bit & 1); }
  void flip(size_t i) { v_[i] ^= 1; }

  size_t size() const { return v_.size(); }
  bool empty() const { return v_.empty(); }

  Bits slice(size_t pos, size_t len) const {
    if (pos + len > v_.size()) throw std::out_of_range("Bits::slice");
    Bits b;
    b.v_.assign(v_.begin() + pos, v_.begin() + pos + len);
    return b;
  }

  std::string to_string() const {
    std::string s(v_.size(), '0');
    for (size_t i = 0; i < v_.size(); ++i) s[i] = static_cast<char>('0' + v_[i]);
    return s;
  }

  // MSB-first packing; the last byte is zero-padded.
  std::vector<uint8_t> packed_bytes() const {
    std::vector<uint8_t> out((v_.size() + 7) / 8, 0);
    for (size_t i = 0; i < v_.size(); ++i)
      if (v_[i]) out[i / 8] |= static_cast<uint8_t>(0x80u >> (i % 8));
    return out;
  }

  friend bool operator==(const Bits& a, const Bits& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Bits& a, const Bits& b) { return !(a == b); }

 private:
  std::vector<uint8_t> v_;
};

}
