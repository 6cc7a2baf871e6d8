#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "zdsec/codes.hpp"
#include "zdsec/errors.hpp"
#include "zdsec/keystream.hpp"

namespace zdsec {

// Concatenated encrypted codewords plus bookkeeping. stage_offsets is
// encoder/decoder state only; an eavesdropper's view is the flat bit string
// and its length, nothing else.
struct BitStream {
  Bits bits;
  std::vector<size_t> stage_offsets;  // start of each stage's codeword
};

// Zero-delay variable-length scheme: each symbol's Huffman codeword is
// XORed with fresh key bits and appended. No framing, no padding; the symbol
// count need not be known in advance.
class StreamEncoder {
 public:
  StreamEncoder(InstantaneousCode code, KeyStream key)
      : code_(std::move(code)), key_(std::move(key)) {}

  void push(int x) {
    out_.stage_offsets.push_back(out_.bits.size());
    const Bits& cw = code_.codeword(static_cast<size_t>(x));
    for (size_t i = 0; i < cw.size(); ++i) out_.bits.push_back(cw[i] ^ key_.next_bit());
    key_.mark_stage();
    ++n_;
  }

  size_t symbols() const { return n_; }
  const BitStream& stream() const { return out_; }
  const KeyStream& key() const { return key_; }
  BitStream take() { return std::move(out_); }

  double coding_rate() const {
    return n_ == 0 ? 0.0 : static_cast<double>(out_.bits.size()) / static_cast<double>(n_);
  }

 private:
  InstantaneousCode code_;
  KeyStream key_;
  BitStream out_;
  size_t n_ = 0;
};

class StreamDecoder {
 public:
  StreamDecoder(InstantaneousCode code, KeyStream key)
      : code_(std::move(code)), key_(std::move(key)) {}

  // Decodes exactly n symbols starting at the current position.
  std::vector<int> pull(const Bits& bits, size_t n) {
    std::vector<int> out;
    out.reserve(n);
    for (size_t t = 0; t < n; ++t) {
      int node = code_.root();
      int sym = -1;
      while (sym < 0) {
        if (pos_ >= bits.size()) throw DesyncError("decode_stream: bit stream truncated");
        node = code_.step(node, bits[pos_++] ^ key_.next_bit());
        if (node < 0) throw DesyncError("decode_stream: no codeword under key stream");
        sym = code_.symbol_at(node);
      }
      key_.mark_stage();
      out.push_back(sym);
    }
    return out;
  }

  size_t position() const { return pos_; }

 private:
  InstantaneousCode code_;
  KeyStream key_;
  size_t pos_ = 0;
};

inline BitStream encode_stream(const InstantaneousCode& code, const std::vector<int>& xs,
                               KeyStream& key) {
  BitStream out;
  for (int x : xs) {
    out.stage_offsets.push_back(out.bits.size());
    const Bits& cw = code.codeword(static_cast<size_t>(x));
    for (size_t i = 0; i < cw.size(); ++i) out.bits.push_back(cw[i] ^ key.next_bit());
    key.mark_stage();
  }
  return out;
}

inline std::vector<int> decode_stream(const InstantaneousCode& code, const Bits& bits,
                                      KeyStream& key, size_t n) {
  std::vector<int> out;
  out.reserve(n);
  size_t pos = 0;
  for (size_t t = 0; t < n; ++t) {
    int node = code.root();
    int sym = -1;
    while (sym < 0) {
      if (pos >= bits.size()) throw DesyncError("decode_stream: bit stream truncated");
      node = code.step(node, bits[pos++] ^ key.next_bit());
      if (node < 0) throw DesyncError("decode_stream: no codeword under key stream");
      sym = code.symbol_at(node);
    }
    key.mark_stage();
    out.push_back(sym);
  }
  return out;
}

}
