#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "zdsec/codes.hpp"
#include "zdsec/errors.hpp"
#include "zdsec/hull.hpp"
#include "zdsec/keystream.hpp"
#include "zdsec/source_model.hpp"

namespace zdsec {

// Fixed-size block transmission: every stage emits max_length() bits, the
// codeword prefix one-time padded with key bits, the tail filled from
// encoder-private randomness. Key consumption per stage is the codeword
// length, never the block length.
inline Bits encode_block(const InstantaneousCode& code, int x, KeyStream& key,
                         PrivateRandomness& priv) {
  const Bits& cw = code.codeword(static_cast<size_t>(x));
  Bits block;
  for (size_t i = 0; i < cw.size(); ++i) block.push_back(cw[i] ^ key.next_bit());
  key.mark_stage();
  for (size_t i = cw.size(); i < code.max_length(); ++i) block.push_back(priv.next_bit());
  return block;
}

// Un-pads by construction: XOR with the synchronized key stream reproduces
// codeword bits one at a time, and prefix-freeness guarantees the walk ends
// exactly at the codeword boundary, so pad bits are never touched.
inline int decode_block(const InstantaneousCode& code, const Bits& block, KeyStream& key) {
  if (block.size() != code.max_length()) throw DesyncError("decode_block: wrong block size");
  int node = code.root();
  for (size_t i = 0; i < block.size(); ++i) {
    node = code.step(node, block[i] ^ key.next_bit());
    if (node < 0) throw DesyncError("decode_block: no codeword under key stream");
    int sym = code.symbol_at(node);
    if (sym >= 0) {
      key.mark_stage();
      return sym;
    }
  }
  throw DesyncError("decode_block: block exhausted inside a codeword");
}

enum class BlockPad { random_bits, zeros };

namespace detail {

template <typename Fn>
void for_each_block_outcome(const InstantaneousCode& code, const SourceModel& model,
                            BlockPad pad, uint64_t state_limit, Fn&& fn) {
  if (code.alphabet_size() != model.alphabet_size())
    throw std::invalid_argument("block_distribution: alphabet mismatch");
  size_t blen = code.max_length();
  if (blen > 40 || (model.alphabet_size() << blen) > state_limit)
    throw StateSpaceTooLarge("block_distribution: enumeration exceeds state limit");
  for (size_t x = 0; x < model.alphabet_size(); ++x) {
    size_t l = code.length(x);
    size_t pad_len = blen - l;
    uint64_t n_keys = 1ull << l;
    uint64_t n_pads = pad == BlockPad::random_bits ? (1ull << pad_len) : 1;
    double w = model.p(x) / static_cast<double>(n_keys) / static_cast<double>(n_pads);
    if (w == 0.0) continue;
    for (uint64_t kbits = 0; kbits < n_keys; ++kbits) {
      for (uint64_t pbits = 0; pbits < n_pads; ++pbits) {
        KeyStream key = KeyStream::from_bits(Bits::from_uint(kbits, l));
        PrivateRandomness priv = PrivateRandomness::from_bits(Bits::from_uint(pbits, pad_len));
        Bits block = encode_block(code, static_cast<int>(x), key, priv);
        fn(x, block.to_uint(), w);
      }
    }
  }
}

}  // namespace detail

// Exact output law of one stage, by enumeration of key and pad bits through
// the real encoder. With random padding this is uniform on {0,1}^max_length;
// the zero-pad variant exists to expose what breaks without private padding.
inline Distribution block_distribution(const InstantaneousCode& code, const SourceModel& model,
                                       BlockPad pad = BlockPad::random_bits,
                                       uint64_t state_limit = 1ull << 22) {
  size_t blen = code.max_length();
  std::vector<double> probs(1ull << blen, 0.0);
  detail::for_each_block_outcome(code, model, pad, state_limit,
                                 [&](size_t, uint64_t block, double w) { probs[block] += w; });
  Distribution d;
  d.support.resize(probs.size());
  for (size_t i = 0; i < probs.size(); ++i) d.support[i] = i;
  d.probs = std::move(probs);
  return d;
}

// Exact joint law P(x, block) of one stage; rows are symbols.
inline ProbMatrix joint_block_distribution(const InstantaneousCode& code, const SourceModel& model,
                                           BlockPad pad = BlockPad::random_bits,
                                           uint64_t state_limit = 1ull << 22) {
  size_t blen = code.max_length();
  ProbMatrix j(model.alphabet_size(), std::vector<double>(1ull << blen, 0.0));
  detail::for_each_block_outcome(code, model, pad, state_limit,
                                 [&](size_t x, uint64_t block, double w) { j[x][block] += w; });
  return j;
}

// One operating point per complete code profile: transmission rate is the
// block length (max codeword length), key rate the expected codeword length
// under the best symbol assignment.
struct RegionPoint {
  LengthProfile profile;
  double R;
  double Rk;
  bool on_envelope;
};

struct RegionResult {
  std::vector<RegionPoint> points;
  // Vertices of the lower convex envelope in the (R, Rk) plane; every point
  // on or above the polyline is reachable by time-sharing two profiles.
  std::vector<std::pair<double, double>> envelope;
};

inline RegionResult region_points(const SourceModel& model) {
  if (model.alphabet_size() < 2)
    throw std::invalid_argument("region_points: alphabet must have at least 2 symbols");
  RegionResult out;
  std::vector<HullPoint> pts;
  for (const LengthProfile& prof : enumerate_complete_profiles(model.alphabet_size())) {
    std::vector<int> lengths = assign_profile(prof, model);
    KahanSum rk;
    for (size_t x = 0; x < lengths.size(); ++x)
      rk.add(model.p(x) * static_cast<double>(lengths[x]));
    double r = static_cast<double>(prof.lengths.back());
    out.points.push_back(RegionPoint{prof, r, rk.value(), false});
    pts.push_back(HullPoint{r, rk.value(), static_cast<int>(out.points.size()) - 1});
  }
  LowerEnvelope env(lower_convex_hull(pts));
  for (RegionPoint& p : out.points) {
    auto v = env.value(p.R);
    p.on_envelope = v && p.Rk <= v->y + 1e-12;
  }
  for (const HullPoint& v : env.vertices()) out.envelope.emplace_back(v.x, v.y);
  return out;
}

}
