#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <stdexcept>
#include <vector>

#include "zdsec/bits.hpp"
#include "zdsec/causal_rd.hpp"
#include "zdsec/codes.hpp"
#include "zdsec/errors.hpp"
#include "zdsec/keystream.hpp"
#include "zdsec/numerics.hpp"
#include "zdsec/source_model.hpp"

namespace zdsec {

// Separation architecture: quantize causally (time-sharing between at most two
// scalar quantizers), entropy-code the quantizer outputs in m-tuples, then
// one-time-pad the first ceil(key_fraction * n) bits of the coded stream.

struct SeparationScheme {
  std::vector<Quantizer> quantizers;  // one or two; first is used early
  double lambda = 1.0;                // fraction of positions on quantizers[0]
  std::size_t tuple_len = 1;
  double key_fraction = 0.0;  // target key bits per source symbol
  double target_distortion = 0.0;
  double target_leakage = 0.0;     // h: tolerated adversary uncertainty floor
  double envelope_rate = 0.0;      // envelope value at target_distortion
  double entropy_bound = 0.0;      // H(X); the no-side-information cap on h
  std::size_t alphabet = 0;        // |X|
  std::size_t repro_alphabet = 0;  // |Xhat|
};

struct RunMetrics {
  double R_emp = 0.0;
  double Rk_emp = 0.0;
  double D_emp = 0.0;
  double h_bound = 0.0;  // certified equivocation lower bound
  double sw_error = 0.0; // side-information runs only
};

struct SeparationRun {
  Bits stream;              // coded stream, prefix already encrypted
  std::vector<int> s_seq;   // quantizer outputs
  std::vector<int> repro;   // reproductions as seen by the decoder
  std::size_t coded_bits = 0;
  std::size_t key_bits = 0;
  RunMetrics metrics;
};

// Equivocation certificate for a prefix-encrypted coded stream: the adversary
// sees at most coded_bits bits, of which key_bits are pad-covered, so
// H(X^n | Z) / n >= H_bound - (coded - key) / n.
inline double equivocation_bound(double entropy_bound, std::size_t coded_bits,
                                 std::size_t key_bits, std::size_t n) {
  if (n == 0) throw std::invalid_argument("equivocation_bound: n == 0");
  return entropy_bound -
         (static_cast<double>(coded_bits) - static_cast<double>(key_bits)) /
             static_cast<double>(n);
}

namespace detail {

inline std::size_t prefix_cut(double lambda, std::size_t n) {
  double cut = std::floor(lambda * static_cast<double>(n));
  if (cut < 0.0) cut = 0.0;
  if (cut > static_cast<double>(n)) cut = static_cast<double>(n);
  return static_cast<std::size_t>(cut);
}

inline std::size_t key_prefix_bits(double key_fraction, std::size_t n,
                                   std::size_t coded_bits) {
  double want = std::ceil(key_fraction * static_cast<double>(n));
  if (want < 0.0) want = 0.0;
  std::size_t bits = static_cast<std::size_t>(want);
  return std::min(bits, coded_bits);
}

// Distribution of one quantizer output under p.
inline std::vector<double> image_pmf(const Quantizer& q,
                                     const std::vector<double>& p,
                                     std::size_t repro_alphabet) {
  std::vector<double> out(repro_alphabet, 0.0);
  for (std::size_t x = 0; x < p.size(); ++x) out[q.map[x]] += p[x];
  return out;
}

// Product law of an m-tuple whose first k coordinates come from pmf_a and the
// rest from pmf_b.  Tuples are indexed in mixed radix, first coordinate most
// significant.  The code covers only the support: a produced coordinate value
// always has positive probability, and coding impossible tuples would pad
// every real codeword.  A point-mass law gets no code at all; such tuples are
// reconstructed from public structure and cost zero coded bits.
struct TupleCode {
  std::optional<InstantaneousCode> code;  // over support ranks
  std::vector<std::size_t> support;       // rank -> tuple index, ascending
  std::vector<std::int64_t> rank_of;      // tuple index -> rank, -1 off support
  std::size_t point_mass = 0;             // tuple index when deterministic
};

inline TupleCode build_tuple_code(const std::vector<double>& pmf_a,
                                  const std::vector<double>& pmf_b,
                                  std::size_t k, std::size_t len,
                                  std::size_t radix, std::uint64_t limit) {
  std::size_t tuples = 1;
  for (std::size_t i = 0; i < len; ++i) {
    if (tuples > limit / radix) throw StateSpaceTooLarge("tuple alphabet");
    tuples *= radix;
  }
  std::vector<double> pmf(tuples, 0.0);
  pmf[0] = 1.0;
  std::size_t width = 1;
  for (std::size_t i = 0; i < len; ++i) {
    const std::vector<double>& coord = i < k ? pmf_a : pmf_b;
    std::size_t next_width = width * radix;
    std::vector<double> next(next_width, 0.0);
    for (std::size_t t = 0; t < width; ++t) {
      if (pmf[t] == 0.0) continue;
      for (std::size_t s = 0; s < radix; ++s)
        next[t * radix + s] = pmf[t] * coord[s];
    }
    pmf.swap(next);
    width = next_width;
  }
  TupleCode tc;
  tc.rank_of.assign(tuples, -1);
  std::vector<double> support_pmf;
  for (std::size_t t = 0; t < tuples; ++t)
    if (pmf[t] > 0.0) {
      tc.rank_of[t] = static_cast<std::int64_t>(tc.support.size());
      tc.support.push_back(t);
      support_pmf.push_back(pmf[t]);
    }
  if (tc.support.size() <= 1) {
    tc.point_mass = tc.support.empty() ? 0 : tc.support.front();
    return tc;
  }
  tc.code = build_huffman(SourceModel(support_pmf));
  return tc;
}

}  // namespace detail

// Choose the scheme for a distortion budget and a leakage floor h.  The rate
// comes from the lower envelope of the causal quantizer frontier; the key
// fraction is the envelope's excess over the tolerated leakage gap.
inline SeparationScheme design_separation_scheme(
    const SourceModel& model, const DistortionMatrix& dist, double target_D,
    double target_h, std::size_t tuple_len, std::uint64_t limit = 2000000) {
  if (tuple_len == 0) throw std::invalid_argument("tuple_len == 0");
  RcCurve curve = rc_curve(model, dist, limit);
  if (target_D < curve.d_min() - 1e-12)
    throw InfeasibleTarget("distortion below the achievable minimum");
  double hx = entropy(model);
  if (target_h > hx + 1e-12)
    throw InfeasibleTarget("leakage floor exceeds source entropy");
  auto mix = curve.envelope_mix(target_D);
  if (!mix) throw InfeasibleTarget("distortion not on the envelope domain");

  SeparationScheme scheme;
  scheme.quantizers.push_back(curve.witnesses[mix->left]);
  if (mix->right != mix->left)
    scheme.quantizers.push_back(curve.witnesses[mix->right]);
  scheme.lambda = mix->right == mix->left ? 1.0 : mix->lambda;
  scheme.tuple_len = tuple_len;
  scheme.envelope_rate = mix->rate;
  scheme.entropy_bound = hx;
  scheme.target_distortion = target_D;
  scheme.target_leakage = target_h;
  scheme.key_fraction = std::max(0.0, target_h - hx + mix->rate);
  scheme.alphabet = model.alphabet_size();
  scheme.repro_alphabet = dist[0].size();
  return scheme;
}

inline SeparationRun encode_separation(const SeparationScheme& scheme,
                                       const SourceModel& model,
                                       const DistortionMatrix& dist,
                                       const std::vector<int>& xs,
                                       KeyStream& key,
                                       std::uint64_t limit = 2000000) {
  const std::size_t n = xs.size();
  if (n == 0) throw std::invalid_argument("encode_separation: empty input");
  const std::size_t m = scheme.tuple_len;
  const std::size_t r = scheme.repro_alphabet;
  const std::size_t cut = detail::prefix_cut(scheme.lambda, n);
  const Quantizer& qa = scheme.quantizers.front();
  const Quantizer& qb = scheme.quantizers.back();

  SeparationRun run;
  run.s_seq.resize(n);
  for (std::size_t t = 0; t < n; ++t)
    run.s_seq[t] = (t < cut ? qa : qb).map[static_cast<std::size_t>(xs[t])];
  run.repro = run.s_seq;  // without side information, s is the reproduction

  std::vector<double> pmf_a = detail::image_pmf(qa, model.pmf(), r);
  std::vector<double> pmf_b = detail::image_pmf(qb, model.pmf(), r);

  // Per-block tuple codes depend only on (#early positions in block, length).
  std::map<std::pair<std::size_t, std::size_t>, detail::TupleCode> cache;
  for (std::size_t start = 0; start < n; start += m) {
    std::size_t len = std::min(m, n - start);
    std::size_t k = start >= cut ? 0 : std::min(cut - start, len);
    auto key_kl = std::make_pair(k, len);
    auto it = cache.find(key_kl);
    if (it == cache.end())
      it = cache.emplace(key_kl, detail::build_tuple_code(pmf_a, pmf_b, k, len,
                                                          r, limit))
               .first;
    std::size_t idx = 0;
    for (std::size_t i = 0; i < len; ++i)
      idx = idx * r + static_cast<std::size_t>(run.s_seq[start + i]);
    const detail::TupleCode& tc = it->second;
    if (tc.code) {
      std::int64_t rank = tc.rank_of[idx];
      if (rank < 0) throw std::logic_error("tuple off the modeled support");
      run.stream.append(tc.code->codeword(static_cast<std::size_t>(rank)));
    }
  }

  run.coded_bits = run.stream.size();
  run.key_bits = detail::key_prefix_bits(scheme.key_fraction, n, run.coded_bits);
  for (std::size_t i = 0; i < run.key_bits; ++i)
    if (key.next_bit()) run.stream.flip(i);
  key.mark_stage();

  KahanSum d;
  for (std::size_t t = 0; t < n; ++t)
    d.add(dist[static_cast<std::size_t>(xs[t])]
              [static_cast<std::size_t>(run.repro[t])]);
  run.metrics.D_emp = d.value() / static_cast<double>(n);
  run.metrics.R_emp =
      static_cast<double>(run.coded_bits) / static_cast<double>(n);
  run.metrics.Rk_emp =
      static_cast<double>(run.key_bits) / static_cast<double>(n);
  run.metrics.h_bound = equivocation_bound(scheme.entropy_bound,
                                           run.coded_bits, run.key_bits, n);
  return run;
}

inline std::vector<int> decode_separation(const SeparationScheme& scheme,
                                          const SourceModel& model,
                                          std::size_t n, const Bits& stream,
                                          KeyStream& key,
                                          std::uint64_t limit = 2000000) {
  if (n == 0) throw std::invalid_argument("decode_separation: n == 0");
  const std::size_t m = scheme.tuple_len;
  const std::size_t r = scheme.repro_alphabet;
  const std::size_t cut = detail::prefix_cut(scheme.lambda, n);
  const Quantizer& qa = scheme.quantizers.front();
  const Quantizer& qb = scheme.quantizers.back();
  std::vector<double> pmf_a = detail::image_pmf(qa, model.pmf(), r);
  std::vector<double> pmf_b = detail::image_pmf(qb, model.pmf(), r);

  std::size_t key_bits =
      detail::key_prefix_bits(scheme.key_fraction, n, stream.size());
  Bits plain = stream;
  for (std::size_t i = 0; i < key_bits; ++i)
    if (key.next_bit()) plain.flip(i);
  key.mark_stage();

  std::map<std::pair<std::size_t, std::size_t>, detail::TupleCode> cache;
  std::vector<int> repro(n);
  std::size_t pos = 0;
  for (std::size_t start = 0; start < n; start += m) {
    std::size_t len = std::min(m, n - start);
    std::size_t k = start >= cut ? 0 : std::min(cut - start, len);
    auto key_kl = std::make_pair(k, len);
    auto it = cache.find(key_kl);
    if (it == cache.end())
      it = cache.emplace(key_kl, detail::build_tuple_code(pmf_a, pmf_b, k, len,
                                                          r, limit))
               .first;
    std::size_t idx;
    const detail::TupleCode& tc = it->second;
    if (tc.code) {
      auto parsed = tc.code->parse_prefix(plain, pos);
      idx = tc.support[parsed.symbol];
      pos += parsed.consumed;
    } else {
      idx = tc.point_mass;
    }
    for (std::size_t i = len; i-- > 0;) {
      repro[start + i] = static_cast<int>(idx % r);
      idx /= r;
    }
  }
  if (pos != plain.size()) throw DesyncError("trailing bits after last block");
  return repro;
}

// ---------------------------------------------------------------------------
// Slepian-Wolf style binning for the side-information decoder.
//
// The bin index of s^n is the first ceil(n * sw_rate) bits of a hash stream
// seeded by the whole sequence.  Because a lower-rate bin is a prefix of a
// higher-rate one, raising the rate never admits new false candidates.  When
// sw_rate covers log2(alphabet) the bin is the sequence itself (exact).
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr std::uint64_t kSwDomain = 0x53574249'4E4E494Eull;

inline std::uint64_t sw_sequence_state(const std::vector<int>& s_seq,
                                       std::uint64_t seed) {
  std::uint64_t h = splitmix64(seed ^ kSwDomain);
  for (std::size_t t = 0; t < s_seq.size(); ++t)
    h = splitmix64(h ^ splitmix64((static_cast<std::uint64_t>(t) + 1) *
                                      0x9E3779B97F4A7C15ull ^
                                  (static_cast<std::uint64_t>(s_seq[t]) + 1)));
  return h;
}

inline Bits sw_hash_bits(std::uint64_t state, std::size_t nbits) {
  BitTape tape = BitTape::prg(state);
  Bits out;
  for (std::size_t i = 0; i < nbits; ++i) out.push_back(tape.next_bit());
  return out;
}

// True when the first nbits of the hash stream for `state` equal `bin`.
inline bool sw_hash_matches(std::uint64_t state, const Bits& bin) {
  BitTape tape = BitTape::prg(state);
  for (std::size_t i = 0; i < bin.size(); ++i)
    if (tape.next_bit() != bin[i]) return false;
  return true;
}

inline bool is_identity_rate(double sw_rate, std::size_t alphabet) {
  return sw_rate >= std::log2(static_cast<double>(alphabet)) - 1e-12;
}

// Base-`radix` big integer packing of a sequence into a fixed-width bit
// string, most significant bit first.  Width must satisfy
// 2^width >= radix^n, which ceil(n*log2(radix)) bits always do.
inline Bits pack_sequence(const std::vector<int>& seq, std::size_t radix,
                          std::size_t width) {
  std::vector<std::uint64_t> words(1, 0);  // little-endian 32-bit limbs
  auto mul_add = [&](std::uint64_t mul, std::uint64_t add) {
    std::uint64_t carry = add;
    for (std::size_t i = 0; i < words.size(); ++i) {
      std::uint64_t v = words[i] * mul + carry;
      words[i] = v & 0xFFFFFFFFull;
      carry = v >> 32;
    }
    while (carry) {
      words.push_back(carry & 0xFFFFFFFFull);
      carry >>= 32;
    }
  };
  for (int s : seq) mul_add(radix, static_cast<std::uint64_t>(s));
  Bits out;
  for (std::size_t i = width; i-- > 0;) {
    std::size_t word = i / 32, bit = i % 32;
    bool v = word < words.size() && ((words[word] >> bit) & 1);
    out.push_back(v);
  }
  return out;
}

inline std::vector<int> unpack_sequence(const Bits& bin, std::size_t radix,
                                        std::size_t n) {
  std::size_t limbs = bin.size() / 32 + 1;
  std::vector<std::uint64_t> words(limbs, 0);
  for (std::size_t i = 0; i < bin.size(); ++i)
    if (bin[bin.size() - 1 - i]) words[i / 32] |= 1ull << (i % 32);
  std::vector<int> seq(n);
  for (std::size_t t = n; t-- > 0;) {
    std::uint64_t rem = 0;
    for (std::size_t i = words.size(); i-- > 0;) {
      std::uint64_t v = (rem << 32) | words[i];
      words[i] = v / radix;
      rem = v % radix;
    }
    seq[t] = static_cast<int>(rem);
  }
  return seq;
}

// One decoder candidate: a stretch of the sequence with its log-likelihood.
struct SwCandidate {
  double logp = 0.0;
  std::vector<std::uint8_t> seq;
};

inline bool candidate_before(const SwCandidate& a, const SwCandidate& b) {
  if (a.logp != b.logp) return a.logp > b.logp;
  return a.seq < b.seq;
}

// k best joint candidates for positions [lo, hi), by divide and conquer over
// the per-position option lists (sorted by posterior weight, ties on symbol).
inline std::vector<SwCandidate> sw_k_best(
    const std::vector<std::vector<std::pair<double, int>>>& options,
    std::size_t lo, std::size_t hi, std::size_t k) {
  if (hi - lo == 1) {
    std::vector<SwCandidate> out;
    const auto& opts = options[lo];
    for (std::size_t i = 0; i < opts.size() && i < k; ++i)
      out.push_back({std::log2(opts[i].first),
                     {static_cast<std::uint8_t>(opts[i].second)}});
    return out;
  }
  std::size_t mid = lo + (hi - lo) / 2;
  std::vector<SwCandidate> left = sw_k_best(options, lo, mid, k);
  std::vector<SwCandidate> right = sw_k_best(options, mid, hi, k);

  struct Item {
    double logp;
    std::size_t i, j;
  };
  auto item_less = [&](const Item& a, const Item& b) {
    if (a.logp != b.logp) return a.logp < b.logp;  // max-heap on logp
    if (left[a.i].seq != left[b.i].seq) return left[a.i].seq > left[b.i].seq;
    return right[a.j].seq > right[b.j].seq;
  };
  std::priority_queue<Item, std::vector<Item>, decltype(item_less)> heap(
      item_less);
  heap.push({left[0].logp + right[0].logp, 0, 0});
  std::vector<SwCandidate> out;
  while (!heap.empty() && out.size() < k) {
    Item top = heap.top();
    heap.pop();
    SwCandidate cand;
    cand.logp = top.logp;
    cand.seq = left[top.i].seq;
    cand.seq.insert(cand.seq.end(), right[top.j].seq.begin(),
                    right[top.j].seq.end());
    out.push_back(std::move(cand));
    if (top.i + 1 < left.size() && top.j == 0)
      heap.push({left[top.i + 1].logp + right[0].logp, top.i + 1, 0});
    if (top.j + 1 < right.size())
      heap.push({left[top.i].logp + right[top.j + 1].logp, top.i, top.j + 1});
  }
  return out;
}

}  // namespace detail

inline Bits sw_bin(const std::vector<int>& s_seq, std::size_t alphabet,
                   double sw_rate, std::uint64_t seed) {
  if (sw_rate < 0.0) throw std::invalid_argument("sw_rate < 0");
  std::size_t nbits = static_cast<std::size_t>(
      std::ceil(sw_rate * static_cast<double>(s_seq.size())));
  if (detail::is_identity_rate(sw_rate, alphabet))
    return detail::pack_sequence(s_seq, alphabet, nbits);
  return detail::sw_hash_bits(detail::sw_sequence_state(s_seq, seed), nbits);
}

struct SwDecodeOutcome {
  std::vector<int> decoded;
  bool failed_at_cap = false;
  std::size_t candidates_tried = 0;
};

// weights[t][s] must be proportional to the decoder's posterior P(s | y_t);
// zero-weight symbols are excluded from the search.
inline SwDecodeOutcome sw_decode(const Bits& bin, std::size_t n,
                                 std::size_t alphabet, double sw_rate,
                                 const std::vector<std::vector<double>>& weights,
                                 std::uint64_t seed, std::size_t cap = 2000) {
  SwDecodeOutcome out;
  if (detail::is_identity_rate(sw_rate, alphabet)) {
    out.decoded = detail::unpack_sequence(bin, alphabet, n);
    out.candidates_tried = 1;
    return out;
  }
  std::vector<std::vector<std::pair<double, int>>> options(n);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t s = 0; s < alphabet; ++s)
      if (weights[t][s] > 0.0)
        options[t].push_back({weights[t][s], static_cast<int>(s)});
    std::sort(options[t].begin(), options[t].end(),
              [](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first > b.first;
                return a.second < b.second;
              });
    if (options[t].empty())
      throw SwDecodeFailure("position with no admissible symbol");
  }
  std::vector<detail::SwCandidate> cands =
      detail::sw_k_best(options, 0, n, cap);
  for (const auto& cand : cands) {
    ++out.candidates_tried;
    std::vector<int> seq(cand.seq.begin(), cand.seq.end());
    if (detail::sw_hash_matches(detail::sw_sequence_state(seq, seed), bin)) {
      out.decoded = std::move(seq);
      return out;
    }
  }
  out.failed_at_cap = true;
  out.decoded.assign(cands[0].seq.begin(), cands[0].seq.end());
  return out;
}

struct SwResult {
  Bits bin;
  std::vector<int> decoded;
  bool error = false;
  bool failed_at_cap = false;
  std::size_t candidates_tried = 0;
};

// Round-trip harness: bin the true sequence, then decode it from the bin and
// the side sequence under the stationary joint law P[s][y].
inline SwResult slepian_wolf_binning(const std::vector<int>& s_seq,
                                     const std::vector<int>& y_seq,
                                     const ProbMatrix& joint_sy, double sw_rate,
                                     std::uint64_t seed,
                                     std::size_t cap = 2000) {
  if (s_seq.size() != y_seq.size())
    throw std::invalid_argument("sequence length mismatch");
  std::size_t alphabet = joint_sy.size();
  SwResult res;
  res.bin = sw_bin(s_seq, alphabet, sw_rate, seed);
  std::vector<std::vector<double>> weights(s_seq.size());
  for (std::size_t t = 0; t < s_seq.size(); ++t) {
    weights[t].resize(alphabet);
    for (std::size_t s = 0; s < alphabet; ++s)
      weights[t][s] = joint_sy[s][static_cast<std::size_t>(y_seq[t])];
  }
  SwDecodeOutcome dec =
      sw_decode(res.bin, s_seq.size(), alphabet, sw_rate, weights, seed, cap);
  res.decoded = std::move(dec.decoded);
  res.failed_at_cap = dec.failed_at_cap;
  res.candidates_tried = dec.candidates_tried;
  res.error = res.decoded != s_seq;
  return res;
}

// ---------------------------------------------------------------------------
// Side-information variant: quantize to S, announce a bin of s^n, decode s^n
// at the receiver with y^n, reproduce through g(s, y).
// ---------------------------------------------------------------------------

struct SiSeparationScheme {
  std::vector<SIQuantizerPair> quantizers;  // one or two
  double lambda = 1.0;
  double sw_rate = 0.0;  // announced bits per symbol
  double key_fraction = 0.0;
  double target_distortion = 0.0;
  double target_leakage = 0.0;
  double envelope_rate = 0.0;
  double entropy_bound = 0.0;  // H(X | W)
  std::size_t alphabet = 0;
  std::size_t s_alphabet = 0;
  std::size_t repro_alphabet = 0;
  std::uint64_t sw_seed = 0;  // public binning seed, part of the code
};

inline SiSeparationScheme design_separation_scheme_si(
    const JointSourceModel& model, const DistortionMatrix& dist,
    double target_D, double target_h, double rate_margin, std::uint64_t sw_seed,
    std::uint64_t limit = 2000000) {
  RcSiCurve curve = rc_si_curve(model, dist, limit);
  if (target_D < curve.d_min() - 1e-12)
    throw InfeasibleTarget("distortion below the achievable minimum");
  double hxw = model.entropy_x_given_w();
  if (target_h > hxw + 1e-12)
    throw InfeasibleTarget("leakage floor exceeds conditional entropy");
  auto mix = curve.envelope_mix(target_D);
  if (!mix) throw InfeasibleTarget("distortion not on the envelope domain");

  SiSeparationScheme scheme;
  scheme.quantizers.push_back(curve.witnesses[mix->left]);
  if (mix->right != mix->left)
    scheme.quantizers.push_back(curve.witnesses[mix->right]);
  scheme.lambda = mix->right == mix->left ? 1.0 : mix->lambda;
  scheme.envelope_rate = mix->rate;
  scheme.entropy_bound = hxw;
  scheme.target_distortion = target_D;
  scheme.target_leakage = target_h;
  scheme.key_fraction = std::max(0.0, target_h - hxw + mix->rate);
  scheme.alphabet = model.x_size();
  scheme.repro_alphabet = dist[0].size();
  std::size_t s_alpha = 0;
  for (const auto& qp : scheme.quantizers)
    for (int s : qp.f)
      s_alpha = std::max(s_alpha, static_cast<std::size_t>(s) + 1);
  scheme.s_alphabet = s_alpha;
  scheme.sw_rate = mix->rate + rate_margin;
  scheme.sw_seed = sw_seed;
  return scheme;
}

namespace detail {

// Joint law of (s, y) induced by pushing x through f.
inline ProbMatrix joint_sy_of(const JointSourceModel& model,
                              const std::vector<int>& f,
                              std::size_t s_alphabet) {
  ProbMatrix joint_xy = model.joint_xy();
  std::size_t ny = joint_xy[0].size();
  ProbMatrix out(s_alphabet, std::vector<double>(ny, 0.0));
  for (std::size_t x = 0; x < joint_xy.size(); ++x)
    for (std::size_t y = 0; y < ny; ++y)
      out[static_cast<std::size_t>(f[x])][y] += joint_xy[x][y];
  return out;
}

}  // namespace detail

struct SiSeparationRun {
  Bits stream;  // bin bits, prefix already encrypted
  std::vector<int> s_seq;
  std::vector<int> repro;
  std::size_t coded_bits = 0;
  std::size_t key_bits = 0;
  bool sw_failed = false;
  RunMetrics metrics;
};

inline SiSeparationRun encode_decode_separation_si(
    const SiSeparationScheme& scheme, const JointSourceModel& model,
    const DistortionMatrix& dist, const std::vector<int>& xs,
    const std::vector<int>& ys, KeyStream& key, std::size_t cap = 2000) {
  const std::size_t n = xs.size();
  if (n == 0 || ys.size() != n)
    throw std::invalid_argument("separation_si: bad sequence lengths");
  const std::size_t cut = detail::prefix_cut(scheme.lambda, n);
  const SIQuantizerPair& qa = scheme.quantizers.front();
  const SIQuantizerPair& qb = scheme.quantizers.back();

  SiSeparationRun run;
  run.s_seq.resize(n);
  for (std::size_t t = 0; t < n; ++t)
    run.s_seq[t] = (t < cut ? qa : qb).f[static_cast<std::size_t>(xs[t])];

  run.stream =
      sw_bin(run.s_seq, scheme.s_alphabet, scheme.sw_rate, scheme.sw_seed);
  run.coded_bits = run.stream.size();
  run.key_bits =
      detail::key_prefix_bits(scheme.key_fraction, n, run.coded_bits);
  for (std::size_t i = 0; i < run.key_bits; ++i)
    if (key.next_bit()) run.stream.flip(i);
  key.mark_stage();

  // Receiver side.  The decoder shares the key stream, so its view after
  // stripping the pad is exactly the plaintext bin; reproduce that view
  // directly rather than replaying the pad.
  ProbMatrix joint_a = detail::joint_sy_of(model, qa.f, scheme.s_alphabet);
  ProbMatrix joint_b = detail::joint_sy_of(model, qb.f, scheme.s_alphabet);
  std::vector<std::vector<double>> weights(n);
  for (std::size_t t = 0; t < n; ++t) {
    const ProbMatrix& j = t < cut ? joint_a : joint_b;
    weights[t].resize(scheme.s_alphabet);
    for (std::size_t s = 0; s < scheme.s_alphabet; ++s)
      weights[t][s] = j[s][static_cast<std::size_t>(ys[t])];
  }
  Bits bin_plain =
      sw_bin(run.s_seq, scheme.s_alphabet, scheme.sw_rate, scheme.sw_seed);
  SwDecodeOutcome dec = sw_decode(bin_plain, n, scheme.s_alphabet,
                                  scheme.sw_rate, weights, scheme.sw_seed, cap);
  run.sw_failed = dec.failed_at_cap;

  run.repro.resize(n);
  KahanSum d;
  for (std::size_t t = 0; t < n; ++t) {
    const SIQuantizerPair& qp = t < cut ? qa : qb;
    int s = dec.decoded[t];
    run.repro[t] =
        qp.g[static_cast<std::size_t>(s)][static_cast<std::size_t>(ys[t])];
    d.add(dist[static_cast<std::size_t>(xs[t])]
              [static_cast<std::size_t>(run.repro[t])]);
  }
  run.metrics.D_emp = d.value() / static_cast<double>(n);
  run.metrics.R_emp =
      static_cast<double>(run.coded_bits) / static_cast<double>(n);
  run.metrics.Rk_emp =
      static_cast<double>(run.key_bits) / static_cast<double>(n);
  run.metrics.h_bound = equivocation_bound(scheme.entropy_bound,
                                           run.coded_bits, run.key_bits, n);
  run.metrics.sw_error = dec.decoded == run.s_seq ? 0.0 : 1.0;
  return run;
}

}  // namespace zdsec
