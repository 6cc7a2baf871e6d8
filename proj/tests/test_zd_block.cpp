#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "support/oracles.hpp"
#include "zdsec/codes.hpp"
#include "zdsec/errors.hpp"
#include "zdsec/keystream.hpp"
#include "zdsec/source_model.hpp"
#include "zdsec/zd_block.hpp"

using namespace zdsec;

TEST_CASE("block round trip recovers every symbol") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t k = 2 + static_cast<std::size_t>(rng() % 4);
    InstantaneousCode code = build_huffman(SourceModel(oracles::random_pmf(rng, k)));
    for (std::size_t x = 0; x < k; ++x) {
      KeyStream ekey(trial), dkey(trial);
      PrivateRandomness priv(trial + 1000);
      Bits block = encode_block(code, static_cast<int>(x), ekey, priv);
      REQUIRE(block.size() == code.max_length());
      REQUIRE(decode_block(code, block, dkey) == static_cast<int>(x));
      // Pad bits are never part of the parse: both sides consumed exactly
      // the codeword length from the shared key.
      REQUIRE(ekey.consumed_bits() == code.length(x));
      REQUIRE(dkey.consumed_bits() == code.length(x));
    }
  }
}

TEST_CASE("decoding stops exactly at the codeword for every key") {
  // Exhaustive version of the pad-safety property on a 5-symbol code: for
  // every symbol and every possible key prefix, the decoder's trie walk ends
  // after exactly l(x) bits.
  InstantaneousCode code =
      build_huffman(SourceModel({0.35, 0.25, 0.2, 0.15, 0.05}));
  for (std::size_t x = 0; x < 5; ++x) {
    std::size_t l = code.length(x);
    for (std::uint64_t kv = 0; kv < (1ull << l); ++kv) {
      Bits ktape = Bits::from_uint(kv, l);
      KeyStream ekey = KeyStream::from_bits(ktape);
      KeyStream dkey = KeyStream::from_bits(ktape);
      PrivateRandomness priv(99);
      Bits block = encode_block(code, static_cast<int>(x), ekey, priv);
      REQUIRE(decode_block(code, block, dkey) == static_cast<int>(x));
      REQUIRE(dkey.consumed_bits() == l);
    }
  }
}

TEST_CASE("a shifted key stream desynchronizes the decoder") {
  InstantaneousCode code = build_huffman(SourceModel({0.5, 0.25, 0.25}));
  bool corrupted = false;
  for (int x = 0; x < 3 && !corrupted; ++x) {
    for (std::uint64_t seed = 0; seed < 8 && !corrupted; ++seed) {
      KeyStream ekey(seed), dkey(seed);
      dkey.next_bit();  // decoder burns one key bit before the block
      PrivateRandomness priv(1);
      Bits block = encode_block(code, x, ekey, priv);
      try {
        corrupted = decode_block(code, block, dkey) != x;
      } catch (const DesyncError&) {
        corrupted = true;
      }
    }
  }
  REQUIRE(corrupted);
}

TEST_CASE("wrong block size is rejected") {
  InstantaneousCode code = build_huffman(SourceModel({0.5, 0.25, 0.25}));
  KeyStream key(1);
  REQUIRE_THROWS_AS(decode_block(code, Bits::from_string("0"), key), DesyncError);
}

TEST_CASE("block law is uniform under random padding") {
  SourceModel m({0.5, 0.25, 0.25});
  InstantaneousCode code = build_huffman(m);
  Distribution d = block_distribution(code, m);
  REQUIRE(d.probs.size() == 4);
  for (double p : d.probs) REQUIRE_THAT(p, Catch::Matchers::WithinAbs(0.25, 1e-12));
}

TEST_CASE("zero padding leaks structure") {
  SourceModel m({0.5, 0.25, 0.25});
  InstantaneousCode code = build_huffman(m);
  Distribution d = block_distribution(code, m, BlockPad::zeros);
  double lo = 1.0, hi = 0.0;
  for (double p : d.probs) {
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  REQUIRE(hi - lo > 0.1);
}

TEST_CASE("one stage transcript is independent of the symbol") {
  SourceModel m({0.4, 0.3, 0.2, 0.1});
  InstantaneousCode code = build_huffman(m);
  ProbMatrix joint = joint_block_distribution(code, m);
  Distribution z = block_distribution(code, m);
  KahanSum dist;
  for (std::size_t x = 0; x < 4; ++x)
    for (std::size_t b = 0; b < z.probs.size(); ++b)
      dist.add(std::fabs(joint[x][b] - m.p(x) * z.probs[b]));
  REQUIRE(0.5 * dist.value() <= 1e-12);
}

TEST_CASE("two stage transcript is independent of the sequence") {
  SourceModel m({0.5, 0.25, 0.25});
  InstantaneousCode code = build_huffman(m);
  REQUIRE(oracles::block_scheme_joint_tv(code, m, 2) <= 1e-12);
}

TEST_CASE("enumeration guards the state budget") {
  SourceModel m({0.4, 0.3, 0.2, 0.1});
  InstantaneousCode code = build_huffman(m);
  REQUIRE_THROWS_AS(block_distribution(code, m, BlockPad::random_bits, 4),
                    StateSpaceTooLarge);
}

TEST_CASE("region points for the four symbol pmf") {
  SourceModel m({0.4, 0.3, 0.2, 0.1});
  RegionResult reg = region_points(m);
  REQUIRE(reg.points.size() == 2);
  const RegionPoint* deep = nullptr;
  const RegionPoint* flat = nullptr;
  for (const RegionPoint& p : reg.points) {
    if (p.profile.lengths == std::vector<int>{1, 2, 3, 3}) deep = &p;
    if (p.profile.lengths == std::vector<int>{2, 2, 2, 2}) flat = &p;
  }
  REQUIRE(deep != nullptr);
  REQUIRE(flat != nullptr);
  REQUIRE(deep->R == 3.0);
  REQUIRE_THAT(deep->Rk, Catch::Matchers::WithinAbs(1.9, 1e-12));
  REQUIRE(flat->R == 2.0);
  REQUIRE_THAT(flat->Rk, Catch::Matchers::WithinAbs(2.0, 1e-12));
  REQUIRE(deep->on_envelope);
  REQUIRE(flat->on_envelope);
  double L = huffman_length(m);
  for (const RegionPoint& p : reg.points) {
    REQUIRE(p.Rk >= L - 1e-12);
    REQUIRE(p.R >= 2.0);
  }
  REQUIRE(reg.envelope.size() == 2);
  REQUIRE(reg.envelope.front().first == 2.0);
  REQUIRE(reg.envelope.back().first == 3.0);
}

TEST_CASE("region needs at least two symbols") {
  REQUIRE_THROWS_AS(region_points(SourceModel({1.0})), std::invalid_argument);
}
