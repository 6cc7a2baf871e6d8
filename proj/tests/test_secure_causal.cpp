#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "zdsec/adversary.hpp"
#include "zdsec/causal_rd.hpp"
#include "zdsec/errors.hpp"
#include "zdsec/keystream.hpp"
#include "zdsec/numerics.hpp"
#include "zdsec/secure_causal.hpp"
#include "zdsec/source_model.hpp"

using namespace zdsec;

namespace {

const DistortionMatrix kHamming2 = {{0.0, 1.0}, {1.0, 0.0}};

SourceModel biased() { return SourceModel({0.75, 0.25}); }

}  // namespace

TEST_CASE("scheme design picks the envelope operating point") {
  SeparationScheme s =
      design_separation_scheme(biased(), kHamming2, 0.125, entropy(biased()), 8);
  REQUIRE(s.quantizers.size() == 2);
  REQUIRE_THAT(s.lambda, Catch::Matchers::WithinAbs(0.5, 1e-12));
  REQUIRE_THAT(s.envelope_rate,
               Catch::Matchers::WithinAbs(binary_entropy(0.25) / 2.0, 1e-12));
  // Full secrecy: the key fraction covers the entire envelope rate.
  REQUIRE_THAT(s.key_fraction,
               Catch::Matchers::WithinAbs(s.envelope_rate, 1e-12));
  REQUIRE(s.tuple_len == 8);
}

TEST_CASE("unreachable targets are rejected") {
  REQUIRE_THROWS_AS(
      design_separation_scheme(biased(), kHamming2, -0.01, 0.5, 8),
      InfeasibleTarget);
  REQUIRE_THROWS_AS(
      design_separation_scheme(biased(), kHamming2, 0.125,
                               entropy(biased()) + 0.01, 8),
      InfeasibleTarget);
}

TEST_CASE("separation round trip, including a ragged final block") {
  SeparationScheme s =
      design_separation_scheme(biased(), kHamming2, 0.125, 0.7, 8);
  std::vector<int> xs = sample(biased(), 1005, 3);
  KeyStream ekey(12), dkey(12);
  SeparationRun run = encode_separation(s, biased(), kHamming2, xs, ekey);
  std::vector<int> back =
      decode_separation(s, biased(), xs.size(), run.stream, dkey);
  REQUIRE(back == run.repro);
  REQUIRE(run.metrics.h_bound ==
          equivocation_bound(s.entropy_bound, run.coded_bits, run.key_bits,
                             xs.size()));
  REQUIRE(run.key_bits <= run.coded_bits);
}

TEST_CASE("reproduction is the per-symbol quantizer output") {
  SeparationScheme s =
      design_separation_scheme(biased(), kHamming2, 0.125, 0.7, 8);
  std::vector<int> xs = sample(biased(), 320, 5);
  KeyStream key(9);
  SeparationRun run = encode_separation(s, biased(), kHamming2, xs, key);
  std::size_t cut = static_cast<std::size_t>(s.lambda * 320.0);
  for (std::size_t t = 0; t < xs.size(); ++t) {
    const Quantizer& q = t < cut ? s.quantizers.front() : s.quantizers.back();
    REQUIRE(run.repro[t] == q.map[static_cast<std::size_t>(xs[t])]);
  }
}

TEST_CASE("a later symbol change never touches earlier output") {
  SeparationScheme s =
      design_separation_scheme(biased(), kHamming2, 0.125, 0.7, 8);
  std::vector<int> xs = sample(biased(), 160, 21);
  const std::size_t p = 37;  // inside the fifth block
  std::vector<int> ys = xs;
  ys[p] ^= 1;
  KeyStream k1(4), k2(4);
  SeparationRun a = encode_separation(s, biased(), kHamming2, xs, k1);
  SeparationRun b = encode_separation(s, biased(), kHamming2, ys, k2);
  for (std::size_t t = 0; t < xs.size(); ++t)
    if (t != p) REQUIRE(a.repro[t] == b.repro[t]);
  // The bit streams agree up to the start of the block containing p.
  std::size_t agree = 0;
  while (agree < a.stream.size() && agree < b.stream.size() &&
         a.stream[agree] == b.stream[agree])
    ++agree;
  std::size_t p_block_start_bits = 0;
  {
    // Re-derive the preceding blocks' coded length by encoding the prefix
    // made of the same first four blocks (positions 0..31).
    std::vector<int> prefix(xs.begin(), xs.begin() + 32);
    KeyStream kp(4);
    SeparationScheme sp = s;
    sp.key_fraction = 0.0;  // plain coded length of those blocks
    sp.lambda = 1.0;        // position 37 < cut, so all four use quantizers[0]
    SeparationRun pr = encode_separation(sp, biased(), kHamming2, prefix, kp);
    p_block_start_bits = pr.coded_bits;
  }
  REQUIRE(agree >= p_block_start_bits);
}

TEST_CASE("point-mass blocks cost zero bits and still decode") {
  // At the right endpoint the designed scheme is a single constant
  // quantizer: every tuple is deterministic, nothing is transmitted.
  SeparationScheme s = design_separation_scheme(biased(), kHamming2, 0.25, 0.2, 8);
  REQUIRE(s.quantizers.size() == 1);
  std::vector<int> xs = sample(biased(), 400, 8);
  KeyStream ekey(1), dkey(1);
  SeparationRun run = encode_separation(s, biased(), kHamming2, xs, ekey);
  REQUIRE(run.coded_bits == 0);
  REQUIRE(run.key_bits == 0);
  REQUIRE(run.metrics.R_emp == 0.0);
  REQUIRE(run.metrics.h_bound == s.entropy_bound);
  std::vector<int> back = decode_separation(s, biased(), 400, run.stream, dkey);
  REQUIRE(back == run.repro);
  double expect = 0.25;  // constant zero reproduction errs on the ones
  REQUIRE(std::fabs(run.metrics.D_emp - expect) < 0.06);
}

TEST_CASE("n=10000 metrics sit inside the designed budget") {
  SourceModel m = biased();
  SeparationScheme s =
      design_separation_scheme(m, kHamming2, 0.125, entropy(m), 8);
  std::vector<int> xs = sample(m, 10000, 424242);
  KeyStream key(31337);
  SeparationRun run = encode_separation(s, m, kHamming2, xs, key);
  double env = binary_entropy(0.25) / 2.0;
  REQUIRE(run.metrics.D_emp <= 0.14);
  REQUIRE(run.metrics.R_emp <= env + 0.125 + 0.05);
  REQUIRE(run.metrics.Rk_emp <= env + 0.05);
  REQUIRE(run.metrics.h_bound >= entropy(m) - 0.05);
}

TEST_CASE("equivocation bound arithmetic") {
  REQUIRE(equivocation_bound(1.0, 4, 2, 4) == 0.5);
  REQUIRE(equivocation_bound(0.8, 0, 0, 10) == 0.8);
  REQUIRE_THROWS_AS(equivocation_bound(1.0, 1, 0, 0), std::invalid_argument);
}

TEST_CASE("tiny instance: certified bound equals exact equivocation") {
  // Uniform binary, 1-bit code, half of the four transmitted bits padded.
  SourceModel u({0.5, 0.5});
  InstantaneousCode bit = build_huffman(u);
  double exact = exact_equivocation(OtpSystemSpec{bit, 2}, u, 4);
  double bound = equivocation_bound(entropy(u), 4, 2, 4);
  REQUIRE(exact == bound);
}

TEST_CASE("binning at full rate is the identity map") {
  std::vector<int> s_seq = {1, 0, 1, 1, 0, 2, 1, 0, 2, 2};
  Bits bin = sw_bin(s_seq, 3, std::log2(3.0), 77);
  REQUIRE(bin.size() == static_cast<std::size_t>(std::ceil(10 * std::log2(3.0))));
  std::vector<std::vector<double>> no_weights;
  SwDecodeOutcome out = sw_decode(bin, 10, 3, std::log2(3.0), no_weights, 77);
  REQUIRE(out.decoded == s_seq);
  REQUIRE_FALSE(out.failed_at_cap);
}

TEST_CASE("paired bins are prefix-nested across rates") {
  std::vector<int> s_seq = {0, 1, 1, 0, 1, 0, 0, 0, 1, 1, 0, 1};
  Bits lo = sw_bin(s_seq, 2, 0.5, 9);
  Bits hi = sw_bin(s_seq, 2, 0.75, 9);
  REQUIRE(lo.size() == 6);
  REQUIRE(hi.size() == 9);
  REQUIRE(hi.slice(0, 6) == lo);
}

TEST_CASE("higher bin rate never decodes worse, trial by trial") {
  JointSourceModel channel(SourceModel({0.5, 0.5}), {{0.9, 0.1}, {0.1, 0.9}});
  ProbMatrix joint_sy = channel.joint_xy();
  double hsy = conditional_entropy(joint_sy);
  int errs_lo = 0, errs_hi = 0, successes = 0;
  for (std::uint64_t trial = 0; trial < 50; ++trial) {
    std::vector<int> s_seq = sample(channel.x_model(), 12, 100 + trial);
    std::vector<int> y_seq = sample_channel(channel.py_given_x(), s_seq, 500 + trial);
    SwResult lo = slepian_wolf_binning(s_seq, y_seq, joint_sy, hsy + 0.05, trial);
    SwResult hi = slepian_wolf_binning(s_seq, y_seq, joint_sy, hsy + 0.25, trial);
    REQUIRE(static_cast<int>(hi.error) <= static_cast<int>(lo.error));
    errs_lo += lo.error;
    errs_hi += hi.error;
    successes += !hi.error;
  }
  REQUIRE(errs_hi <= errs_lo);
  REQUIRE(successes > 0);  // the budgeted search really decodes at this size
}

TEST_CASE("bin decoding needs an admissible symbol everywhere") {
  std::vector<std::vector<double>> weights(4, {0.5, 0.5});
  weights[2] = {0.0, 0.0};
  Bits bin = sw_bin({0, 1, 0, 1}, 2, 0.5, 3);
  REQUIRE_THROWS_AS(sw_decode(bin, 4, 2, 0.5, weights, 3), SwDecodeFailure);
}

namespace {

JointSourceModel dsbs() {
  return JointSourceModel(SourceModel({0.75, 0.25}), {{0.9, 0.1}, {0.1, 0.9}},
                          {{0.8, 0.2}, {0.2, 0.8}});
}

}  // namespace

TEST_CASE("side information scheme design") {
  JointSourceModel jm = dsbs();
  SiSeparationScheme s =
      design_separation_scheme_si(jm, kHamming2, 0.05, 0.3, 0.25, 7);
  REQUIRE(s.quantizers.size() == 2);
  REQUIRE(s.s_alphabet == 2);
  REQUIRE(s.sw_rate > s.envelope_rate);
  REQUIRE_THAT(s.entropy_bound,
               Catch::Matchers::WithinAbs(jm.entropy_x_given_w(), 1e-12));
  REQUIRE_THROWS_AS(
      design_separation_scheme_si(jm, kHamming2, 0.05,
                                  jm.entropy_x_given_w() + 0.01, 0.25, 7),
      InfeasibleTarget);
}

TEST_CASE("side information run with an identity-rate bin is exact") {
  JointSourceModel jm = dsbs();
  // Rate margin pushes sw_rate past log2 |S|, so binning is invertible.
  SiSeparationScheme s =
      design_separation_scheme_si(jm, kHamming2, 0.05, 0.3, 1.0, 7);
  REQUIRE(s.sw_rate >= 1.0);
  std::vector<int> xs = sample(jm.x_model(), 400, 50);
  std::vector<int> ys = sample_channel(jm.py_given_x(), xs, 51);
  KeyStream key(6);
  SiSeparationRun run = encode_decode_separation_si(s, jm, kHamming2, xs, ys, key);
  REQUIRE(run.metrics.sw_error == 0.0);
  REQUIRE_FALSE(run.sw_failed);
  REQUIRE(run.metrics.D_emp < 0.12);
  REQUIRE(run.metrics.h_bound ==
          equivocation_bound(s.entropy_bound, run.coded_bits, run.key_bits, 400));
}
