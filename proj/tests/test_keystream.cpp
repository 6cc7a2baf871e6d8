#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "zdsec/errors.hpp"
#include "zdsec/keystream.hpp"

using namespace zdsec;

TEST_CASE("key stream is deterministic per seed") {
  KeyStream a(123), b(123), c(124);
  Bits xa = a.next_bits(256), xb = b.next_bits(256), xc = c.next_bits(256);
  REQUIRE(xa == xb);
  REQUIRE(xa != xc);
}

TEST_CASE("key and private streams are domain separated") {
  KeyStream k(9);
  PrivateRandomness p(9);
  Bits kb, pb;
  for (int i = 0; i < 256; ++i) {
    kb.push_back(k.next_bit());
    pb.push_back(p.next_bit());
  }
  REQUIRE(kb != pb);
}

TEST_CASE("streams look unbiased and pairwise uncorrelated") {
  const std::size_t n = 100000;
  KeyStream k1(1), k2(2);
  PrivateRandomness p1(1);
  double s1 = 0, s2 = 0, s3 = 0, c12 = 0, c13 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double b1 = k1.next_bit(), b2 = k2.next_bit(), b3 = p1.next_bit();
    s1 += b1;
    s2 += b2;
    s3 += b3;
    c12 += b1 * b2;
    c13 += b1 * b3;
  }
  double m1 = s1 / n, m2 = s2 / n, m3 = s3 / n;
  REQUIRE(std::fabs(m1 - 0.5) < 0.01);
  REQUIRE(std::fabs(m2 - 0.5) < 0.01);
  REQUIRE(std::fabs(m3 - 0.5) < 0.01);
  // covariance / 0.25 is the bit correlation.
  REQUIRE(std::fabs((c12 / n - m1 * m2) / 0.25) < 0.01);
  REQUIRE(std::fabs((c13 / n - m1 * m3) / 0.25) < 0.01);
}

TEST_CASE("next_bits equals repeated next_bit") {
  KeyStream a(77), b(77);
  Bits chunk = a.next_bits(60);
  for (std::size_t i = 0; i < 60; ++i) REQUIRE(chunk[i] == b.next_bit());
}

TEST_CASE("replay tape reproduces its bits exactly and then runs dry") {
  Bits tape = Bits::from_string("1011001");
  KeyStream k = KeyStream::from_bits(tape);
  for (std::size_t i = 0; i < tape.size(); ++i)
    REQUIRE(k.next_bit() == tape[i]);
  REQUIRE_THROWS_AS(k.next_bit(), TapeExhausted);
}

TEST_CASE("stage accounting tracks consumption") {
  KeyStream k(5);
  k.next_bits(3);
  k.mark_stage();
  k.next_bits(2);
  k.mark_stage();
  REQUIRE(k.consumed_bits() == 5);
  REQUIRE(k.per_stage_consumption() == std::vector<std::uint64_t>{3, 2});
  REQUIRE(key_rate(k, 2) == 2.5);
  REQUIRE_THROWS_AS(key_rate(k, 0), std::invalid_argument);
}
