#pragma once

// Independent reference implementations used only by tests.  Each oracle
// recomputes a quantity from its definition by brute force, with no calls
// into the code paths under test beyond plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "zdsec/bits.hpp"
#include "zdsec/codes.hpp"
#include "zdsec/keystream.hpp"
#include "zdsec/numerics.hpp"
#include "zdsec/source_model.hpp"
#include "zdsec/zd_block.hpp"

namespace oracles {

// Minimum expected length over every integer length vector l in {1..k}^k
// satisfying the Kraft inequality, checked in exact integer arithmetic.
inline double exhaustive_best_length(const std::vector<double>& pmf) {
  const std::size_t k = pmf.size();
  const std::uint64_t kraft_cap = 1ull << k;  // lengths scaled by 2^k
  std::vector<std::size_t> l(k, 1);
  double best = std::numeric_limits<double>::infinity();
  for (;;) {
    std::uint64_t units = 0;
    for (std::size_t i = 0; i < k; ++i) units += 1ull << (k - l[i]);
    if (units <= kraft_cap) {
      double e = 0.0;
      for (std::size_t i = 0; i < k; ++i)
        e += pmf[i] * static_cast<double>(l[i]);
      best = std::min(best, e);
    }
    std::size_t pos = 0;
    while (pos < k && l[pos] == k) l[pos++] = 1;
    if (pos == k) break;
    ++l[pos];
  }
  return best;
}

// Strictly positive random pmf with entries bounded away from zero.
inline std::vector<double> random_pmf(std::mt19937_64& rng, std::size_t k) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> p(k);
  double total = 0.0;
  for (double& v : p) total += (v = u(rng));
  for (double& v : p) v /= total;
  // Renormalize the largest entry so the sum is 1 to full precision.
  std::size_t imax = 0;
  double rest = 0.0;
  for (std::size_t i = 1; i < k; ++i)
    if (p[i] > p[imax]) imax = i;
  for (std::size_t i = 0; i < k; ++i)
    if (i != imax) rest += p[i];
  p[imax] = 1.0 - rest;
  return p;
}

// Lower convex envelope of a point set evaluated at D, directly from the
// definition: the best exact interpolation between any two points (or any
// single point) whose distortion coordinate hits D, clamped right of the
// last point.  Returns +inf left of the first point.
inline double envelope_at(const std::vector<std::pair<double, double>>& pts,
                          double D) {
  double best = std::numeric_limits<double>::infinity();
  double dmin = std::numeric_limits<double>::infinity();
  double dmax = -std::numeric_limits<double>::infinity();
  for (const auto& [d, r] : pts) {
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
  }
  if (D < dmin - 1e-12) return best;
  if (D >= dmax) {
    for (const auto& [d, r] : pts) best = std::min(best, r);
    return best;
  }
  for (const auto& [d, r] : pts)
    if (std::fabs(d - D) <= 1e-15) best = std::min(best, r);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j) {
      double di = pts[i].first, dj = pts[j].first;
      if (!(di <= D && D <= dj) || dj - di <= 1e-15) continue;
      double lam = (dj - D) / (dj - di);
      best = std::min(best, lam * pts[i].second + (1.0 - lam) * pts[j].second);
    }
  return best;
}

// Exact joint law of (all transmitted blocks, source sequence) for the
// one-time-pad block scheme over `stages` stages, obtained by replaying the
// real encoder on every source sequence, key tape, and padding tape.
// Returns the total variation distance between the joint law and the
// product of its marginals; 0 means the transcript is independent of the
// source sequence.
inline double block_scheme_joint_tv(const zdsec::InstantaneousCode& code,
                                    const zdsec::SourceModel& model,
                                    std::size_t stages) {
  const std::size_t k = model.alphabet_size();
  const std::size_t B = code.max_length();
  std::map<std::string, double> joint, pz, px;
  std::vector<std::size_t> xs(stages, 0);
  for (;;) {
    double p_seq = 1.0;
    std::size_t key_bits = 0;
    for (std::size_t t = 0; t < stages; ++t) {
      p_seq *= model.p(xs[t]);
      key_bits += code.length(xs[t]);
    }
    std::size_t pad_bits = stages * B - key_bits;
    std::string xlabel;
    for (std::size_t t = 0; t < stages; ++t)
      xlabel += static_cast<char>('0' + xs[t]);
    double w = p_seq / std::ldexp(1.0, static_cast<int>(key_bits + pad_bits));
    for (std::uint64_t kv = 0; kv < (1ull << key_bits); ++kv)
      for (std::uint64_t pv = 0; pv < (1ull << pad_bits); ++pv) {
        zdsec::Bits ktape, ptape;
        for (std::size_t i = 0; i < key_bits; ++i)
          ktape.push_back(static_cast<int>((kv >> (key_bits - 1 - i)) & 1));
        for (std::size_t i = 0; i < pad_bits; ++i)
          ptape.push_back(static_cast<int>((pv >> (pad_bits - 1 - i)) & 1));
        zdsec::KeyStream key = zdsec::KeyStream::from_bits(ktape);
        zdsec::PrivateRandomness priv =
            zdsec::PrivateRandomness::from_bits(ptape);
        std::string zlabel;
        for (std::size_t t = 0; t < stages; ++t)
          zlabel +=
              zdsec::encode_block(code, static_cast<int>(xs[t]), key, priv)
                  .to_string();
        joint[zlabel + "|" + xlabel] += w;
        pz[zlabel] += w;
      }
    px[xlabel] += p_seq;
    std::size_t pos = 0;
    while (pos < stages && xs[pos] == k - 1) xs[pos++] = 0;
    if (pos == stages) break;
    ++xs[pos];
  }
  zdsec::KahanSum dist;
  for (const auto& [z, wz] : pz)
    for (const auto& [x, wx] : px) {
      auto it = joint.find(z + "|" + x);
      double j = it == joint.end() ? 0.0 : it->second;
      dist.add(std::fabs(j - wz * wx));
    }
  return 0.5 * dist.value();
}

}  // namespace oracles
