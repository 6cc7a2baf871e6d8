#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "zdsec/errors.hpp"
#include "zdsec/hull.hpp"
#include "zdsec/numerics.hpp"
#include "zdsec/source_model.hpp"

namespace zdsec {

using DistortionMatrix = std::vector<std::vector<double>>;  // d[x][xhat] >= 0

struct Quantizer {
  std::vector<int> map;  // x -> xhat
};

// Encoder/decoder pair with side information: s = f(x) crosses the channel,
// the decoder reproduces xhat = g(s, y).
struct SIQuantizerPair {
  std::vector<int> f;                // x -> s
  std::vector<std::vector<int>> g;  // [s][y] -> xhat
};

struct RDPoint {
  double D;
  double rate;
};

namespace detail {

inline void check_distortion(const DistortionMatrix& d, size_t x_size) {
  if (d.size() != x_size) throw ConfigError("distortion matrix: wrong row count");
  if (d.empty() || d[0].empty()) throw ConfigError("distortion matrix: empty");
  for (const auto& row : d) {
    if (row.size() != d[0].size()) throw ConfigError("distortion matrix: ragged");
    for (double v : row)
      if (!(v >= 0.0) || !std::isfinite(v))
        throw ConfigError("distortion matrix: entries must be finite and >= 0");
  }
}

// Pareto-minimal subset of candidate (D, rate) points under exact
// comparisons: D ascending, rate strictly descending; at ties the earliest
// candidate index (lexicographically smallest witness) survives.
inline std::vector<size_t> pareto_indices(const std::vector<RDPoint>& pts) {
  std::vector<size_t> order(pts.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (pts[a].D != pts[b].D) return pts[a].D < pts[b].D;
    if (pts[a].rate != pts[b].rate) return pts[a].rate < pts[b].rate;
    return a < b;
  });
  std::vector<size_t> keep;
  double min_rate = std::numeric_limits<double>::infinity();
  for (size_t idx : order) {
    if (pts[idx].rate < min_rate) {
      keep.push_back(idx);
      min_rate = pts[idx].rate;
    }
  }
  return keep;
}

}  // namespace detail

// Shared shape of the no-SI and SI curves: Pareto frontier over enumerated
// quantizers plus the lower convex envelope reachable by time-sharing two of
// them. Envelope tags and step witnesses index `frontier`.
template <typename Witness>
struct RateDistortionCurve {
  std::vector<RDPoint> frontier;
  std::vector<Witness> witnesses;  // parallel to frontier
  LowerEnvelope envelope;

  double d_min() const { return frontier.front().D; }

  // Step function min{rate(f) : D(f) <= D}; the infimum without time-sharing.
  std::optional<size_t> step_index(double D) const {
    if (D < frontier.front().D - 1e-12) return std::nullopt;
    size_t best = 0;
    for (size_t i = 0; i < frontier.size(); ++i)
      if (frontier[i].D <= D + 1e-12) best = i;
    return best;
  }

  std::optional<double> step_value(double D) const {
    auto i = step_index(D);
    if (!i) return std::nullopt;
    return frontier[*i].rate;
  }

  // Lower convex envelope value; queries below d_min are infeasible.
  std::optional<double> envelope_value(double D) const {
    auto v = envelope.value(D);
    if (!v) return std::nullopt;
    return v->y;
  }

  // The <= 2 quantizers and weight that achieve the envelope at D.
  struct Mix {
    size_t left;
    size_t right;
    double lambda;  // weight on left
    double rate;
  };
  std::optional<Mix> envelope_mix(double D) const {
    auto v = envelope.value(D);
    if (!v) return std::nullopt;
    return Mix{static_cast<size_t>(v->left_tag), static_cast<size_t>(v->right_tag), v->lambda,
               v->y};
  }
};

template <typename Witness>
RateDistortionCurve<Witness> make_curve(std::vector<RDPoint> candidates,
                                        std::vector<Witness> witnesses) {
  RateDistortionCurve<Witness> out;
  for (size_t idx : detail::pareto_indices(candidates)) {
    out.frontier.push_back(candidates[idx]);
    out.witnesses.push_back(witnesses[idx]);
  }
  std::vector<HullPoint> pts;
  for (size_t i = 0; i < out.frontier.size(); ++i)
    pts.push_back(HullPoint{out.frontier[i].D, out.frontier[i].rate, static_cast<int>(i)});
  out.envelope = LowerEnvelope(lower_convex_hull(pts));
  return out;
}

using RcCurve = RateDistortionCurve<Quantizer>;
using RcSiCurve = RateDistortionCurve<SIQuantizerPair>;

// Exhaustive sweep of all |Xhat|^|X| memoryless quantizers: the causal
// rate-distortion function without side information is the lower convex
// envelope of min_{f: E d(X, f(X)) <= D} H(f(X)).
inline RcCurve rc_curve(const SourceModel& model, const DistortionMatrix& dist,
                        uint64_t state_limit = 2'000'000) {
  size_t m = model.alphabet_size();
  detail::check_distortion(dist, m);
  size_t r = dist[0].size();
  double count = std::pow(static_cast<double>(r), static_cast<double>(m));
  if (count > static_cast<double>(state_limit))
    throw StateSpaceTooLarge("rc_curve: quantizer space exceeds state limit");

  std::vector<RDPoint> cand;
  std::vector<Quantizer> wit;
  std::vector<int> f(m, 0);
  std::vector<double> image(r);
  while (true) {
    KahanSum d;
    std::fill(image.begin(), image.end(), 0.0);
    for (size_t x = 0; x < m; ++x) {
      d.add(model.p(x) * dist[x][static_cast<size_t>(f[x])]);
      image[static_cast<size_t>(f[x])] += model.p(x);
    }
    cand.push_back(RDPoint{d.value(), entropy_bits(image)});
    wit.push_back(Quantizer{f});
    size_t pos = 0;
    while (pos < m && ++f[pos] == static_cast<int>(r)) {
      f[pos] = 0;
      ++pos;
    }
    if (pos == m) break;
  }
  return make_curve(std::move(cand), std::move(wit));
}

// SI variant: enumerate f: X -> S for |S| = 1..|X| and decoders
// g: S x Y -> Xhat; the rate of a pair is H(f(X) | Y).
inline RcSiCurve rc_si_curve(const JointSourceModel& model, const DistortionMatrix& dist,
                             uint64_t state_limit = 2'000'000) {
  size_t m = model.x_size();
  size_t ny = model.y_size();
  detail::check_distortion(dist, m);
  size_t r = dist[0].size();

  double count = 0.0;
  for (size_t s = 1; s <= m; ++s)
    count += std::pow(static_cast<double>(s), static_cast<double>(m)) *
             std::pow(static_cast<double>(r), static_cast<double>(s * ny));
  if (count > static_cast<double>(state_limit))
    throw StateSpaceTooLarge("rc_si_curve: quantizer space exceeds state limit");

  ProbMatrix joint = model.joint_xy();
  std::vector<RDPoint> cand;
  std::vector<SIQuantizerPair> wit;
  for (size_t s_count = 1; s_count <= m; ++s_count) {
    std::vector<int> f(m, 0);
    while (true) {
      // rate depends on f only
      ProbMatrix joint_sy(s_count, std::vector<double>(ny, 0.0));
      for (size_t x = 0; x < m; ++x)
        for (size_t y = 0; y < ny; ++y)
          joint_sy[static_cast<size_t>(f[x])][y] += joint[x][y];
      double rate = conditional_entropy(joint_sy);

      std::vector<std::vector<int>> g(s_count, std::vector<int>(ny, 0));
      while (true) {
        KahanSum d;
        for (size_t x = 0; x < m; ++x)
          for (size_t y = 0; y < ny; ++y)
            d.add(joint[x][y] * dist[x][static_cast<size_t>(g[static_cast<size_t>(f[x])][y])]);
        cand.push_back(RDPoint{d.value(), rate});
        wit.push_back(SIQuantizerPair{f, g});
        size_t pos = 0;
        while (pos < s_count * ny) {
          int& cell = g[pos / ny][pos % ny];
          if (++cell < static_cast<int>(r)) break;
          cell = 0;
          ++pos;
        }
        if (pos == s_count * ny) break;
      }
      size_t pos = 0;
      while (pos < m && ++f[pos] == static_cast<int>(s_count)) {
        f[pos] = 0;
        ++pos;
      }
      if (pos == m) break;
    }
  }
  return make_curve(std::move(cand), std::move(wit));
}

// ---------------------------------------------------------------------------
// Region membership for (R, Rk, D, h) quadruples.

struct Quadruple {
  double R;
  double Rk;
  double D;
  double h;
};

struct RegionReport {
  bool feasible_D = false;
  bool member = false;
  double envelope_rate = std::numeric_limits<double>::quiet_NaN();
  double entropy_bound = 0.0;  // H(X) without SI, H(X|W) with degraded SI
  double required_Rk = 0.0;    // max(0, h - entropy_bound + envelope_rate)
  double slack_R = 0.0;        // R - envelope_rate
  double slack_h = 0.0;        // entropy_bound - h
  double slack_Rk = 0.0;       // Rk - required_Rk
  // True when h - entropy_bound + envelope_rate <= 0: the coded stream is
  // already dim enough that no key material is required for this h.
  bool no_encryption = false;
};

namespace detail {

inline RegionReport region_check_common(std::optional<double> env_rate, double entropy_bound,
                                        const Quadruple& q) {
  RegionReport rep;
  rep.entropy_bound = entropy_bound;
  if (!env_rate) return rep;  // D below d_min: nothing is achievable
  rep.feasible_D = true;
  rep.envelope_rate = *env_rate;
  double need = q.h - entropy_bound + *env_rate;
  rep.no_encryption = need <= 1e-12;
  rep.required_Rk = std::max(0.0, need);
  rep.slack_R = q.R - rep.envelope_rate;
  rep.slack_h = entropy_bound - q.h;
  rep.slack_Rk = q.Rk - rep.required_Rk;
  rep.member = rep.slack_R >= -1e-12 && rep.slack_h >= -1e-12 && rep.slack_Rk >= -1e-12;
  return rep;
}

}  // namespace detail

inline RegionReport region_check_no_si(const SourceModel& model, const DistortionMatrix& dist,
                                       const Quadruple& q, uint64_t state_limit = 2'000'000) {
  RcCurve curve = rc_curve(model, dist, state_limit);
  return detail::region_check_common(curve.envelope_value(q.D), entropy(model), q);
}

inline RegionReport region_check_si(const JointSourceModel& model, const DistortionMatrix& dist,
                                    const Quadruple& q, uint64_t state_limit = 2'000'000) {
  RcSiCurve curve = rc_si_curve(model, dist, state_limit);
  return detail::region_check_common(curve.envelope_value(q.D), model.entropy_x_given_w(), q);
}

}
