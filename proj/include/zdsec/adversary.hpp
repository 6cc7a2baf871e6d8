#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "zdsec/codes.hpp"
#include "zdsec/errors.hpp"
#include "zdsec/keystream.hpp"
#include "zdsec/numerics.hpp"
#include "zdsec/source_model.hpp"
#include "zdsec/zd_block.hpp"

namespace zdsec {

// Law of the total emitted length after n stages of the stream scheme: the
// n-fold convolution of the per-symbol codeword-length pmf, computed exactly
// (dense DP with compensated sums), no sampling involved.
struct LengthDistribution {
  size_t n = 0;
  uint64_t min_total = 0;
  std::vector<double> probs;  // probs[i] = P(total = min_total + i)

  double prob(uint64_t total) const {
    if (total < min_total || total >= min_total + probs.size()) return 0.0;
    return probs[total - min_total];
  }
  uint64_t max_total() const { return min_total + probs.size() - 1; }
};

namespace detail {

// Per-symbol length pmf as (length, probability) pairs, ascending.
inline std::vector<std::pair<uint64_t, double>> length_pmf(const InstantaneousCode& code,
                                                           const SourceModel& model) {
  if (code.alphabet_size() != model.alphabet_size())
    throw std::invalid_argument("length_pmf: alphabet mismatch");
  std::map<uint64_t, double> acc;
  for (size_t x = 0; x < model.alphabet_size(); ++x) acc[code.length(x)] += model.p(x);
  return {acc.begin(), acc.end()};
}

inline void check_length_budget(const InstantaneousCode& code, size_t n, uint64_t limit) {
  if (n == 0) throw std::invalid_argument("length_distribution: n must be positive");
  if (n * code.max_length() > limit)
    throw StateSpaceTooLarge("length_distribution: n * max_length exceeds state limit");
}

}  // namespace detail

inline LengthDistribution length_distribution(const InstantaneousCode& code,
                                              const SourceModel& model, size_t n,
                                              uint64_t state_limit = 1ull << 22) {
  detail::check_length_budget(code, n, state_limit);
  auto pmf = detail::length_pmf(code, model);
  uint64_t lmin = pmf.front().first, lmax = pmf.back().first;
  LengthDistribution q;
  q.n = 1;
  q.min_total = lmin;
  q.probs.assign(lmax - lmin + 1, 0.0);
  for (auto [l, w] : pmf) q.probs[l - lmin] = w;
  while (q.n < n) {
    std::vector<double> next((q.probs.size() - 1) + (lmax - lmin) + 1, 0.0);
    std::vector<KahanSum> cells(next.size());
    for (size_t i = 0; i < q.probs.size(); ++i) {
      if (q.probs[i] == 0.0) continue;
      for (auto [l, w] : pmf) cells[i + (l - lmin)].add(q.probs[i] * w);
    }
    for (size_t i = 0; i < next.size(); ++i) next[i] = cells[i].value();
    q.probs = std::move(next);
    q.min_total += lmin;
    ++q.n;
  }
  return q;
}

// Posterior of a single source symbol given only the total length of the
// n-stage encrypted stream:
//   P(X = x | len = L) = P(x) * Q_{n-1}(L - l(x)) / Q_n(L).
// Key bits hide everything except the length, so this is the whole of what
// a non-parsing observer learns.
inline std::vector<double> noparse_posterior_from(const LengthDistribution& q_prev,
                                                  const LengthDistribution& q_n,
                                                  const InstantaneousCode& code,
                                                  const SourceModel& model, uint64_t total_len) {
  double qn = q_n.prob(total_len);
  if (qn <= 0.0) throw std::invalid_argument("noparse_posterior: length outside support");
  std::vector<double> post(model.alphabet_size(), 0.0);
  for (size_t x = 0; x < model.alphabet_size(); ++x) {
    uint64_t lx = code.length(x);
    if (total_len < lx) continue;
    double prev = q_n.n == 1 ? (total_len == lx ? 1.0 : 0.0) : q_prev.prob(total_len - lx);
    post[x] = model.p(x) * prev / qn;
  }
  return post;
}

inline std::vector<double> noparse_posterior(const InstantaneousCode& code,
                                             const SourceModel& model, size_t n,
                                             uint64_t total_len,
                                             uint64_t state_limit = 1ull << 22) {
  LengthDistribution q_n = length_distribution(code, model, n, state_limit);
  LengthDistribution q_prev =
      n > 1 ? length_distribution(code, model, n - 1, state_limit) : LengthDistribution{};
  return noparse_posterior_from(q_prev, q_n, code, model, total_len);
}

struct PosteriorRow {
  uint64_t total_len;
  double prob;                    // Q_n(L)
  std::vector<double> posterior;  // P(X | len = L)
  double tv;                      // distance to the prior
};

struct PosteriorReport {
  size_t n = 0;
  std::vector<PosteriorRow> rows;
  double expected_tv = 0.0;
  double max_tv = 0.0;
};

struct ConvergencePoint {
  size_t n;
  double expected_tv;
  double max_tv;
};

namespace detail {

inline PosteriorReport make_report(const LengthDistribution& q_prev, const LengthDistribution& q_n,
                                   const InstantaneousCode& code, const SourceModel& model) {
  PosteriorReport rep;
  rep.n = q_n.n;
  KahanSum etv;
  for (size_t i = 0; i < q_n.probs.size(); ++i) {
    double p = q_n.probs[i];
    if (p <= 0.0) continue;
    PosteriorRow row;
    row.total_len = q_n.min_total + i;
    row.prob = p;
    row.posterior = noparse_posterior_from(q_prev, q_n, code, model, row.total_len);
    row.tv = total_variation(row.posterior, model.pmf());
    etv.add(p * row.tv);
    if (row.tv > rep.max_tv) rep.max_tv = row.tv;
    rep.rows.push_back(std::move(row));
  }
  rep.expected_tv = etv.value();
  return rep;
}

}  // namespace detail

inline PosteriorReport posterior_report(const InstantaneousCode& code, const SourceModel& model,
                                        size_t n, uint64_t state_limit = 1ull << 22) {
  LengthDistribution q_n = length_distribution(code, model, n, state_limit);
  LengthDistribution q_prev =
      n > 1 ? length_distribution(code, model, n - 1, state_limit) : LengthDistribution{};
  return detail::make_report(q_prev, q_n, code, model);
}

// Expected and worst-case information leak (TV between posterior and prior)
// for each requested horizon. One DP sweep serves all horizons.
inline std::vector<ConvergencePoint> convergence_curve(const InstantaneousCode& code,
                                                       const SourceModel& model,
                                                       const std::vector<size_t>& n_list,
                                                       uint64_t state_limit = 1ull << 22) {
  if (n_list.empty()) return {};
  for (size_t i = 1; i < n_list.size(); ++i)
    if (n_list[i] <= n_list[i - 1])
      throw std::invalid_argument("convergence_curve: n_list must be strictly increasing");
  detail::check_length_budget(code, n_list.back(), state_limit);
  auto pmf = detail::length_pmf(code, model);
  uint64_t lmin = pmf.front().first, lmax = pmf.back().first;
  LengthDistribution q;
  q.n = 1;
  q.min_total = lmin;
  q.probs.assign(lmax - lmin + 1, 0.0);
  for (auto [l, w] : pmf) q.probs[l - lmin] = w;
  LengthDistribution prev;
  std::vector<ConvergencePoint> out;
  size_t next_idx = 0;
  while (true) {
    if (q.n == n_list[next_idx]) {
      PosteriorReport rep = detail::make_report(prev, q, code, model);
      out.push_back(ConvergencePoint{q.n, rep.expected_tv, rep.max_tv});
      if (++next_idx == n_list.size()) break;
    }
    prev = q;
    std::vector<KahanSum> cells((q.probs.size() - 1) + (lmax - lmin) + 1);
    for (size_t i = 0; i < q.probs.size(); ++i) {
      if (q.probs[i] == 0.0) continue;
      for (auto [l, w] : pmf) cells[i + (l - lmin)].add(q.probs[i] * w);
    }
    q.probs.resize(cells.size());
    for (size_t i = 0; i < cells.size(); ++i) q.probs[i] = cells[i].value();
    q.min_total += lmin;
    ++q.n;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Markov-chain audit: for an encoder driven by per-stage key material, check
// max | P(k^{t-1} | x_t, z^t) - P(k^{t-1} | z^t) | by exact enumeration of
// source symbols, key tape and private tape.

class StagedEncoder {
 public:
  virtual ~StagedEncoder() = default;
  virtual size_t key_tape_bits(size_t horizon) const = 0;
  virtual size_t priv_tape_bits(size_t horizon) const = 0;
  // Emits one output block per stage; must call key.mark_stage() per stage.
  virtual std::vector<Bits> run(const std::vector<int>& xs, KeyStream& key,
                                PrivateRandomness& priv) const = 0;
};

class BlockSchemeEncoder final : public StagedEncoder {
 public:
  explicit BlockSchemeEncoder(InstantaneousCode code) : code_(std::move(code)) {}

  size_t key_tape_bits(size_t horizon) const override { return horizon * code_.max_length(); }
  size_t priv_tape_bits(size_t horizon) const override { return horizon * code_.max_length(); }

  std::vector<Bits> run(const std::vector<int>& xs, KeyStream& key,
                        PrivateRandomness& priv) const override {
    std::vector<Bits> out;
    out.reserve(xs.size());
    for (int x : xs) out.push_back(encode_block(code_, x, key, priv));
    return out;
  }

  const InstantaneousCode& code() const { return code_; }

 private:
  InstantaneousCode code_;
};

// Deliberately broken control: a binary one-time-pad encoder that burns one
// key bit at stage 1 and reuses it at every later stage. Past key material
// then leaks through (x_t, z^t).
class KeyReuseEncoder final : public StagedEncoder {
 public:
  size_t key_tape_bits(size_t) const override { return 1; }
  size_t priv_tape_bits(size_t) const override { return 0; }

  std::vector<Bits> run(const std::vector<int>& xs, KeyStream& key,
                        PrivateRandomness&) const override {
    std::vector<Bits> out;
    int k = key.next_bit();
    key.mark_stage();
    for (size_t t = 0; t < xs.size(); ++t) {
      if (t > 0) key.mark_stage();  // no fresh bits after stage 1
      Bits z;
      z.push_back((xs[t] & 1) ^ k);
      out.push_back(std::move(z));
    }
    return out;
  }
};

inline double markov_chain_check(const StagedEncoder& enc, const SourceModel& model,
                                 size_t horizon, uint64_t state_limit = 1'000'000) {
  if (horizon < 1) throw std::invalid_argument("markov_chain_check: horizon must be >= 1");
  size_t mk = enc.key_tape_bits(horizon);
  size_t mv = enc.priv_tape_bits(horizon);
  if (mk + mv > 40) throw StateSpaceTooLarge("markov_chain_check: tape too long");
  double states = std::ldexp(1.0, static_cast<int>(mk + mv)) *
                  std::pow(static_cast<double>(model.alphabet_size()), static_cast<double>(horizon));
  if (states > static_cast<double>(state_limit))
    throw StateSpaceTooLarge("markov_chain_check: enumeration exceeds state limit");

  // Composite keys: '\x1f' separates blocks inside a tuple, '\x1e' separates
  // tuple components, so variable-length segments never collide.
  const std::string sep(1, '\x1e');
  std::map<std::string, double> joint_kxz, joint_xz, joint_kz, joint_z;
  std::map<std::string, std::set<std::string>> k_by_z;
  std::map<std::string, std::set<int>> x_by_z;

  std::vector<int> xs(horizon, 0);
  double tape_w = std::ldexp(1.0, -static_cast<int>(mk + mv));
  while (true) {
    double px = 1.0;
    for (int x : xs) px *= model.p(static_cast<size_t>(x));
    if (px > 0.0) {
      for (uint64_t u = 0; u < (1ull << mk); ++u) {
        Bits key_tape = Bits::from_uint(u, mk);
        for (uint64_t v = 0; v < (1ull << mv); ++v) {
          KeyStream key = KeyStream::from_bits(key_tape);
          PrivateRandomness priv = PrivateRandomness::from_bits(Bits::from_uint(v, mv));
          std::vector<Bits> z = enc.run(xs, key, priv);
          if (z.size() != horizon || key.per_stage_consumption().size() < horizon)
            throw std::logic_error("markov_chain_check: encoder stage accounting is off");
          std::string zs;
          for (const Bits& b : z) {
            zs += b.to_string();
            zs += '\x1f';
          }
          // k^{t-1}: the key segments consumed by stages 1..t-1, read back
          // off the tape via the per-stage accounting.
          std::string ks;
          size_t off = 0;
          for (size_t t = 0; t + 1 < horizon; ++t) {
            size_t used = static_cast<size_t>(key.per_stage_consumption()[t]);
            ks += key_tape.slice(off, used).to_string();
            ks += '\x1f';
            off += used;
          }
          double w = px * tape_w;
          std::string xstr = std::to_string(xs.back());
          joint_kxz[ks + sep + xstr + sep + zs] += w;
          joint_xz[xstr + sep + zs] += w;
          joint_kz[ks + sep + zs] += w;
          joint_z[zs] += w;
          k_by_z[zs].insert(ks);
          x_by_z[zs].insert(xs.back());
        }
      }
    }
    size_t pos = 0;  // odometer over x^t
    while (pos < horizon && ++xs[pos] == static_cast<int>(model.alphabet_size())) {
      xs[pos] = 0;
      ++pos;
    }
    if (pos == horizon) break;
  }

  double dev = 0.0;
  for (const auto& [zs, pz] : joint_z) {
    for (const std::string& ks : k_by_z[zs]) {
      double p_k_given_z = joint_kz[ks + sep + zs] / pz;
      for (int x : x_by_z[zs]) {
        std::string xstr = std::to_string(x);
        auto pxz = joint_xz.find(xstr + sep + zs);
        if (pxz == joint_xz.end() || pxz->second <= 0.0) continue;
        auto it = joint_kxz.find(ks + sep + xstr + sep + zs);
        double p_k_given_xz = it == joint_kxz.end() ? 0.0 : it->second / pxz->second;
        dev = std::max(dev, std::fabs(p_k_given_xz - p_k_given_z));
      }
    }
  }
  return dev;
}

// ---------------------------------------------------------------------------
// Exact equivocation of a concatenated-codeword system with a one-time pad
// over the leading bits: brute-force joint law of (x^n, w^n, Z), tiny n only.

struct OtpSystemSpec {
  InstantaneousCode code;
  size_t encrypted_prefix_bits;  // key tape size; each message uses min(e, len)
};

namespace detail {

inline double map_entropy(const std::map<std::string, double>& m) {
  KahanSum h;
  for (const auto& [k, p] : m) h.add(-plog2p(p));
  return h.value();
}

template <typename SideFn>
double exact_equivocation_impl(const OtpSystemSpec& sys, const SourceModel& model, size_t n,
                               size_t w_size, SideFn&& side_prob, uint64_t state_limit) {
  if (n == 0) throw std::invalid_argument("exact_equivocation: n must be positive");
  size_t e = sys.encrypted_prefix_bits;
  if (e > 40) throw StateSpaceTooLarge("exact_equivocation: key space too large");
  double states = std::pow(static_cast<double>(model.alphabet_size()), static_cast<double>(n)) *
                  std::ldexp(1.0, static_cast<int>(e)) *
                  std::pow(static_cast<double>(w_size), static_cast<double>(n));
  if (states > static_cast<double>(state_limit))
    throw StateSpaceTooLarge("exact_equivocation: enumeration exceeds state limit");

  const char sep = '\x1f';
  std::map<std::string, double> joint_xwz, joint_wz;
  double kw = std::ldexp(1.0, -static_cast<int>(e));
  std::vector<int> xs(n, 0);
  while (true) {
    double px = 1.0;
    std::string xstr;
    Bits coded;
    for (int x : xs) {
      px *= model.p(static_cast<size_t>(x));
      xstr += static_cast<char>('a' + x);
      coded.append(sys.code.codeword(static_cast<size_t>(x)));
    }
    if (px > 0.0) {
      size_t enc = std::min(e, coded.size());
      for (uint64_t k = 0; k < (1ull << e); ++k) {
        Bits z = coded;
        for (size_t i = 0; i < enc; ++i)
          if ((k >> (e - 1 - i)) & 1) z.flip(i);
        std::string zs = z.to_string();
        // side sequences
        std::vector<int> ws(n, 0);
        while (true) {
          double pw = 1.0;
          std::string wstr;
          for (size_t t = 0; t < n; ++t) {
            pw *= side_prob(xs[t], ws[t]);
            wstr += static_cast<char>('a' + ws[t]);
          }
          if (pw > 0.0) {
            double wgt = px * kw * pw;
            joint_xwz[xstr + sep + wstr + sep + zs] += wgt;
            joint_wz[wstr + sep + zs] += wgt;
          }
          size_t pos = 0;
          while (pos < n && ++ws[pos] == static_cast<int>(w_size)) {
            ws[pos] = 0;
            ++pos;
          }
          if (pos == n) break;
        }
      }
    }
    size_t pos = 0;
    while (pos < n && ++xs[pos] == static_cast<int>(model.alphabet_size())) {
      xs[pos] = 0;
      ++pos;
    }
    if (pos == n) break;
  }
  return (map_entropy(joint_xwz) - map_entropy(joint_wz)) / static_cast<double>(n);
}

}  // namespace detail

// (1/n) H(X^n | Z), Z the concatenated codewords with the first
// encrypted_prefix_bits one-time padded.
inline double exact_equivocation(const OtpSystemSpec& sys, const SourceModel& model, size_t n,
                                 uint64_t state_limit = 4'000'000) {
  return detail::exact_equivocation_impl(
      sys, model, n, 1, [](int, int) { return 1.0; }, state_limit);
}

// (1/n) H(X^n | W^n, Z) with the eavesdropper holding per-letter side
// information W from the model's degraded chain.
inline double exact_equivocation(const OtpSystemSpec& sys, const JointSourceModel& joint, size_t n,
                                 uint64_t state_limit = 4'000'000) {
  ProbMatrix pwx = joint.pw_given_x();
  return detail::exact_equivocation_impl(
      sys, joint.x_model(), n, joint.w_size(),
      [&](int x, int w) { return pwx[static_cast<size_t>(x)][static_cast<size_t>(w)]; },
      state_limit);
}

}
