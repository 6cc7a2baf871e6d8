#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "zdsec/errors.hpp"
#include "zdsec/numerics.hpp"

namespace zdsec {

// Finite distribution over an explicit support (bit patterns, lengths, ...).
struct Distribution {
  std::vector<uint64_t> support;
  std::vector<double> probs;
};

using ProbMatrix = std::vector<std::vector<double>>;

namespace detail {

inline void check_pmf(const std::vector<double>& pmf, const char* what) {
  if (pmf.empty()) throw ConfigError(std::string(what) + ": empty pmf");
  KahanSum total;
  for (double p : pmf) {
    if (!(p >= 0.0)) throw ConfigError(std::string(what) + ": negative or NaN probability");
    total.add(p);
  }
  if (std::fabs(total.value() - 1.0) > kProbTol)
    throw ConfigError(std::string(what) + ": probabilities sum to " + std::to_string(total.value()));
}

inline void check_stochastic_rows(const ProbMatrix& m, size_t rows, const char* what) {
  if (m.size() != rows) throw ConfigError(std::string(what) + ": wrong row count");
  if (m.empty() || m[0].empty()) throw ConfigError(std::string(what) + ": empty matrix");
  size_t cols = m[0].size();
  for (const auto& row : m) {
    if (row.size() != cols) throw ConfigError(std::string(what) + ": ragged matrix");
    check_pmf(row, what);
  }
}

}  // namespace detail

// Memoryless source over symbols 0..k-1.
class SourceModel {
 public:
  explicit SourceModel(std::vector<double> pmf) : pmf_(std::move(pmf)) {
    detail::check_pmf(pmf_, "SourceModel");
  }

  size_t alphabet_size() const { return pmf_.size(); }
  double p(size_t x) const { return pmf_.at(x); }
  const std::vector<double>& pmf() const { return pmf_; }

 private:
  std::vector<double> pmf_;
};

inline double entropy(const SourceModel& m) { return entropy_bits(m.pmf()); }
inline double entropy(const Distribution& d) { return entropy_bits(d.probs); }

// H(X|Y) for joint[x][y] = P(X=x, Y=y).
inline double conditional_entropy(const ProbMatrix& joint_xy) {
  if (joint_xy.empty() || joint_xy[0].empty())
    throw std::invalid_argument("conditional_entropy: empty joint");
  size_t nx = joint_xy.size(), ny = joint_xy[0].size();
  KahanSum total;
  KahanSum h;
  for (size_t x = 0; x < nx; ++x) {
    if (joint_xy[x].size() != ny) throw std::invalid_argument("conditional_entropy: ragged joint");
    for (double p : joint_xy[x]) {
      if (!(p >= 0.0)) throw std::invalid_argument("conditional_entropy: negative entry");
      total.add(p);
    }
  }
  if (std::fabs(total.value() - 1.0) > kProbTol)
    throw std::invalid_argument("conditional_entropy: joint does not sum to 1");
  for (size_t y = 0; y < ny; ++y) {
    KahanSum py;
    for (size_t x = 0; x < nx; ++x) py.add(joint_xy[x][y]);
    double pyv = py.value();
    if (pyv <= 0.0) continue;
    for (size_t x = 0; x < nx; ++x) {
      double p = joint_xy[x][y];
      if (p > 0.0) h.add(-p * std::log2(p / pyv));
    }
  }
  return h.value();
}

// X -> Y -> W chain: P(x), P(y|x) rows and optionally P(w|y) rows.
// A missing W stage degenerates to a single constant side letter.
class JointSourceModel {
 public:
  JointSourceModel(SourceModel px, ProbMatrix py_given_x, ProbMatrix pw_given_y = {})
      : px_(std::move(px)), py_given_x_(std::move(py_given_x)), pw_given_y_(std::move(pw_given_y)) {
    detail::check_stochastic_rows(py_given_x_, px_.alphabet_size(), "JointSourceModel: P(y|x)");
    y_size_ = py_given_x_[0].size();
    if (pw_given_y_.empty())
      pw_given_y_.assign(y_size_, std::vector<double>{1.0});
    detail::check_stochastic_rows(pw_given_y_, y_size_, "JointSourceModel: P(w|y)");
    w_size_ = pw_given_y_[0].size();
  }

  const SourceModel& x_model() const { return px_; }
  size_t x_size() const { return px_.alphabet_size(); }
  size_t y_size() const { return y_size_; }
  size_t w_size() const { return w_size_; }
  const ProbMatrix& py_given_x() const { return py_given_x_; }
  const ProbMatrix& pw_given_y() const { return pw_given_y_; }

  ProbMatrix joint_xy() const {
    ProbMatrix j(x_size(), std::vector<double>(y_size_, 0.0));
    for (size_t x = 0; x < x_size(); ++x)
      for (size_t y = 0; y < y_size_; ++y) j[x][y] = px_.p(x) * py_given_x_[x][y];
    return j;
  }

  // Chains P(w|x) = sum_y P(y|x) P(w|y).
  ProbMatrix pw_given_x() const {
    ProbMatrix m(x_size(), std::vector<double>(w_size_, 0.0));
    for (size_t x = 0; x < x_size(); ++x)
      for (size_t y = 0; y < y_size_; ++y)
        for (size_t w = 0; w < w_size_; ++w)
          m[x][w] += py_given_x_[x][y] * pw_given_y_[y][w];
    return m;
  }

  ProbMatrix joint_xw() const {
    ProbMatrix m = pw_given_x();
    for (size_t x = 0; x < x_size(); ++x)
      for (size_t w = 0; w < w_size_; ++w) m[x][w] *= px_.p(x);
    return m;
  }

  std::vector<double> marginal_y() const {
    std::vector<double> py(y_size_, 0.0);
    for (size_t x = 0; x < x_size(); ++x)
      for (size_t y = 0; y < y_size_; ++y) py[y] += px_.p(x) * py_given_x_[x][y];
    return py;
  }

  double entropy_x_given_y() const { return conditional_entropy(joint_xy()); }
  double entropy_x_given_w() const { return conditional_entropy(joint_xw()); }

 private:
  SourceModel px_;
  ProbMatrix py_given_x_;
  ProbMatrix pw_given_y_;
  size_t y_size_ = 0;
  size_t w_size_ = 0;
};

namespace detail {

// Uniform double in [0,1) from the top 53 bits; mt19937_64 output is
// specified by the standard, so draws are platform independent.
inline double canonical_u01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline size_t sample_index(const std::vector<double>& cdf, double u) {
  size_t lo = 0, hi = cdf.size() - 1;
  while (lo < hi) {
    size_t mid = (lo + hi) / 2;
    if (u < cdf[mid]) hi = mid; else lo = mid + 1;
  }
  return lo;
}

}  // namespace detail

// Deterministic iid draw: same (model, n, seed) gives the same sequence.
inline std::vector<int> sample(const SourceModel& model, size_t n, uint64_t seed) {
  std::vector<double> cdf(model.alphabet_size());
  KahanSum acc;
  for (size_t x = 0; x < model.alphabet_size(); ++x) {
    acc.add(model.p(x));
    cdf[x] = acc.value();
  }
  cdf.back() = 1.0;
  std::mt19937_64 gen(seed);
  std::vector<int> out(n);
  for (size_t i = 0; i < n; ++i)
    out[i] = static_cast<int>(detail::sample_index(cdf, detail::canonical_u01(gen)));
  return out;
}

// Draws y^n given x^n through the per-letter channel P(y|x).
inline std::vector<int> sample_channel(const ProbMatrix& py_given_x, const std::vector<int>& xs,
                                       uint64_t seed) {
  std::vector<std::vector<double>> cdfs(py_given_x.size());
  for (size_t x = 0; x < py_given_x.size(); ++x) {
    KahanSum acc;
    cdfs[x].resize(py_given_x[x].size());
    for (size_t y = 0; y < py_given_x[x].size(); ++y) {
      acc.add(py_given_x[x][y]);
      cdfs[x][y] = acc.value();
    }
    cdfs[x].back() = 1.0;
  }
  std::mt19937_64 gen(seed);
  std::vector<int> out(xs.size());
  for (size_t i = 0; i < xs.size(); ++i)
    out[i] = static_cast<int>(detail::sample_index(cdfs.at(xs[i]), detail::canonical_u01(gen)));
  return out;
}

}
