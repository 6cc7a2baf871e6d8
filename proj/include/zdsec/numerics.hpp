#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace zdsec {

inline constexpr double kProbTol = 1e-12;

// Compensated accumulation; long convolutions must not drift.
class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

inline double kahan_total(const std::vector<double>& xs) {
  KahanSum k;
  for (double x : xs) k.add(x);
  return k.value();
}

// p*log2(p) with the 0*log(0)=0 convention.
inline double plog2p(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

inline double entropy_bits(const std::vector<double>& probs) {
  KahanSum k;
  for (double p : probs) {
    if (p < -kProbTol) throw std::invalid_argument("entropy_bits: negative probability");
    k.add(-plog2p(p));
  }
  return k.value();
}

inline double binary_entropy(double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("binary_entropy: p outside [0,1]");
  return -plog2p(p) - plog2p(1.0 - p);
}

// Total variation distance, (1/2)*sum |p_i - q_i|, over aligned supports.
inline double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw std::invalid_argument("total_variation: size mismatch");
  KahanSum k;
  for (size_t i = 0; i < p.size(); ++i) k.add(std::fabs(p[i] - q[i]));
  return 0.5 * k.value();
}

}
