#pragma once

#include <algorithm>
#include <cstdint>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "zdsec/bits.hpp"
#include "zdsec/errors.hpp"
#include "zdsec/numerics.hpp"
#include "zdsec/source_model.hpp"

namespace zdsec {

// Multiset of codeword lengths, kept sorted ascending.
struct LengthProfile {
  std::vector<int> lengths;

  friend bool operator==(const LengthProfile& a, const LengthProfile& b) {
    return a.lengths == b.lengths;
  }
};

// Binary prefix code over symbols 0..k-1. Construction validates that no
// codeword is a prefix of another and builds the parsing trie.
class InstantaneousCode {
 public:
  struct Parse {
    int symbol;
    size_t consumed;
  };

  explicit InstantaneousCode(std::vector<Bits> codewords) : cw_(std::move(codewords)) {
    if (cw_.empty()) throw std::invalid_argument("InstantaneousCode: no codewords");
    nodes_.push_back(Node{});
    for (size_t x = 0; x < cw_.size(); ++x) {
      if (cw_[x].empty()) throw std::invalid_argument("InstantaneousCode: empty codeword");
      max_len_ = std::max(max_len_, cw_[x].size());
      insert(cw_[x], static_cast<int>(x));
    }
  }

  size_t alphabet_size() const { return cw_.size(); }
  const Bits& codeword(size_t x) const { return cw_.at(x); }
  size_t length(size_t x) const { return cw_.at(x).size(); }
  size_t max_length() const { return max_len_; }

  double kraft_sum() const {
    KahanSum k;
    for (const Bits& c : cw_) k.add(std::ldexp(1.0, -static_cast<int>(c.size())));
    return k.value();
  }

  LengthProfile profile() const {
    LengthProfile p;
    p.lengths.reserve(cw_.size());
    for (const Bits& c : cw_) p.lengths.push_back(static_cast<int>(c.size()));
    std::sort(p.lengths.begin(), p.lengths.end());
    return p;
  }

  // Trie walk interface used by the streaming decoders: start at root(),
  // step() per bit, symbol_at() >= 0 once a codeword ends.
  int root() const { return 0; }
  int step(int node, int bit) const { return nodes_[static_cast<size_t>(node)].child[bit & 1]; }
  int symbol_at(int node) const {
    return node < 0 ? -1 : nodes_[static_cast<size_t>(node)].symbol;
  }

  Parse parse_prefix(const Bits& bits, size_t offset = 0) const {
    int node = root();
    for (size_t i = offset; i < bits.size(); ++i) {
      node = step(node, bits[i]);
      if (node < 0) throw NoCodewordPrefix("parse_prefix: walked off the code trie");
      int sym = symbol_at(node);
      if (sym >= 0) return Parse{sym, i + 1 - offset};
    }
    throw NoCodewordPrefix("parse_prefix: input ends inside a codeword");
  }

  // One line per symbol: "<symbol>\t<bitstring>".
  std::string serialize() const {
    std::ostringstream os;
    for (size_t x = 0; x < cw_.size(); ++x) os << x << '\t' << cw_[x].to_string() << '\n';
    return os.str();
  }

  static InstantaneousCode deserialize(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::vector<std::pair<size_t, Bits>> rows;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      auto tab = line.find('\t');
      if (tab == std::string::npos) throw ConfigError("code deserialize: missing tab");
      size_t sym = 0;
      try {
        sym = static_cast<size_t>(std::stoull(line.substr(0, tab)));
      } catch (const std::exception&) {
        throw ConfigError("code deserialize: bad symbol index");
      }
      rows.emplace_back(sym, Bits::from_string(line.substr(tab + 1)));
    }
    std::vector<Bits> cw(rows.size());
    std::vector<bool> seen(rows.size(), false);
    for (auto& [sym, bits] : rows) {
      if (sym >= rows.size() || seen[sym])
        throw ConfigError("code deserialize: symbols must be 0..k-1, each once");
      seen[sym] = true;
      cw[sym] = std::move(bits);
    }
    return InstantaneousCode(std::move(cw));
  }

 private:
  struct Node {
    int child[2] = {-1, -1};
    int symbol = -1;
  };

  void insert(const Bits& word, int symbol) {
    int node = 0;
    for (size_t i = 0; i < word.size(); ++i) {
      if (nodes_[static_cast<size_t>(node)].symbol >= 0)
        throw std::invalid_argument("InstantaneousCode: codeword is prefix of another");
      int next = nodes_[static_cast<size_t>(node)].child[word[i]];
      if (next < 0) {
        next = static_cast<int>(nodes_.size());
        nodes_.push_back(Node{});  // may reallocate; re-index the parent
        nodes_[static_cast<size_t>(node)].child[word[i]] = next;
      }
      node = next;
    }
    Node& leaf = nodes_[static_cast<size_t>(node)];
    if (leaf.symbol >= 0 || leaf.child[0] >= 0 || leaf.child[1] >= 0)
      throw std::invalid_argument("InstantaneousCode: codeword is prefix of another");
    leaf.symbol = symbol;
  }

  std::vector<Bits> cw_;
  std::vector<Node> nodes_;
  size_t max_len_ = 0;
};

// Huffman code with a fixed deterministic shape: the two lowest-probability
// nodes merge first, probability ties broken toward the lower node id (leaf
// ids are symbol indices, merge ids follow), and within a merge the lower id
// takes bit 0. A singleton alphabet still gets the 1-bit codeword "0".
inline InstantaneousCode build_huffman(const SourceModel& model) {
  size_t k = model.alphabet_size();
  if (k == 1) return InstantaneousCode({Bits::from_string("0")});

  struct Entry {
    double p;
    int id;
  };
  auto cmp = [](const Entry& a, const Entry& b) {
    if (a.p != b.p) return a.p > b.p;
    return a.id > b.id;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);
  // parent/bit per node; ids 0..k-1 are leaves.
  std::vector<int> parent(2 * k - 1, -1);
  std::vector<int> branch(2 * k - 1, 0);
  for (size_t x = 0; x < k; ++x) heap.push(Entry{model.p(x), static_cast<int>(x)});
  int next_id = static_cast<int>(k);
  while (heap.size() > 1) {
    Entry a = heap.top(); heap.pop();
    Entry b = heap.top(); heap.pop();
    // a popped first, so a.id < b.id on ties; lower id gets bit 0.
    int lo = a.id < b.id ? a.id : b.id;
    int hi = a.id < b.id ? b.id : a.id;
    parent[static_cast<size_t>(lo)] = next_id;
    branch[static_cast<size_t>(lo)] = 0;
    parent[static_cast<size_t>(hi)] = next_id;
    branch[static_cast<size_t>(hi)] = 1;
    heap.push(Entry{a.p + b.p, next_id});
    ++next_id;
  }
  std::vector<Bits> cw(k);
  for (size_t x = 0; x < k; ++x) {
    std::vector<int> rev;
    for (int node = static_cast<int>(x); parent[static_cast<size_t>(node)] >= 0;
         node = parent[static_cast<size_t>(node)])
      rev.push_back(branch[static_cast<size_t>(node)]);
    Bits b;
    for (auto it = rev.rbegin(); it != rev.rend(); ++it) b.push_back(*it);
    cw[x] = std::move(b);
  }
  return InstantaneousCode(std::move(cw));
}

inline double expected_length(const InstantaneousCode& code, const SourceModel& model) {
  if (code.alphabet_size() != model.alphabet_size())
    throw std::invalid_argument("expected_length: alphabet mismatch");
  KahanSum k;
  for (size_t x = 0; x < model.alphabet_size(); ++x)
    k.add(model.p(x) * static_cast<double>(code.length(x)));
  return k.value();
}

inline double huffman_length(const SourceModel& model) {
  return expected_length(build_huffman(model), model);
}

// sum_y P(y) * (optimal expected length for P(.|y) over the full X alphabet);
// zero-probability conditionals still occupy codewords, per the integer
// length-function definition. joint[x][y] = P(x,y).
inline double conditional_huffman_length(const ProbMatrix& joint_xy) {
  if (joint_xy.empty() || joint_xy[0].empty())
    throw std::invalid_argument("conditional_huffman_length: empty joint");
  size_t nx = joint_xy.size(), ny = joint_xy[0].size();
  KahanSum total;
  for (size_t x = 0; x < nx; ++x) {
    if (joint_xy[x].size() != ny)
      throw std::invalid_argument("conditional_huffman_length: ragged joint");
    for (double p : joint_xy[x]) {
      if (!(p >= 0.0)) throw std::invalid_argument("conditional_huffman_length: negative entry");
      total.add(p);
    }
  }
  if (std::fabs(total.value() - 1.0) > kProbTol)
    throw std::invalid_argument("conditional_huffman_length: joint does not sum to 1");
  KahanSum acc;
  for (size_t y = 0; y < ny; ++y) {
    KahanSum py;
    for (size_t x = 0; x < nx; ++x) py.add(joint_xy[x][y]);
    double pyv = py.value();
    if (pyv <= 0.0) continue;
    std::vector<double> cond(nx);
    for (size_t x = 0; x < nx; ++x) cond[x] = joint_xy[x][y] / pyv;
    // Renormalize residual rounding into the largest entry so the pmf check
    // of the temporary model cannot trip on 1e-16 dust.
    double s = kahan_total(cond);
    size_t arg = static_cast<size_t>(
        std::max_element(cond.begin(), cond.end()) - cond.begin());
    cond[arg] += 1.0 - s;
    acc.add(pyv * huffman_length(SourceModel(cond)));
  }
  return acc.value();
}

// All length multisets with Kraft sum exactly 1 (complete code trees) on a
// k-symbol alphabet, ascending lengths, deterministic order. k = 1 has no
// such profile under integer lengths >= 1 and yields the empty set.
inline std::vector<LengthProfile> enumerate_complete_profiles(size_t alphabet_size) {
  if (alphabet_size == 0)
    throw std::invalid_argument("enumerate_complete_profiles: empty alphabet");
  if (alphabet_size == 1) return {};
  if (alphabet_size > 26)
    throw StateSpaceTooLarge("enumerate_complete_profiles: alphabet too large");
  int dmax = static_cast<int>(alphabet_size) - 1;
  uint64_t capacity = 1ull << dmax;  // Kraft budget in units of 2^-dmax
  std::vector<LengthProfile> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, size_t left, int min_len, uint64_t cap) -> void {
    if (left == 0) {
      if (cap == 0) out.push_back(LengthProfile{cur});
      return;
    }
    for (int l = min_len; l <= dmax; ++l) {
      uint64_t cost = 1ull << (dmax - l);
      // Remaining symbols need at least one unit each and can grab at most
      // `cost` units each (lengths are non-decreasing from here).
      if (cost + (left - 1) > cap) continue;
      if (left * cost < cap) break;
      cur.push_back(l);
      self(self, left - 1, l, cap - cost);
      cur.pop_back();
    }
  };
  rec(rec, alphabet_size, 1, capacity);
  return out;
}

// Expected-length-minimizing symbol assignment for a profile: descending
// probability takes ascending length, probability ties toward the lower
// symbol index.
inline std::vector<int> assign_profile(const LengthProfile& profile, const SourceModel& model) {
  if (profile.lengths.size() != model.alphabet_size())
    throw std::invalid_argument("assign_profile: alphabet mismatch");
  std::vector<size_t> order(model.alphabet_size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (model.p(a) != model.p(b)) return model.p(a) > model.p(b);
    return a < b;
  });
  std::vector<int> lengths(model.alphabet_size());
  for (size_t rank = 0; rank < order.size(); ++rank)
    lengths[order[rank]] = profile.lengths[rank];
  return lengths;
}

// Canonical realization of per-symbol lengths: symbols sorted by
// (length, index) receive lexicographically increasing codewords.
inline InstantaneousCode canonical_code(const std::vector<int>& lengths) {
  if (lengths.empty()) throw std::invalid_argument("canonical_code: no lengths");
  std::vector<size_t> order(lengths.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (lengths[a] != lengths[b]) return lengths[a] < lengths[b];
    return a < b;
  });
  std::vector<Bits> cw(lengths.size());
  uint64_t next = 0;
  int prev_len = 0;
  for (size_t sym : order) {
    int l = lengths[sym];
    if (l < 1 || l > 62) throw std::invalid_argument("canonical_code: bad length");
    next <<= (l - prev_len);
    cw[sym] = Bits::from_uint(next, static_cast<size_t>(l));
    ++next;
    prev_len = l;
  }
  return InstantaneousCode(std::move(cw));
}

inline InstantaneousCode code_for_profile(const LengthProfile& profile, const SourceModel& model) {
  return canonical_code(assign_profile(profile, model));
}

}
