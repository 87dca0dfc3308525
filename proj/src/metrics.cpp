#include "peerrank/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "peerrank/errors.hpp"

namespace peerrank {
namespace {

long long merge_count(std::vector<int>& v, std::vector<int>& buf,
                      std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  long long count = merge_count(v, buf, lo, mid) + merge_count(v, buf, mid, hi);
  std::size_t i = lo, j = mid, out = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      count += static_cast<long long>(mid - i);
      buf[out++] = v[j++];
    } else {
      buf[out++] = v[i++];
    }
  }
  while (i < mid) buf[out++] = v[i++];
  while (j < hi) buf[out++] = v[j++];
  std::copy(buf.begin() + static_cast<long>(lo), buf.begin() + static_cast<long>(hi),
            v.begin() + static_cast<long>(lo));
  return count;
}

void check_k(int k, std::size_t m) {
  if (k < 1 || static_cast<std::size_t>(k) > m) {
    throw ArgumentError("K=" + std::to_string(k) + " outside [1, " +
                        std::to_string(m) + "]");
  }
}

std::unordered_set<std::string> top_k(const Ranking& r, int k) {
  std::unordered_set<std::string> ids;
  for (int i = 0; i < k; ++i) ids.insert(r.order[static_cast<std::size_t>(i)].str());
  return ids;
}

}  // namespace

std::vector<int> rank_sequence(const Ranking& learned,
                               const Ranking& reference) {
  const std::size_t m = reference.order.size();
  if (learned.order.size() != m) {
    throw SchemaError("rankings differ in length (" +
                      std::to_string(learned.order.size()) + " vs " +
                      std::to_string(m) + ")");
  }
  std::unordered_map<std::string, int> ref_rank;
  for (std::size_t i = 0; i < m; ++i) {
    if (!ref_rank.emplace(reference.order[i].str(), static_cast<int>(i + 1)).second) {
      throw SchemaError("reference ranking lists '" + reference.order[i].str() +
                        "' twice");
    }
  }
  std::vector<int> x;
  x.reserve(m);
  std::vector<char> seen(m + 1, 0);
  for (const auto& id : learned.order) {
    auto it = ref_rank.find(id.str());
    if (it == ref_rank.end()) {
      throw SchemaError("model '" + id.str() + "' missing from reference");
    }
    if (seen[static_cast<std::size_t>(it->second)]++) {
      throw SchemaError("learned ranking lists '" + id.str() + "' twice");
    }
    x.push_back(it->second);
  }
  return x;
}

double spearman(const Ranking& learned, const Ranking& reference) {
  const auto x = rank_sequence(learned, reference);
  const double m = static_cast<double>(x.size());
  if (x.size() < 2) throw ArgumentError("spearman needs m >= 2");
  double d2 = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    const double d = static_cast<double>(t + 1) - x[t];
    d2 += d * d;
  }
  return 1.0 - 6.0 * d2 / (m * (m * m - 1.0));
}

double kendall(const Ranking& learned, const Ranking& reference) {
  const auto x = rank_sequence(learned, reference);
  if (x.size() < 2) throw ArgumentError("kendall needs m >= 2");
  long long concordant = 0, discordant = 0;
  for (std::size_t s = 0; s < x.size(); ++s) {
    for (std::size_t t = s + 1; t < x.size(); ++t) {
      (x[s] < x[t] ? concordant : discordant) += 1;
    }
  }
  const double m = static_cast<double>(x.size());
  return static_cast<double>(concordant - discordant) / (m * (m - 1.0) / 2.0);
}

double permutation_entropy(const std::vector<int>& x, int k) {
  if (k < 2) throw ArgumentError("permutation entropy needs k >= 2");
  if (x.size() < static_cast<std::size_t>(k)) {
    throw ArgumentError("permutation entropy needs m >= k");
  }
  const std::size_t windows = x.size() - static_cast<std::size_t>(k) + 1;
  std::map<std::vector<int>, std::size_t> counts;
  std::vector<int> pattern(static_cast<std::size_t>(k));
  for (std::size_t t = 0; t < windows; ++t) {
    std::iota(pattern.begin(), pattern.end(), 0);
    std::sort(pattern.begin(), pattern.end(), [&](int a, int b) {
      return x[t + static_cast<std::size_t>(a)] < x[t + static_cast<std::size_t>(b)];
    });
    ++counts[pattern];
  }
  double h = 0.0;
  for (const auto& [p, c] : counts) {
    const double prob = static_cast<double>(c) / static_cast<double>(windows);
    h -= prob * std::log(prob);
  }
  return h == 0.0 ? 0.0 : h;
}

double permutation_entropy(const Ranking& learned, const Ranking& reference,
                           int k) {
  return permutation_entropy(rank_sequence(learned, reference), k);
}

long long count_inversions(const std::vector<int>& x) {
  std::vector<int> v = x;
  std::vector<int> buf(v.size());
  return merge_count(v, buf, 0, v.size());
}

long long count_inversions(const Ranking& learned, const Ranking& reference) {
  return count_inversions(rank_sequence(learned, reference));
}

int longest_increasing_subsequence(const std::vector<int>& x) {
  std::vector<int> dp(x.size(), 1);
  int best = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (x[j] < x[i]) dp[i] = std::max(dp[i], dp[j] + 1);
    }
    best = std::max(best, dp[i]);
  }
  return best;
}

int lis(const Ranking& learned, const Ranking& reference) {
  return longest_increasing_subsequence(rank_sequence(learned, reference));
}

double precision_at_k(const Ranking& learned, const Ranking& reference,
                      int k) {
  rank_sequence(learned, reference);
  check_k(k, reference.order.size());
  const auto ref_top = top_k(reference, k);
  int hits = 0;
  for (int i = 0; i < k; ++i) {
    hits += ref_top.count(learned.order[static_cast<std::size_t>(i)].str()) > 0;
  }
  return static_cast<double>(hits) / k;
}

double rbp_at_k(const Ranking& learned, const Ranking& reference, int k,
                double persistence) {
  rank_sequence(learned, reference);
  check_k(k, reference.order.size());
  if (!(persistence > 0 && persistence < 1)) {
    throw ArgumentError("RBP persistence must be in (0, 1)");
  }
  const auto ref_top = top_k(reference, k);
  double sum = 0.0;
  double weight = 1.0;
  for (int i = 0; i < k; ++i) {
    if (ref_top.count(learned.order[static_cast<std::size_t>(i)].str())) {
      sum += weight;
    }
    weight *= persistence;
  }
  return (1.0 - persistence) * sum;
}

AlignmentReport alignment_report(const Ranking& learned,
                                 const Ranking& reference,
                                 const std::vector<int>& ks,
                                 double persistence, int pen_k) {
  const auto x = rank_sequence(learned, reference);
  AlignmentReport r;
  r.spearman = spearman(learned, reference);
  r.kendall = kendall(learned, reference);
  r.pen = x.size() >= static_cast<std::size_t>(pen_k)
              ? permutation_entropy(x, pen_k)
              : 0.0;
  r.cin = count_inversions(x);
  r.lis = longest_increasing_subsequence(x);
  for (int k : ks) {
    if (k >= 1 && static_cast<std::size_t>(k) <= x.size()) {
      r.precision_at[k] = precision_at_k(learned, reference, k);
      r.rbp_at[k] = rbp_at_k(learned, reference, k, persistence);
    }
  }
  return r;
}

}  // namespace peerrank
