#pragma once

// Alignment metrics between a learned ranking and a reference ranking.
//
// Every metric first maps the pair to a rank sequence x, where x[t] is the
// 1-based reference rank of the model at learned position t. A perfect
// ranking yields x = 1, 2, ..., m.

#include <map>
#include <vector>

#include "peerrank/types.hpp"

namespace peerrank {

// Throws SchemaError unless both rankings order the same set of models.
std::vector<int> rank_sequence(const Ranking& learned,
                               const Ranking& reference);

double spearman(const Ranking& learned, const Ranking& reference);
double kendall(const Ranking& learned, const Ranking& reference);
double permutation_entropy(const Ranking& learned, const Ranking& reference,
                           int k = 3);
long long count_inversions(const Ranking& learned, const Ranking& reference);
int lis(const Ranking& learned, const Ranking& reference);
double precision_at_k(const Ranking& learned, const Ranking& reference, int k);
double rbp_at_k(const Ranking& learned, const Ranking& reference, int k,
                double persistence = 0.8);

// Sequence-level forms, for callers that already hold x.
double permutation_entropy(const std::vector<int>& x, int k);
long long count_inversions(const std::vector<int>& x);
int longest_increasing_subsequence(const std::vector<int>& x);

struct AlignmentReport {
  double spearman = 0.0;
  double kendall = 0.0;
  double pen = 0.0;
  long long cin = 0;
  int lis = 0;
  std::map<int, double> precision_at;
  std::map<int, double> rbp_at;
};

// Precision and RBP are reported for each K in `ks` that does not exceed m.
AlignmentReport alignment_report(const Ranking& learned,
                                 const Ranking& reference,
                                 const std::vector<int>& ks = {8, 9, 10},
                                 double persistence = 0.8, int pen_k = 3);

}  // namespace peerrank
