#pragma once

// Data-parallel scoring kernels. Every kernel has a serial reference version
// and an OpenMP version that must agree with it bit for bit: tallies are
// integer counts, and per-model sums run in the same order in both.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "peerrank/types.hpp"

namespace peerrank::kernels {

// Win and tie counts per (contestant j, opponent k, reviewer s).
struct ContestTally {
  std::size_t m = 0;
  std::vector<std::uint32_t> wins;
  std::vector<std::uint32_t> ties;

  std::size_t index(ModelIndex j, ModelIndex k, ModelIndex s) const {
    return (j * m + k) * m + s;
  }

  friend bool operator==(const ContestTally&, const ContestTally&) = default;
};

ContestTally tally_serial(std::span<const ReviewRecord> records, std::size_t m);
ContestTally tally_parallel(std::span<const ReviewRecord> records,
                            std::size_t m);

// Row-major m x m matrix C with C[j][s] = sum over opponents of
// wins + tie_credit * ties, so that plain scores are G = C w.
std::vector<double> credit_matrix(const ContestTally& tally, double tie_credit);

// G_j = sum over active s of C[j][s] * w_s.
void plain_scores_serial(std::span<const double> credit,
                         std::span<const double> weights,
                         const ActiveMask& active, std::span<double> out);
void plain_scores_parallel(std::span<const double> credit,
                           std::span<const double> weights,
                           const ActiveMask& active, std::span<double> out);

// One pass of rank-credit scoring: a win over k is worth
// 1 + (rank_j - rank_k) / K, a tie 0.5, each multiplied by the reviewer weight.
void rank_pass_serial(const ContestTally& tally, std::span<const double> weights,
                      const ActiveMask& active, std::span<const double> ranks,
                      double k_const, std::span<double> out);
void rank_pass_parallel(const ContestTally& tally,
                        std::span<const double> weights,
                        const ActiveMask& active, std::span<const double> ranks,
                        double k_const, std::span<double> out);

}  // namespace peerrank::kernels
