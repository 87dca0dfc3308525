#include "peerrank/kernels.hpp"

#include <omp.h>

#include "peerrank/errors.hpp"

namespace peerrank::kernels {
namespace {

void check_records(std::span<const ReviewRecord> records, std::size_t m) {
  for (const auto& r : records) {
    if (r.model_a >= m || r.model_b >= m || r.reviewer >= m) {
      throw SchemaError("record references a model outside the registry");
    }
  }
}

inline void add_record(const ReviewRecord& r, const ContestTally& shape,
                       std::uint32_t* wins, std::uint32_t* ties) {
  switch (r.outcome) {
    case Outcome::kFirstWins:
      ++wins[shape.index(r.model_a, r.model_b, r.reviewer)];
      break;
    case Outcome::kSecondWins:
      ++wins[shape.index(r.model_b, r.model_a, r.reviewer)];
      break;
    case Outcome::kTie:
      ++ties[shape.index(r.model_a, r.model_b, r.reviewer)];
      ++ties[shape.index(r.model_b, r.model_a, r.reviewer)];
      break;
  }
}

ContestTally empty_tally(std::size_t m) {
  ContestTally t;
  t.m = m;
  t.wins.assign(m * m * m, 0);
  t.ties.assign(m * m * m, 0);
  return t;
}

inline double plain_row(std::span<const double> credit,
                        std::span<const double> weights,
                        const ActiveMask& active, std::size_t m,
                        std::size_t j) {
  double g = 0.0;
  const double* row = credit.data() + j * m;
  for (std::size_t s = 0; s < m; ++s) {
    if (active[s]) g += row[s] * weights[s];
  }
  return g;
}

inline double rank_row(const ContestTally& t, std::span<const double> weights,
                       const ActiveMask& active, std::span<const double> ranks,
                       double k_const, std::size_t j) {
  const std::size_t m = t.m;
  double g = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    if (k == j) continue;
    const double win_value = 1.0 + (ranks[j] - ranks[k]) / k_const;
    const std::size_t base = t.index(j, k, 0);
    for (std::size_t s = 0; s < m; ++s) {
      if (!active[s]) continue;
      const double credit =
          t.wins[base + s] * win_value + 0.5 * t.ties[base + s];
      g += credit * weights[s];
    }
  }
  return g;
}

}  // namespace

ContestTally tally_serial(std::span<const ReviewRecord> records,
                          std::size_t m) {
  check_records(records, m);
  ContestTally t = empty_tally(m);
  for (const auto& r : records) add_record(r, t, t.wins.data(), t.ties.data());
  return t;
}

ContestTally tally_parallel(std::span<const ReviewRecord> records,
                            std::size_t m) {
  check_records(records, m);
  ContestTally t = empty_tally(m);
  const auto n = static_cast<std::int64_t>(records.size());
#pragma omp parallel
  {
    std::vector<std::uint32_t> wins(t.wins.size(), 0);
    std::vector<std::uint32_t> ties(t.ties.size(), 0);
#pragma omp for schedule(static) nowait
    for (std::int64_t i = 0; i < n; ++i) {
      add_record(records[static_cast<std::size_t>(i)], t, wins.data(),
                 ties.data());
    }
#pragma omp critical(peerrank_tally_merge)
    {
      for (std::size_t c = 0; c < wins.size(); ++c) {
        t.wins[c] += wins[c];
        t.ties[c] += ties[c];
      }
    }
  }
  return t;
}

std::vector<double> credit_matrix(const ContestTally& tally,
                                  double tie_credit) {
  const std::size_t m = tally.m;
  std::vector<double> c(m * m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t base = tally.index(j, k, 0);
      for (std::size_t s = 0; s < m; ++s) {
        c[j * m + s] += tally.wins[base + s] + tie_credit * tally.ties[base + s];
      }
    }
  }
  return c;
}

void plain_scores_serial(std::span<const double> credit,
                         std::span<const double> weights,
                         const ActiveMask& active, std::span<double> out) {
  const std::size_t m = out.size();
  for (std::size_t j = 0; j < m; ++j) {
    out[j] = plain_row(credit, weights, active, m, j);
  }
}

void plain_scores_parallel(std::span<const double> credit,
                           std::span<const double> weights,
                           const ActiveMask& active, std::span<double> out) {
  const auto m = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < m; ++j) {
    out[static_cast<std::size_t>(j)] = plain_row(
        credit, weights, active, out.size(), static_cast<std::size_t>(j));
  }
}

void rank_pass_serial(const ContestTally& tally, std::span<const double> weights,
                      const ActiveMask& active, std::span<const double> ranks,
                      double k_const, std::span<double> out) {
  for (std::size_t j = 0; j < tally.m; ++j) {
    out[j] = rank_row(tally, weights, active, ranks, k_const, j);
  }
}

void rank_pass_parallel(const ContestTally& tally,
                        std::span<const double> weights,
                        const ActiveMask& active, std::span<const double> ranks,
                        double k_const, std::span<double> out) {
  const auto m = static_cast<std::int64_t>(tally.m);
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < m; ++j) {
    out[static_cast<std::size_t>(j)] = rank_row(
        tally, weights, active, ranks, k_const, static_cast<std::size_t>(j));
  }
}

}  // namespace peerrank::kernels
