#pragma once

#include <string>
#include <vector>

#include "peerrank/types.hpp"

namespace peerrank::testing {

inline ModelRegistry registry_of(std::initializer_list<const char*> ids) {
  std::vector<std::string> v(ids.begin(), ids.end());
  return ModelRegistry::from_strings(v);
}

inline Ranking ranking_of(std::initializer_list<const char*> ids) {
  Ranking r;
  for (const char* id : ids) r.order.emplace_back(id);
  return r;
}

inline Ranking ranking_from_sequence(const std::vector<int>& x) {
  // Model "r<k>" has reference rank k; position t holds reference rank x[t].
  Ranking r;
  for (int v : x) r.order.emplace_back("r" + std::to_string(100 + v));
  return r;
}

inline Ranking identity_ranking(std::size_t m) {
  Ranking r;
  for (std::size_t i = 1; i <= m; ++i) {
    r.order.emplace_back("r" + std::to_string(100 + i));
  }
  return r;
}

}  // namespace peerrank::testing
