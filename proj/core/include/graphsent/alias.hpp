#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "graphsent/rng.hpp"

namespace graphsent {

// Walker/Vose alias method: O(n) construction, O(1) sampling from a fixed
// categorical distribution.
class AliasTable {
 public:
  AliasTable() = default;
  // weights must be nonnegative with a positive sum.
  explicit AliasTable(std::span<const double> weights);

  int sample(Rng& rng) const {
    const std::size_t slot = static_cast<std::size_t>(rng.next_below(prob_.size()));
    return rng.next_double() < prob_[slot] ? static_cast<int>(slot) : alias_[slot];
  }

  std::size_t size() const { return prob_.size(); }

  // Exact probability the sampler assigns to outcome i; for verification.
  double probability(std::size_t i) const;

 private:
  std::vector<double> prob_;
  std::vector<int> alias_;
};

}  // namespace graphsent
