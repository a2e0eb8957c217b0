#include "grouprec/cbn.hpp"

#include <cmath>

namespace grouprec {

std::vector<TrainingExample> positive_examples(const InteractionDataset& train) {
  std::vector<TrainingExample> out;
  out.reserve(train.interactions().size());
  for (const auto& [u, j] : train.interactions()) out.push_back({u, j, train.topic_of(j), 1});
  return out;
}

std::vector<TrainingExample> sample_negatives(const InteractionDataset& train, double ratio, std::uint64_t seed) {
  if (!(ratio >= 0)) throw InputError("negative_ratio must be non-negative");
  std::vector<TrainingExample> out;
  if (ratio == 0) return out;

  Rng rng = make_rng(seed, 0x4e4547ULL);
  const auto by_user = train.items_by_user();
  std::vector<Index> candidates;
  for (std::size_t u = 0; u < by_user.size(); ++u) {
    const auto& positives = by_user[u];  // ascending
    if (positives.empty()) continue;
    candidates.clear();
    std::size_t next = 0;
    for (Index j = 0; j < train.num_items(); ++j) {
      if (next < positives.size() && positives[next] == j) {
        ++next;
        continue;
      }
      candidates.push_back(j);
    }
    const auto wanted = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(positives.size())));
    const auto take = std::min(wanted, candidates.size());
    // Partial Fisher-Yates over the candidates.
    for (std::size_t k = 0; k < take; ++k) {
      const auto pick = k + uniform_below(rng, candidates.size() - k);
      std::swap(candidates[k], candidates[pick]);
      out.push_back({static_cast<Index>(u), candidates[k], train.topic_of(candidates[k]), 0});
    }
  }
  return out;
}

}  // namespace grouprec
