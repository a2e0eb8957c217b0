#include "grouprec/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace grouprec {

namespace {

template <typename T>
void sort_unique(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

InteractionDataset InteractionDataset::make(std::vector<std::string> user_ids, std::vector<std::string> item_ids,
                                            std::vector<UserItem> interactions, std::vector<UserPair> social_edges,
                                            std::vector<int> topic_of_item, int num_topics) {
  if (num_topics < 1) throw InputError("number of topics must be positive");
  if (topic_of_item.size() != item_ids.size()) throw InputError("every item needs exactly one topic");
  for (int t : topic_of_item)
    if (t < 0 || t >= num_topics)
      throw InputError("topic index " + std::to_string(t) + " outside [0, " + std::to_string(num_topics) + ")");

  const auto users = static_cast<Index>(user_ids.size());
  const auto items = static_cast<Index>(item_ids.size());
  for (const auto& [u, j] : interactions)
    if (u < 0 || u >= users || j < 0 || j >= items) throw InputError("interaction references unknown user or item");
  for (auto& [a, b] : social_edges) {
    if (a < 0 || a >= users || b < 0 || b >= users) throw InputError("social edge references unknown user");
    if (a == b) throw InputError("social edge is a self-loop");
    if (a > b) std::swap(a, b);
  }
  sort_unique(interactions);
  sort_unique(social_edges);

  InteractionDataset ds;
  ds.user_ids_ = std::move(user_ids);
  ds.item_ids_ = std::move(item_ids);
  ds.interactions_ = std::move(interactions);
  ds.social_edges_ = std::move(social_edges);
  ds.topic_of_item_ = std::move(topic_of_item);
  ds.num_topics_ = num_topics;
  return ds;
}

std::vector<std::vector<Index>> InteractionDataset::items_by_user() const {
  std::vector<std::vector<Index>> out(user_ids_.size());
  for (const auto& [u, j] : interactions_) out[static_cast<std::size_t>(u)].push_back(j);
  return out;
}

std::vector<Index> InteractionDataset::interaction_counts() const {
  std::vector<Index> out(user_ids_.size(), 0);
  for (const auto& [u, j] : interactions_) ++out[static_cast<std::size_t>(u)];
  return out;
}

bool InteractionDataset::has_edge(Index a, Index b) const {
  if (a > b) std::swap(a, b);
  return std::binary_search(social_edges_.begin(), social_edges_.end(), UserPair{a, b});
}

InteractionDataset InteractionDataset::with_interactions(std::vector<UserItem> interactions) const {
  return make(user_ids_, item_ids_, std::move(interactions), social_edges_, topic_of_item_, num_topics_);
}

double social_density(Index internal_edges, Index group_size) {
  if (group_size < 2) return 0.0;
  return 2.0 * static_cast<double>(internal_edges) / (static_cast<double>(group_size) * (group_size - 1));
}

double Group::social_density() const { return grouprec::social_density(internal_edges, size()); }

Index count_internal_edges(const InteractionDataset& ds, const std::vector<Index>& members) {
  Index edges = 0;
  for (std::size_t a = 0; a < members.size(); ++a)
    for (std::size_t b = a + 1; b < members.size(); ++b) edges += ds.has_edge(members[a], members[b]);
  return edges;
}

InteractionDataset filter_inactive(const InteractionDataset& ds, Index min_interactions) {
  if (min_interactions < 1) throw InputError("min_interactions must be at least 1");

  // Items are kept, so the second pass is always a no-op.
  InteractionDataset current = ds;
  for (;;) {
    const auto counts = current.interaction_counts();
    std::vector<Index> remap(counts.size(), -1);
    std::vector<std::string> kept_ids;
    for (std::size_t u = 0; u < counts.size(); ++u) {
      if (counts[u] >= min_interactions) {
        remap[u] = static_cast<Index>(kept_ids.size());
        kept_ids.push_back(current.user_ids()[u]);
      }
    }
    if (kept_ids.empty()) throw InputError("no user has at least " + std::to_string(min_interactions) + " interactions");
    if (kept_ids.size() == counts.size()) return current;

    std::vector<UserItem> interactions;
    for (const auto& [u, j] : current.interactions())
      if (remap[static_cast<std::size_t>(u)] >= 0) interactions.emplace_back(remap[static_cast<std::size_t>(u)], j);
    std::vector<UserPair> edges;
    for (const auto& [a, b] : current.social_edges()) {
      const Index ra = remap[static_cast<std::size_t>(a)];
      const Index rb = remap[static_cast<std::size_t>(b)];
      if (ra >= 0 && rb >= 0) edges.emplace_back(ra, rb);
    }
    current = InteractionDataset::make(std::move(kept_ids), current.item_ids(), std::move(interactions),
                                       std::move(edges), current.topic_of_item(), current.num_topics());
  }
}

GroupSampling build_groups(const InteractionDataset& ds, Index group_size, Index num_groups, double min_density,
                           std::uint64_t seed) {
  if (group_size < 2) throw InputError("group_size must be at least 2");
  if (!(min_density >= 0.0 && min_density <= 1.0)) throw InputError("min_density must lie in [0, 1]");
  if (num_groups < 0) throw InputError("num_groups must be non-negative");
  if (group_size > ds.num_users())
    throw InputError("group_size " + std::to_string(group_size) + " exceeds the number of users");

  GroupSampling out;
  const auto budget = static_cast<std::size_t>(1000) * static_cast<std::size_t>(num_groups);
  Rng rng = make_rng(seed, 0x47524f5550ULL);
  std::vector<Index> pool(static_cast<std::size_t>(ds.num_users()));
  for (std::size_t u = 0; u < pool.size(); ++u) pool[u] = static_cast<Index>(u);

  while (static_cast<Index>(out.groups.size()) < num_groups && out.attempts < budget) {
    ++out.attempts;
    // Partial Fisher-Yates: the first group_size slots become the sample.
    for (Index k = 0; k < group_size; ++k) {
      const auto remaining = static_cast<std::uint64_t>(ds.num_users() - k);
      const auto pick = static_cast<std::size_t>(k) + uniform_below(rng, remaining);
      std::swap(pool[static_cast<std::size_t>(k)], pool[pick]);
    }
    Group g;
    g.members.assign(pool.begin(), pool.begin() + group_size);
    std::sort(g.members.begin(), g.members.end());
    g.internal_edges = count_internal_edges(ds, g.members);
    if (g.social_density() >= min_density) {
      g.id = static_cast<Index>(out.groups.size());
      out.groups.push_back(std::move(g));
    }
  }
  out.shortfall = static_cast<std::size_t>(num_groups) - out.groups.size();
  return out;
}

SplitDataset split(const InteractionDataset& ds, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw InputError("train_fraction must lie in (0, 1)");

  Rng rng = make_rng(seed, 0x53504c4954ULL);
  std::vector<UserItem> train, test;
  const auto by_user = ds.items_by_user();
  for (std::size_t u = 0; u < by_user.size(); ++u) {
    auto items = by_user[u];
    if (items.empty()) continue;
    shuffle(items.begin(), items.end(), rng);
    const auto m = static_cast<Index>(items.size());
    const Index keep = std::min(m, std::max<Index>(1, std::llround(train_fraction * static_cast<double>(m))));
    for (Index k = 0; k < m; ++k)
      (k < keep ? train : test).emplace_back(static_cast<Index>(u), items[static_cast<std::size_t>(k)]);
  }
  return {ds.with_interactions(std::move(train)), ds.with_interactions(std::move(test)), train_fraction};
}

void SyntheticSpec::validate() const {
  if (num_users < 1 || num_items < 1 || num_topics < 1 || interactions_per_user < 1)
    throw InputError("synthetic spec counts must be positive");
  if (!(interest_variance > 0) || !(social_variance > 0))
    throw InputError("synthetic spec variances must be positive");
  if (!(edge_probability >= 0 && edge_probability <= 1)) throw InputError("edge_probability must lie in [0, 1]");
}

}  // namespace grouprec
