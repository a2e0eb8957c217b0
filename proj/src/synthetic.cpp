#include <algorithm>

#include "grouprec/dataset.hpp"
#include "grouprec/logistic.hpp"

namespace grouprec {

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  const Index users = spec.num_users;
  const Index items = spec.num_items;
  const int topics = spec.num_topics;

  Rng rng = make_rng(spec.seed, 0x53594e5448ULL);
  SyntheticData out;
  out.true_interest.resize(users, topics);
  out.true_social.resize(users, topics);
  const double interest_sd = std::sqrt(spec.interest_variance);
  const double social_sd = std::sqrt(spec.social_variance);
  for (Index u = 0; u < users; ++u)
    for (int d = 0; d < topics; ++d) {
      out.true_interest(u, d) = spec.interest_mean + interest_sd * standard_normal(rng);
      out.true_social(u, d) = spec.social_mean + social_sd * standard_normal(rng);
    }

  std::vector<int> topic_of_item(static_cast<std::size_t>(items));
  for (auto& t : topic_of_item) t = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(topics)));

  // Each user scans the items once in random order and accepts each with
  // probability logistic(pi * I + S), where pi comes from the user's
  // interactions so far (uniform before the first one). The scan stops once
  // interactions_per_user items are accepted.
  std::vector<UserItem> interactions;
  std::vector<Index> order(static_cast<std::size_t>(items));
  std::vector<double> topic_counts(static_cast<std::size_t>(topics));
  for (Index u = 0; u < users; ++u) {
    for (Index j = 0; j < items; ++j) order[static_cast<std::size_t>(j)] = j;
    shuffle(order.begin(), order.end(), rng);
    std::fill(topic_counts.begin(), topic_counts.end(), 0.0);
    Index accepted = 0;
    for (Index item : order) {
      if (accepted == spec.interactions_per_user) break;
      const int d = topic_of_item[static_cast<std::size_t>(item)];
      const double pi = accepted > 0 ? topic_counts[static_cast<std::size_t>(d)] / static_cast<double>(accepted)
                                     : 1.0 / topics;
      const double p = selection_probability(pi, out.true_interest(u, d), out.true_social(u, d));
      if (uniform_unit(rng) < p) {
        interactions.emplace_back(u, item);
        topic_counts[static_cast<std::size_t>(d)] += 1.0;
        ++accepted;
      }
    }
  }

  std::vector<UserPair> edges;
  for (Index a = 0; a < users; ++a)
    for (Index b = a + 1; b < users; ++b)
      if (uniform_unit(rng) < spec.edge_probability) edges.emplace_back(a, b);

  std::vector<std::string> user_ids, item_ids;
  for (Index u = 0; u < users; ++u) user_ids.push_back("u" + std::to_string(u));
  for (Index j = 0; j < items; ++j) item_ids.push_back("i" + std::to_string(j));
  out.dataset = InteractionDataset::make(std::move(user_ids), std::move(item_ids), std::move(interactions),
                                         std::move(edges), std::move(topic_of_item), topics);
  return out;
}

}  // namespace grouprec
