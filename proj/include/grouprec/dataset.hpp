#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "grouprec/common.hpp"

namespace grouprec {

using UserItem = std::pair<Index, Index>;
using UserPair = std::pair<Index, Index>;

/// Binary implicit-feedback data over dense user/item indices.
///
/// A pair (u, j) in `interactions` means B(u, j) = 1; every other pair is
/// unobserved. Social edges are undirected and stored with first < second.
/// Instances are only produced by `make`, which canonicalizes (sorts and
/// deduplicates) and validates; they are not mutated afterwards.
class InteractionDataset {
 public:
  InteractionDataset() = default;

  static InteractionDataset make(std::vector<std::string> user_ids, std::vector<std::string> item_ids,
                                 std::vector<UserItem> interactions, std::vector<UserPair> social_edges,
                                 std::vector<int> topic_of_item, int num_topics);

  Index num_users() const { return static_cast<Index>(user_ids_.size()); }
  Index num_items() const { return static_cast<Index>(item_ids_.size()); }
  int num_topics() const { return num_topics_; }

  const std::vector<std::string>& user_ids() const { return user_ids_; }
  const std::vector<std::string>& item_ids() const { return item_ids_; }
  /// Sorted by (user, item), unique.
  const std::vector<UserItem>& interactions() const { return interactions_; }
  /// Sorted, unique, first < second.
  const std::vector<UserPair>& social_edges() const { return social_edges_; }
  const std::vector<int>& topic_of_item() const { return topic_of_item_; }
  int topic_of(Index item) const { return topic_of_item_[static_cast<std::size_t>(item)]; }

  /// Items of each user, ascending.
  std::vector<std::vector<Index>> items_by_user() const;
  /// Interaction count per user.
  std::vector<Index> interaction_counts() const;
  bool has_edge(Index a, Index b) const;

  /// Same users, items, edges and topics with a different interaction set.
  InteractionDataset with_interactions(std::vector<UserItem> interactions) const;

 private:
  std::vector<std::string> user_ids_;
  std::vector<std::string> item_ids_;
  std::vector<UserItem> interactions_;
  std::vector<UserPair> social_edges_;
  std::vector<int> topic_of_item_;
  int num_topics_ = 0;
};

struct Group {
  Index id = 0;
  std::vector<Index> members;  // ascending, distinct
  Index internal_edges = 0;

  Index size() const { return static_cast<Index>(members.size()); }
  double social_density() const;
};

/// Counts social edges with both endpoints in `members`.
Index count_internal_edges(const InteractionDataset& ds, const std::vector<Index>& members);
double social_density(Index internal_edges, Index group_size);

struct SplitDataset {
  InteractionDataset train;
  InteractionDataset test;
  double train_fraction = 0.7;
};

struct SyntheticSpec {
  Index num_users = 200;
  Index num_items = 60;
  int num_topics = 5;
  double interest_mean = 0.0;
  double interest_variance = 400.0;
  double social_mean = -4.0;
  double social_variance = 0.25;
  Index interactions_per_user = 30;
  /// Probability of each undirected friendship; the generator draws the
  /// social graph independently of the interactions.
  double edge_probability = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticData {
  InteractionDataset dataset;
  Matrix<double> true_interest;  // |U| x D
  Matrix<double> true_social;    // |U| x D
};

struct IngestStats {
  std::size_t interaction_rows = 0;
  std::size_t nonpositive_weight_rows = 0;
  std::size_t duplicate_interactions = 0;
  std::size_t items_without_topic = 0;
  std::size_t interactions_without_topic = 0;
  std::size_t unknown_topic_items = 0;
  std::size_t social_rows = 0;
  std::size_t social_edges_dropped = 0;  // self-loops, duplicates, unknown users
};

struct HetrecPaths {
  std::filesystem::path interactions;
  std::filesystem::path social;
  std::filesystem::path topics;
};

/// Reads the three tab-separated files. `num_topics` <= 0 infers D as
/// (largest topic index + 1).
InteractionDataset load_hetrec(const HetrecPaths& paths, int num_topics = 0, IngestStats* stats = nullptr);

/// Fallback topic assignment for datasets that ship tag assignments instead of
/// topic labels: each item gets (its most frequent tag id) mod D, ties to the
/// smallest tag id. Rows are `user \t item \t tag [\t ...]`; tag ids must be
/// non-negative integers. Returns (item id, topic) pairs sorted by item id.
std::vector<std::pair<std::string, int>> assign_topics_from_tags(const std::filesystem::path& tag_path,
                                                                 int num_topics);

/// Writes (item id, topic) pairs in the topic-file format.
void write_topic_file(const std::filesystem::path& path, const std::vector<std::pair<std::string, int>>& topics);

/// Drops users with fewer than `min_interactions` interactions, repeating to a
/// fixed point. Items are kept.
InteractionDataset filter_inactive(const InteractionDataset& ds, Index min_interactions);

struct GroupSampling {
  std::vector<Group> groups;
  std::size_t attempts = 0;
  /// Number of requested groups that the attempt budget could not supply.
  std::size_t shortfall = 0;
};

/// Rejection-samples groups of distinct users whose social density is at
/// least `min_density`. Budget: 1000 attempts per requested group.
GroupSampling build_groups(const InteractionDataset& ds, Index group_size, Index num_groups, double min_density,
                           std::uint64_t seed);

/// Per-user stratified split: each user with m interactions keeps
/// max(1, round(fraction * m)) of them (capped at m) in train.
SplitDataset split(const InteractionDataset& ds, double train_fraction, std::uint64_t seed);

SyntheticData generate_synthetic(const SyntheticSpec& spec);

/// Writes the dataset as the three TSV files (dense indices as ids).
void write_canonical(const InteractionDataset& ds, const std::filesystem::path& dir);

}  // namespace grouprec
