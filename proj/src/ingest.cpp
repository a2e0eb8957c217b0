#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <string_view>
#include <unordered_map>

#include "grouprec/dataset.hpp"

namespace grouprec {

namespace {

struct Row {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

/// Tab-separated records; blank and '#' lines skipped, trailing CR dropped.
std::vector<Row> read_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<Row> rows;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    Row row{number, {}};
    std::size_t start = 0;
    for (;;) {
      const auto tab = line.find('\t', start);
      row.fields.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

[[noreturn]] void malformed(const std::filesystem::path& path, std::size_t line, const std::string& why) {
  throw InputError(path.string() + ":" + std::to_string(line) + ": " + why);
}

void require_fields(const std::filesystem::path& path, const Row& row, std::size_t n) {
  if (row.fields.size() < n)
    malformed(path, row.line, "expected " + std::to_string(n) + " tab-separated fields");
  for (std::size_t k = 0; k < n; ++k)
    if (row.fields[k].empty()) malformed(path, row.line, "empty field " + std::to_string(k + 1));
}

double parse_weight(const std::filesystem::path& path, const Row& row, const std::string& text) {
  try {
    std::size_t used = 0;
    const double w = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing");
    return w;
  } catch (const std::exception&) {
    malformed(path, row.line, "weight '" + text + "' is not a number");
  }
}

long long parse_integer(const std::filesystem::path& path, const Row& row, const std::string& text,
                        const char* what) {
  long long value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) malformed(path, row.line, std::string(what) + " '" + text + "' is not an integer");
  return value;
}

}  // namespace

InteractionDataset load_hetrec(const HetrecPaths& paths, int num_topics, IngestStats* stats) {
  IngestStats local;
  IngestStats& st = stats ? *stats : local;
  st = IngestStats{};

  const auto topic_rows = read_tsv(paths.topics);
  std::unordered_map<std::string, long long> topic_by_item;
  long long max_topic = -1;
  for (const auto& row : topic_rows) {
    require_fields(paths.topics, row, 2);
    const long long t = parse_integer(paths.topics, row, row.fields[1], "topic index");
    if (t < 0) malformed(paths.topics, row.line, "negative topic index");
    if (num_topics > 0 && t >= num_topics)
      malformed(paths.topics, row.line, "topic index " + std::to_string(t) + " >= " + std::to_string(num_topics));
    const auto [it, inserted] = topic_by_item.emplace(row.fields[0], t);
    if (!inserted && it->second != t) malformed(paths.topics, row.line, "item '" + row.fields[0] + "' has two topics");
    max_topic = std::max(max_topic, t);
  }
  if (num_topics <= 0) {
    if (max_topic < 0) throw InputError(paths.topics.string() + ": no topic assignments");
    num_topics = static_cast<int>(max_topic + 1);
  }

  // Dense indices follow first appearance among the kept interaction rows.
  std::unordered_map<std::string, Index> user_index, item_index;
  std::vector<std::string> user_ids, item_ids;
  std::vector<int> topic_of_item;
  std::vector<UserItem> interactions;
  std::unordered_map<std::string, bool> untopiced_items;
  for (const auto& row : read_tsv(paths.interactions)) {
    require_fields(paths.interactions, row, 3);
    ++st.interaction_rows;
    const double weight = parse_weight(paths.interactions, row, row.fields[2]);
    if (!(weight > 0)) {
      ++st.nonpositive_weight_rows;
      continue;
    }
    const auto& item = row.fields[1];
    const auto topic = topic_by_item.find(item);
    if (topic == topic_by_item.end()) {
      untopiced_items.emplace(item, true);
      ++st.interactions_without_topic;
      continue;
    }
    auto [uit, unew] = user_index.emplace(row.fields[0], static_cast<Index>(user_ids.size()));
    if (unew) user_ids.push_back(row.fields[0]);
    auto [iit, inew] = item_index.emplace(item, static_cast<Index>(item_ids.size()));
    if (inew) {
      item_ids.push_back(item);
      topic_of_item.push_back(static_cast<int>(topic->second));
    }
    interactions.emplace_back(uit->second, iit->second);
  }
  st.items_without_topic = untopiced_items.size();
  for (const auto& [item, t] : topic_by_item) st.unknown_topic_items += !item_index.contains(item);

  const auto before = interactions.size();
  std::sort(interactions.begin(), interactions.end());
  interactions.erase(std::unique(interactions.begin(), interactions.end()), interactions.end());
  st.duplicate_interactions = before - interactions.size();
  if (interactions.empty()) throw InputError("dataset is empty after ingestion");

  std::vector<UserPair> edges;
  for (const auto& row : read_tsv(paths.social)) {
    require_fields(paths.social, row, 2);
    ++st.social_rows;
    const auto a = user_index.find(row.fields[0]);
    const auto b = user_index.find(row.fields[1]);
    if (a == user_index.end() || b == user_index.end() || a->second == b->second) {
      ++st.social_edges_dropped;
      continue;
    }
    edges.emplace_back(std::min(a->second, b->second), std::max(a->second, b->second));
  }
  const auto raw_edges = edges.size();
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  st.social_edges_dropped += raw_edges - edges.size();

  return InteractionDataset::make(std::move(user_ids), std::move(item_ids), std::move(interactions), std::move(edges),
                                  std::move(topic_of_item), num_topics);
}

std::vector<std::pair<std::string, int>> assign_topics_from_tags(const std::filesystem::path& tag_path,
                                                                 int num_topics) {
  if (num_topics < 1) throw InputError("number of topics must be positive");
  std::map<std::string, std::map<long long, std::size_t>> tag_counts;
  for (const auto& row : read_tsv(tag_path)) {
    require_fields(tag_path, row, 3);
    const long long tag = parse_integer(tag_path, row, row.fields[2], "tag id");
    if (tag < 0) malformed(tag_path, row.line, "negative tag id");
    ++tag_counts[row.fields[1]][tag];
  }
  std::vector<std::pair<std::string, int>> out;
  for (const auto& [item, counts] : tag_counts) {
    long long best_tag = 0;
    std::size_t best = 0;
    for (const auto& [tag, c] : counts)  // ascending tag id, so ties keep the smallest
      if (c > best) {
        best = c;
        best_tag = tag;
      }
    out.emplace_back(item, static_cast<int>(best_tag % num_topics));
  }
  return out;
}

void write_topic_file(const std::filesystem::path& path, const std::vector<std::pair<std::string, int>>& topics) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << "# item_id\ttopic_index\n";
  for (const auto& [item, t] : topics) out << item << '\t' << t << '\n';
}

void write_canonical(const InteractionDataset& ds, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw InputError("cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("interactions.tsv");
    out << "# user_id\titem_id\tweight\n";
    for (const auto& [u, j] : ds.interactions()) out << u << '\t' << j << "\t1\n";
  }
  {
    auto out = open("social.tsv");
    out << "# user_id\tuser_id\n";
    for (const auto& [a, b] : ds.social_edges()) out << a << '\t' << b << '\n';
  }
  {
    auto out = open("topics.tsv");
    out << "# item_id\ttopic_index\n";
    for (Index j = 0; j < ds.num_items(); ++j) out << j << '\t' << ds.topic_of(j) << '\n';
  }
}

}  // namespace grouprec
