#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "grouprec/dataset.hpp"

namespace testing {

using grouprec::Index;
using grouprec::InteractionDataset;

/// Dataset with users "u0".."u{n-1}", items "i0".."i{q-1}" and the given
/// topic per item.
inline InteractionDataset small_dataset(Index users, std::vector<int> topics, int num_topics,
                                        std::vector<grouprec::UserItem> interactions,
                                        std::vector<grouprec::UserPair> edges = {}) {
  std::vector<std::string> uids, iids;
  for (Index u = 0; u < users; ++u) uids.push_back("u" + std::to_string(u));
  for (std::size_t j = 0; j < topics.size(); ++j) iids.push_back("i" + std::to_string(j));
  return InteractionDataset::make(uids, iids, std::move(interactions), std::move(edges), std::move(topics),
                                  num_topics);
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("grouprec_" + tag + "_" + std::to_string(rd()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace testing
