#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "phishkd/corpus.hpp"
#include "phishkd/features.hpp"
#include "phishkd/random.hpp"

namespace testing {

inline std::filesystem::path fixtures() { return PHISHKD_FIXTURES; }
inline std::filesystem::path ham_dir() { return fixtures() / "corpus" / "ham"; }
inline std::filesystem::path phish_mbox() { return fixtures() / "corpus" / "phish.mbox"; }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("phishkd_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
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

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline phishkd::RawEmail raw(std::string bytes, std::string id = "test") {
  return {std::move(bytes), std::move(id), phishkd::Label::unlabeled};
}

// Rows whose class is decided by column `signal` at `cut`; the other columns
// are noise.
inline phishkd::Dataset threshold_dataset(std::size_t rows, std::size_t arity, std::size_t signal,
                                          double cut, std::uint64_t seed) {
  std::vector<std::string> names;
  std::vector<phishkd::FeatureKind> kinds;
  for (std::size_t j = 0; j < arity; ++j) {
    names.push_back("f" + std::to_string(j));
    kinds.push_back(phishkd::FeatureKind::numeric);
  }
  auto ds = phishkd::Dataset::with_schema(names, kinds);
  phishkd::Rng rng(seed);
  for (std::size_t i = 0; i < rows; ++i) {
    phishkd::Row row;
    for (std::size_t j = 0; j < arity; ++j) row.values.push_back(static_cast<double>(rng.below(1000)) / 10.0);
    // Alternate classes so both are always present.
    const bool phish = i % 2 == 1;
    row.values[signal] = phish ? cut + 1.0 + static_cast<double>(rng.below(50))
                               : cut - 1.0 - static_cast<double>(rng.below(50));
    row.label = phish ? phishkd::Label::phish : phishkd::Label::ham;
    row.source_id = "r" + std::to_string(i);
    ds.add(row);
  }
  return ds;
}

}  // namespace testing
