#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace phishkd {

enum class Label : std::uint8_t { ham = 0, phish = 1, unlabeled = 2 };

std::string_view to_string(Label label) noexcept;
// Accepts "ham", "phish" and "unlabeled"; throws Error(InvalidArgument).
Label parse_label(std::string_view text);

struct RawEmail {
  std::string bytes;
  std::string source_id;  // "<path>" for single files, "<path>#<index>" inside an mbox
  Label label = Label::unlabeled;
};

enum class CorpusFormat { mbox, eml_dir, eml_file };

struct CorpusLoad {
  std::vector<RawEmail> emails;
  std::size_t skipped = 0;  // unreadable or empty entries
  std::vector<std::string> warnings;
};

// Directory -> eml_dir; regular file starting with an mbox "From " line ->
// mbox; any other regular file -> eml_file.
CorpusFormat detect_format(const std::filesystem::path& path);

// Loads every message at `path`. eml_dir reads the regular, non-hidden files
// directly inside the directory in lexicographic filename order. Per-entry
// failures are logged and skipped; a missing path throws PathNotFound.
CorpusLoad load_corpus(const std::filesystem::path& path, CorpusFormat format, Label label);

// Splits mbox content on lines beginning with "From ". The separator lines
// themselves are dropped; ">From " lines are body content.
std::vector<std::string> split_mbox(std::string_view content);

}  // namespace phishkd
