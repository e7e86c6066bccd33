#include "phishkd/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <sstream>

#include "phishkd/error.hpp"
#include "phishkd/log.hpp"

namespace phishkd {
namespace fs = std::filesystem;

std::string_view to_string(Label label) noexcept {
  switch (label) {
    case Label::ham: return "ham";
    case Label::phish: return "phish";
    case Label::unlabeled: return "unlabeled";
  }
  return "unlabeled";
}

Label parse_label(std::string_view text) {
  if (text == "ham") return Label::ham;
  if (text == "phish") return Label::phish;
  if (text == "unlabeled") return Label::unlabeled;
  throw Error(ErrorCode::InvalidArgument, "unknown label '" + std::string(text) + "'");
}

namespace {

bool read_file(const fs::path& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  out.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  return !in.bad();
}

bool starts_with_from_line(std::string_view s) { return s.starts_with("From "); }

void skip_entry(CorpusLoad& load, std::string message) {
  log::warning(message);
  load.warnings.push_back(std::move(message));
  ++load.skipped;
}

}  // namespace

std::vector<std::string> split_mbox(std::string_view content) {
  std::vector<std::string> messages;
  std::string current;
  bool seen_separator = false;
  auto flush = [&] {
    const bool blank = std::all_of(current.begin(), current.end(),
                                   [](unsigned char c) { return std::isspace(c); });
    if (seen_separator || !blank) messages.push_back(std::move(current));
    current.clear();
  };

  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t eol = content.find('\n', pos);
    const std::size_t next = eol == std::string_view::npos ? content.size() : eol + 1;
    const std::string_view line = content.substr(pos, next - pos);
    if (starts_with_from_line(line)) {
      if (seen_separator || !current.empty()) flush();
      seen_separator = true;
    } else {
      current.append(line);
    }
    pos = next;
  }
  if (seen_separator || !current.empty()) flush();
  return messages;
}

CorpusFormat detect_format(const fs::path& path) {
  std::error_code ec;
  if (fs::is_directory(path, ec)) return CorpusFormat::eml_dir;
  if (!fs::exists(path, ec)) throw Error(ErrorCode::PathNotFound, path.string());
  std::ifstream in(path, std::ios::binary);
  std::string head(5, '\0');
  in.read(head.data(), 5);
  head.resize(static_cast<std::size_t>(in.gcount()));
  return head == "From " ? CorpusFormat::mbox : CorpusFormat::eml_file;
}

CorpusLoad load_corpus(const fs::path& path, CorpusFormat format, Label label) {
  std::error_code ec;
  if (!fs::exists(path, ec)) throw Error(ErrorCode::PathNotFound, path.string());

  CorpusLoad load;
  switch (format) {
    case CorpusFormat::eml_dir: {
      if (!fs::is_directory(path, ec)) {
        throw Error(ErrorCode::PathNotFound, path.string() + " is not a directory");
      }
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(path)) {
        const auto name = entry.path().filename().string();
        if (name.empty() || name.front() == '.') continue;
        if (!entry.is_regular_file(ec)) continue;
        files.push_back(entry.path());
      }
      std::sort(files.begin(), files.end());
      for (const auto& file : files) {
        std::string bytes;
        if (!read_file(file, bytes)) {
          skip_entry(load, "unreadable entry " + file.string());
          continue;
        }
        if (bytes.empty()) {
          skip_entry(load, "empty entry " + file.string());
          continue;
        }
        load.emails.push_back({std::move(bytes), file.string(), label});
      }
      if (files.empty()) {
        std::string message = "no messages in " + path.string();
        log::warning(message);
        load.warnings.push_back(std::move(message));
      }
      break;
    }
    case CorpusFormat::eml_file: {
      std::string bytes;
      if (!read_file(path, bytes)) throw Error(ErrorCode::IoError, "cannot read " + path.string());
      if (bytes.empty()) {
        skip_entry(load, "empty entry " + path.string());
      } else {
        load.emails.push_back({std::move(bytes), path.string(), label});
      }
      break;
    }
    case CorpusFormat::mbox: {
      std::string bytes;
      if (!read_file(path, bytes)) throw Error(ErrorCode::IoError, "cannot read " + path.string());
      auto messages = split_mbox(bytes);
      for (std::size_t i = 0; i < messages.size(); ++i) {
        const std::string id = path.string() + "#" + std::to_string(i);
        if (messages[i].empty()) {
          skip_entry(load, "empty entry " + id);
          continue;
        }
        load.emails.push_back({std::move(messages[i]), id, label});
      }
      if (messages.empty()) {
        std::string message = "no messages in " + path.string();
        log::warning(message);
        load.warnings.push_back(std::move(message));
      }
      break;
    }
  }
  return load;
}

}  // namespace phishkd
