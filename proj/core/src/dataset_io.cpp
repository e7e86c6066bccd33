#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"

#include "phishkd/error.hpp"
#include "phishkd/features.hpp"

namespace phishkd {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool iequals_prefix(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
  }
  return true;
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool is_canonical(const std::vector<std::string>& names) {
  const auto& canon = feature_names();
  return names.size() == canon.size() && std::equal(names.begin(), names.end(), canon.begin());
}

// Kinds for a schema read from disk: explicit annotations win, then the
// canonical schema, then {0,1}-valued columns are binary.
std::vector<FeatureKind> resolve_kinds(const std::vector<std::string>& names,
                                       const std::vector<std::optional<FeatureKind>>& declared,
                                       const std::vector<Row>& rows) {
  std::vector<FeatureKind> kinds(names.size(), FeatureKind::numeric);
  const bool canonical = is_canonical(names);
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (declared[j]) {
      kinds[j] = *declared[j];
    } else if (canonical) {
      kinds[j] = feature_kinds()[j];
    } else {
      const bool binary = !rows.empty() && std::all_of(rows.begin(), rows.end(), [&](const Row& r) {
        return r.values[j] == 0.0 || r.values[j] == 1.0;
      });
      kinds[j] = binary ? FeatureKind::binary : FeatureKind::numeric;
    }
  }
  return kinds;
}

std::string label_token(Label label) {
  return label == Label::unlabeled ? "?" : std::string(to_string(label));
}

Label parse_label_token(std::string_view token) {
  token = trim(token);
  if (token.size() >= 2 && (token.front() == '\'' || token.front() == '"')) {
    token = token.substr(1, token.size() - 2);
  }
  if (token == "?") return Label::unlabeled;
  if (token == "ham") return Label::ham;
  if (token == "phish") return Label::phish;
  throw Error(ErrorCode::CorruptDataset, "unknown class value '" + std::string(token) + "'");
}

double parse_number(std::string_view token, std::size_t line_no) {
  token = trim(token);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw Error(ErrorCode::CorruptDataset,
                "line " + std::to_string(line_no) + ": bad number '" + std::string(token) + "'");
  }
  return value;
}

std::string single_line(std::string_view s) {
  std::string out(s);
  std::replace_if(out.begin(), out.end(), [](char c) { return c == '\n' || c == '\r'; }, ' ');
  return out;
}

}  // namespace

std::string format_real(double value) {
  if (value == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_arff(const Dataset& ds, std::ostream& out) {
  const bool annotate = !is_canonical(ds.feature_names);
  out << "@relation phishing\n";
  for (std::size_t j = 0; j < ds.arity(); ++j) {
    out << "@attribute " << ds.feature_names[j] << " numeric";
    if (annotate) out << " % " << to_string(ds.kinds[j]);
    out << '\n';
  }
  out << "@attribute class {ham,phish}\n";
  out << "@data\n";
  for (const auto& row : ds.rows) {
    for (const double v : row.values) out << format_real(v) << ',';
    out << label_token(row.label);
    if (!row.source_id.empty()) out << " % " << single_line(row.source_id);
    out << '\n';
  }
}

void write_arff(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  write_arff(ds, out);
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

Dataset read_arff(std::istream& in) {
  std::vector<std::string> names;
  std::vector<std::optional<FeatureKind>> declared;
  bool have_class = false;
  bool in_data = false;
  std::vector<Row> rows;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty()) continue;
    std::string comment;
    if (const auto pct = view.find('%'); pct != std::string_view::npos) {
      comment = std::string(trim(view.substr(pct + 1)));
      view = trim(view.substr(0, pct));
      if (view.empty()) continue;
    }

    if (!in_data) {
      if (iequals_prefix(view, "@relation")) continue;
      if (iequals_prefix(view, "@data")) {
        if (!have_class) throw Error(ErrorCode::CorruptDataset, "no class attribute before @data");
        in_data = true;
        continue;
      }
      if (!iequals_prefix(view, "@attribute")) {
        throw Error(ErrorCode::CorruptDataset, "line " + std::to_string(line_no) + ": unexpected '" +
                                                   std::string(view) + "'");
      }
      if (have_class) throw Error(ErrorCode::CorruptDataset, "class must be the last attribute");
      std::string_view rest = trim(view.substr(10));
      std::string name;
      if (!rest.empty() && (rest.front() == '\'' || rest.front() == '"')) {
        const char q = rest.front();
        const auto close = rest.find(q, 1);
        if (close == std::string_view::npos) throw Error(ErrorCode::CorruptDataset, "unterminated name");
        name = std::string(rest.substr(1, close - 1));
        rest = trim(rest.substr(close + 1));
      } else {
        const auto sp = rest.find_first_of(" \t");
        name = std::string(rest.substr(0, sp));
        rest = sp == std::string_view::npos ? std::string_view{} : trim(rest.substr(sp));
      }
      if (!rest.empty() && rest.front() == '{') {
        std::string values = lowercase(rest);
        values.erase(std::remove_if(values.begin(), values.end(),
                                    [](unsigned char c) { return std::isspace(c) || c == '\'' || c == '"'; }),
                     values.end());
        if (values != "{ham,phish}" && values != "{phish,ham}") {
          throw Error(ErrorCode::CorruptDataset, "unsupported nominal attribute '" + name + "'");
        }
        have_class = true;
        continue;
      }
      const std::string type = lowercase(rest);
      if (type != "numeric" && type != "real" && type != "integer") {
        throw Error(ErrorCode::CorruptDataset, "unsupported attribute type '" + type + "'");
      }
      names.push_back(std::move(name));
      if (comment == "binary") {
        declared.emplace_back(FeatureKind::binary);
      } else if (comment == "numeric") {
        declared.emplace_back(FeatureKind::numeric);
      } else {
        declared.emplace_back(std::nullopt);
      }
      continue;
    }

    if (view.front() == '{') throw Error(ErrorCode::CorruptDataset, "sparse ARFF rows are not supported");
    Row row;
    row.source_id = comment;
    std::size_t start = 0;
    std::vector<std::string_view> fields;
    while (true) {
      const auto comma = view.find(',', start);
      fields.push_back(view.substr(start, comma == std::string_view::npos ? comma : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != names.size() + 1) {
      throw Error(ErrorCode::CorruptDataset, "line " + std::to_string(line_no) + ": expected " +
                                                 std::to_string(names.size() + 1) + " fields");
    }
    for (std::size_t j = 0; j < names.size(); ++j) row.values.push_back(parse_number(fields[j], line_no));
    row.label = parse_label_token(fields.back());
    rows.push_back(std::move(row));
  }
  if (!in_data) throw Error(ErrorCode::CorruptDataset, "missing @data section");

  auto kinds = resolve_kinds(names, declared, rows);
  Dataset ds = Dataset::with_schema(std::move(names), std::move(kinds));
  ds.rows = std::move(rows);
  return ds;
}

Dataset read_arff(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return read_arff(in);
}

void write_jsonl(const Dataset& ds, std::ostream& out) {
  for (const auto& row : ds.rows) {
    nlohmann::ordered_json obj;
    for (std::size_t j = 0; j < ds.arity(); ++j) obj[ds.feature_names[j]] = row.values[j];
    obj["label"] = std::string(to_string(row.label));
    obj["source_id"] = row.source_id;
    out << obj.dump() << '\n';
  }
}

Dataset read_jsonl(std::istream& in) {
  std::vector<std::string> names;
  std::vector<Row> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::ordered_json obj;
    try {
      obj = nlohmann::ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::CorruptDataset, "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!obj.is_object()) throw Error(ErrorCode::CorruptDataset, "line " + std::to_string(line_no));
    if (names.empty()) {
      for (const auto& [key, value] : obj.items()) {
        if (key != "label" && key != "source_id") names.push_back(key);
      }
    }
    Row row;
    try {
      for (const auto& name : names) row.values.push_back(obj.at(name).get<double>());
      row.label = parse_label(obj.at("label").get<std::string>());
      if (obj.contains("source_id")) row.source_id = obj["source_id"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::CorruptDataset, "line " + std::to_string(line_no) + ": " + e.what());
    }
    rows.push_back(std::move(row));
  }
  auto kinds = resolve_kinds(names, std::vector<std::optional<FeatureKind>>(names.size()), rows);
  Dataset ds = Dataset::with_schema(std::move(names), std::move(kinds));
  ds.rows = std::move(rows);
  return ds;
}

}  // namespace phishkd
