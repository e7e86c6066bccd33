#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "phishkd/classify.hpp"
#include "phishkd/corpus.hpp"
#include "phishkd/error.hpp"
#include "phishkd/eval.hpp"
#include "phishkd/lexicon.hpp"
#include "phishkd/log.hpp"
#include "phishkd/mining.hpp"
#include "phishkd/pipeline.hpp"

namespace phishkd::cli {
namespace {

namespace fs = std::filesystem;

// First line of an ARFF written by `extract`; lets `train --arff` record the
// same extraction options as a run straight from the corpus.
constexpr std::string_view kOptionsComment = "% phishkd-options:";

struct Config {
  std::vector<std::string> ham;
  std::vector<std::string> phish;
  std::string arff;

  std::string stoplist;
  std::string synonyms;
  bool expand_raw = false;
  std::string hex_mode = "either";
  std::string dots_mode = "url";
  std::string term_match = "stem";
  bool normalize_by_n = false;

  std::string algo = "forest";
  std::size_t trees = 30;
  std::size_t features_per_split = 4;
  std::size_t min_leaf = 2;
  std::size_t k = 10;
  std::uint64_t seed = kDefaultSeed;
  unsigned jobs = 1;
  bool global_lexicon = false;

  std::string out;
  std::string out_dir = ".";
  std::string format;
  std::string lexicon;
  std::string lexicon_out;
  std::string model;
  std::string email;
  bool exit_code = false;
  bool verbose = false;
};

class SinkGuard {
 public:
  explicit SinkGuard(std::ostream& err) {
    previous_ = log::set_sink([&err](log::Level level, std::string_view message) {
      static constexpr std::string_view names[] = {"debug", "info", "warning", "error"};
      err << '[' << names[static_cast<int>(level)] << "] " << message << '\n';
    });
  }
  ~SinkGuard() {
    log::set_sink(std::move(previous_));
    log::set_min_level(log::Level::info);
  }
  SinkGuard(const SinkGuard&) = delete;
  SinkGuard& operator=(const SinkGuard&) = delete;

 private:
  log::Sink previous_;
};

void add_corpus_options(CLI::App* cmd, Config& c) {
  cmd->add_option("--ham", c.ham, "Ham corpus: .eml directory, mbox file or single .eml (repeatable)")
      ->envname("PHISHKD_HAM");
  cmd->add_option("--phish", c.phish, "Phishing corpus: .eml directory, mbox file or single .eml (repeatable)")
      ->envname("PHISHKD_PHISH");
}

void add_text_options(CLI::App* cmd, Config& c) {
  cmd->add_option("--stoplist", c.stoplist, "Stop-word file, one word per line (default: bundled English list)")
      ->envname("PHISHKD_STOPLIST");
  cmd->add_option("--synonyms", c.synonyms, "Synonym file, 'term<TAB>syn,syn' per line (default: bundled)")
      ->envname("PHISHKD_SYNONYMS");
  cmd->add_flag("--expand-raw", c.expand_raw, "Expand synonyms before stemming instead of after");
}

void add_feature_options(CLI::App* cmd, Config& c) {
  cmd->add_option("--hex-mode", c.hex_mode, "What counts as a hexadecimal URL")
      ->check(CLI::IsMember({"escapes", "host", "either"}));
  cmd->add_option("--dots-mode", c.dots_mode, "Count dots over the whole URL or the host only")
      ->check(CLI::IsMember({"url", "host"}));
  cmd->add_option("--term-match", c.term_match, "Match keyword features by stem or literal word")
      ->check(CLI::IsMember({"stem", "literal"}));
  cmd->add_flag("--normalize-by-n", c.normalize_by_n, "Divide the phishing-terms weight by N once more");
}

void add_model_options(CLI::App* cmd, Config& c) {
  cmd->add_option("--algo", c.algo, "Classifier")->check(CLI::IsMember({"forest", "tree", "naive_bayes"}));
  cmd->add_option("--trees", c.trees, "Forest size");
  cmd->add_option("--features-per-split", c.features_per_split, "Features sampled at each forest node");
  cmd->add_option("--min-leaf", c.min_leaf, "Minimum training rows on each side of a split");
  cmd->add_option("--seed", c.seed, "Seed for bootstrap samples and fold assignment")->envname("PHISHKD_SEED");
}

void add_jobs_option(CLI::App* cmd, Config& c) {
  cmd->add_option("--jobs", c.jobs, "Worker threads (0 = all cores); results do not depend on it");
}

unsigned resolve_jobs(unsigned jobs) {
  if (jobs != 0) return jobs;
  return std::max(1u, std::thread::hardware_concurrency());
}

bool has_corpus(const Config& c) { return !c.ham.empty() || !c.phish.empty(); }

std::string join(const std::vector<std::string>& items) {
  std::string s;
  for (const auto& item : items) s += (s.empty() ? "" : ",") + item;
  return s.empty() ? "-" : s;
}

std::string or_bundled(const std::string& path) { return path.empty() ? "bundled" : path; }

void log_config(const std::string& command, const Config& c) {
  std::ostringstream line;
  line << "config command=" << command << " ham=" << join(c.ham) << " phish=" << join(c.phish)
       << " arff=" << (c.arff.empty() ? "-" : c.arff) << " stoplist=" << or_bundled(c.stoplist)
       << " synonyms=" << or_bundled(c.synonyms) << " expand_raw=" << c.expand_raw
       << " hex_mode=" << c.hex_mode << " dots_mode=" << c.dots_mode << " term_match=" << c.term_match
       << " normalize_by_n=" << c.normalize_by_n << " algo=" << c.algo << " trees=" << c.trees
       << " features_per_split=" << c.features_per_split << " min_leaf=" << c.min_leaf << " k=" << c.k
       << " seed=" << c.seed << " jobs=" << resolve_jobs(c.jobs) << " global_lexicon=" << c.global_lexicon;
  log::info(line.str());
}

std::vector<RawEmail> load_inputs(const Config& c) {
  if (!has_corpus(c)) throw Error(ErrorCode::InvalidArgument, "no corpus given: use --ham/--phish");
  std::vector<RawEmail> all;
  auto load = [&](const std::string& path, Label label) {
    auto loaded = load_corpus(path, detect_format(path), label);
    log::info("loaded " + std::to_string(loaded.emails.size()) + " " + std::string(to_string(label)) +
              " email(s) from " + path + (loaded.skipped ? ", skipped " + std::to_string(loaded.skipped) : ""));
    for (auto& e : loaded.emails) all.push_back(std::move(e));
  };
  for (const auto& p : c.ham) load(p, Label::ham);
  for (const auto& p : c.phish) load(p, Label::phish);
  if (all.empty()) throw Error(ErrorCode::EmptyCorpus, "no emails were loaded");
  return all;
}

TextResources text_resources(const Config& c) {
  TextResources r;
  if (!c.stoplist.empty()) r.stop = StopList::load(c.stoplist);
  if (!c.synonyms.empty()) r.synonyms = SynonymLexicon::load(c.synonyms);
  r.preprocess.expand_raw = c.expand_raw;
  return r;
}

FeatureOptions feature_options(const Config& c) {
  FeatureOptions o;
  o.hex_mode = parse_hex_mode(c.hex_mode);
  o.dots_mode = parse_dots_mode(c.dots_mode);
  o.term_match = parse_term_match(c.term_match);
  o.weight.normalize_by_n = c.normalize_by_n;
  return o;
}

std::map<std::string, std::string> options_metadata(const Config& c) {
  return {{"dots_mode", c.dots_mode},
          {"expand_raw", c.expand_raw ? "1" : "0"},
          {"hex_mode", c.hex_mode},
          {"normalize_by_n", c.normalize_by_n ? "1" : "0"},
          {"stoplist", or_bundled(c.stoplist)},
          {"synonyms", or_bundled(c.synonyms)},
          {"term_match", c.term_match}};
}

std::string options_comment(const Config& c) {
  std::string line(kOptionsComment);
  for (const auto& [key, value] : options_metadata(c)) line += " " + key + "=" + value;
  return line;
}

std::optional<std::map<std::string, std::string>> read_options_comment(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  if (!std::getline(in, line) || !line.starts_with(kOptionsComment)) return std::nullopt;
  std::map<std::string, std::string> options;
  std::istringstream fields(line.substr(kOptionsComment.size()));
  std::string field;
  while (fields >> field) {
    const auto eq = field.find('=');
    if (eq != std::string::npos) options[field.substr(0, eq)] = field.substr(eq + 1);
  }
  return options;
}

// Settings stored in a model override the defaults used to extract features
// for a new message.
void apply_metadata(const std::map<std::string, std::string>& meta, Config& c) {
  auto get = [&](const char* key, std::string& target) {
    if (const auto it = meta.find(key); it != meta.end()) target = it->second;
  };
  auto get_flag = [&](const char* key, bool& target) {
    if (const auto it = meta.find(key); it != meta.end()) target = it->second == "1";
  };
  get("hex_mode", c.hex_mode);
  get("dots_mode", c.dots_mode);
  get("term_match", c.term_match);
  get_flag("normalize_by_n", c.normalize_by_n);
  get_flag("expand_raw", c.expand_raw);
  if (c.stoplist.empty()) {
    get("stoplist", c.stoplist);
    if (c.stoplist == "bundled") c.stoplist.clear();
  }
  if (c.synonyms.empty()) {
    get("synonyms", c.synonyms);
    if (c.synonyms == "bundled") c.synonyms.clear();
  }
}

ModelParams model_params(const Config& c) {
  ModelParams p;
  p.algorithm = parse_algorithm(c.algo);
  p.trees = c.trees;
  p.features_per_split = c.features_per_split;
  p.min_leaf = c.min_leaf;
  p.seed = c.seed;
  p.jobs = resolve_jobs(c.jobs);
  return p;
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
  log::info("wrote " + path.string());
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
  } else {
    write_file(path, content);
  }
}

std::string lexicon_text(const PhishingLexicon& lexicon) {
  std::ostringstream s;
  write_lexicon(lexicon, s);
  return s.str();
}

// Labelled features straight from a corpus: the lexicon is built over every
// loaded email.
struct CorpusFeatures {
  std::vector<ProcessedEmail> emails;
  PhishingLexicon lexicon;
  Dataset dataset;
};

CorpusFeatures corpus_features(const Config& c, const PhishingLexicon* given_lexicon = nullptr) {
  const auto raw = load_inputs(c);
  const unsigned jobs = resolve_jobs(c.jobs);
  CorpusFeatures f;
  f.emails = process_corpus(raw, text_resources(c), jobs);
  f.lexicon = given_lexicon ? *given_lexicon : lexicon_from(f.emails);
  log::info("phishing lexicon: " + std::to_string(f.lexicon.n_terms()) + " term(s)");
  f.dataset = build_dataset(f.emails, f.lexicon, feature_options(c), jobs);
  return f;
}

Dataset arff_dataset(const Config& c) {
  auto ds = read_arff(fs::path(c.arff));
  log::info("read " + std::to_string(ds.size()) + " row(s) from " + c.arff);
  return ds;
}

int cmd_ingest(const Config& c, std::ostream& out) {
  const auto raw = load_inputs(c);
  const auto emails = process_corpus(raw, text_resources(c), resolve_jobs(c.jobs));
  std::size_t counts[3] = {};
  std::size_t replaced = 0;
  std::ostringstream manifest;
  for (const auto& e : emails) {
    ++counts[static_cast<int>(e.label)];
    replaced += e.doc.diagnostics.replaced_sequences;
    nlohmann::ordered_json row = {{"source_id", e.source_id},
                                  {"label", std::string(to_string(e.label))},
                                  {"subject", e.doc.subject},
                                  {"parts", e.doc.parts.size()},
                                  {"html", e.doc.has_html_part},
                                  {"urls", e.arts.all_urls.size()},
                                  {"anchors", e.arts.anchors.size()},
                                  {"terms", e.terms.term_set.size()}};
    manifest << row.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
  }
  if (!c.out.empty()) write_file(c.out, manifest.str());
  nlohmann::ordered_json summary = {{"emails", emails.size()},
                                    {"ham", counts[0]},
                                    {"phish", counts[1]},
                                    {"replaced_sequences", replaced}};
  out << summary.dump(2) << '\n';
  return kExitOk;
}

int cmd_lexicon(const Config& c, std::ostream& out) {
  const auto raw = load_inputs(c);
  const auto emails = process_corpus(raw, text_resources(c), resolve_jobs(c.jobs));
  std::vector<std::string> warnings;
  const auto lexicon = lexicon_from(emails, &warnings);
  log::info("phishing lexicon: " + std::to_string(lexicon.n_terms()) + " term(s)");
  emit(c.out, lexicon_text(lexicon), out);
  return kExitOk;
}

int cmd_extract(const Config& c, std::ostream& out) {
  std::optional<PhishingLexicon> given;
  if (!c.lexicon.empty()) given = load_lexicon(c.lexicon);
  const auto f = corpus_features(c, given ? &*given : nullptr);
  std::string format = c.format;
  if (format.empty()) format = c.out.ends_with(".jsonl") ? "jsonl" : "arff";
  std::ostringstream text;
  if (format == "jsonl") {
    write_jsonl(f.dataset, text);
  } else {
    text << options_comment(c) << '\n';
    write_arff(f.dataset, text);
  }
  emit(c.out, text.str(), out);
  if (!c.lexicon_out.empty()) write_file(c.lexicon_out, lexicon_text(f.lexicon));
  return kExitOk;
}

int cmd_rank(const Config& c, std::ostream& out) {
  const Dataset ds = c.arff.empty() ? corpus_features(c).dataset : arff_dataset(c);
  emit(c.out, to_tsv(rank_features(ds)), out);
  return kExitOk;
}

// Trains on everything and writes model.json (plus lexicon.txt when the
// features came from a corpus).
void train_and_save(const Config& c, const Dataset& ds, std::map<std::string, std::string> metadata,
                    const PhishingLexicon* lexicon) {
  auto model = train(ds, model_params(c));
  model.metadata = std::move(metadata);
  write_file(fs::path(c.out_dir) / "model.json", serialize_model(model));
  if (lexicon) write_file(fs::path(c.out_dir) / "lexicon.txt", lexicon_text(*lexicon));
}

std::map<std::string, std::string> arff_metadata(const Config& c) {
  if (auto stored = read_options_comment(c.arff)) return *stored;
  log::warning(c.arff + " has no extraction options line; recording the command-line options");
  return options_metadata(c);
}

int cmd_train(const Config& c, std::ostream&) {
  if (!c.arff.empty()) {
    train_and_save(c, arff_dataset(c), arff_metadata(c), nullptr);
  } else {
    const auto f = corpus_features(c);
    train_and_save(c, f.dataset, options_metadata(c), &f.lexicon);
  }
  return kExitOk;
}

int cmd_eval(const Config& c, std::ostream& out) {
  const auto params = model_params(c);
  CvOptions cv;
  cv.k = c.k;
  cv.seed = c.seed;
  cv.global_lexicon = c.global_lexicon;
  cv.jobs = resolve_jobs(c.jobs);
  cv.features = feature_options(c);

  EvaluationReport report;
  if (!c.arff.empty()) {
    const auto ds = arff_dataset(c);
    report = cross_validate(ds, params, cv);
    train_and_save(c, ds, arff_metadata(c), nullptr);
  } else {
    const auto f = corpus_features(c);
    report = cross_validate(std::span<const ProcessedEmail>(f.emails), params, cv);
    train_and_save(c, f.dataset, options_metadata(c), &f.lexicon);
  }
  const fs::path dir(c.out_dir);
  const auto text = report_to_text(report);
  write_file(dir / "report.json", report_to_json(report));
  write_file(dir / "report.txt", text);
  write_file(dir / "roc.csv", roc_to_csv(roc_curve(report.scores, report.labels)));
  out << text;
  return kExitOk;
}

int cmd_classify(Config c, std::ostream& out) {
  if (c.model.empty()) throw Error(ErrorCode::InvalidArgument, "--model is required");
  if (c.lexicon.empty()) throw Error(ErrorCode::InvalidArgument, "--lexicon is required");
  const auto model = load_model(c.model);
  const auto lexicon = load_lexicon(c.lexicon);
  apply_metadata(model.metadata, c);

  const auto loaded = load_corpus(c.email, detect_format(c.email), Label::unlabeled);
  if (loaded.emails.empty()) throw Error(ErrorCode::EmptyCorpus, "no message found in " + c.email);
  const auto resources = text_resources(c);
  const auto options = feature_options(c);
  const auto& names = feature_names();

  bool any_phish = false;
  for (const auto& raw : loaded.emails) {
    const auto email = process_email(raw, resources);
    const auto fv = features_of(email, lexicon, options);
    const auto verdict = predict(model, fv);
    any_phish = any_phish || verdict.label == Label::phish;
    nlohmann::ordered_json features = nlohmann::ordered_json::object();
    for (std::size_t j = 0; j < kFeatureCount; ++j) features[std::string(names[j])] = fv.values[j];
    nlohmann::ordered_json j = {{"source_id", raw.source_id},
                                {"label", std::string(to_string(verdict.label))},
                                {"score", verdict.score},
                                {"features", std::move(features)}};
    out << j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
  }
  return c.exit_code && any_phish ? kExitPhish : kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  SinkGuard sink(err);
  Config c;
  CLI::App app{"Phishing email knowledge-discovery toolkit", "phishkd"};
  app.failure_message(CLI::FailureMessage::help);
  app.require_subcommand(1, 1);
  app.add_flag("-v,--verbose", c.verbose, "Log per-message diagnostics");

  auto* ingest = app.add_subcommand("ingest", "Load corpora and summarise what was parsed");
  add_corpus_options(ingest, c);
  add_text_options(ingest, c);
  add_jobs_option(ingest, c);
  ingest->add_option("--out", c.out, "Write a per-email JSON-lines manifest here");

  auto* lexicon = app.add_subcommand("lexicon", "Build the phishing-term lexicon");
  add_corpus_options(lexicon, c);
  add_text_options(lexicon, c);
  add_jobs_option(lexicon, c);
  lexicon->add_option("--out", c.out, "Lexicon file (default: stdout)")->envname("PHISHKD_LEXICON_OUT");

  auto* extract = app.add_subcommand("extract", "Extract the feature table");
  add_corpus_options(extract, c);
  add_text_options(extract, c);
  add_feature_options(extract, c);
  add_jobs_option(extract, c);
  extract->add_option("--lexicon", c.lexicon, "Use this lexicon instead of building one from the corpus");
  extract->add_option("--out", c.out, "Dataset file (default: stdout)");
  extract->add_option("--format", c.format, "Dataset format (default from --out extension, else arff)")
      ->check(CLI::IsMember({"arff", "jsonl"}));
  extract->add_option("--lexicon-out", c.lexicon_out, "Also save the lexicon the features were built with");

  auto* rank = app.add_subcommand("rank", "Rank features by information gain");
  add_corpus_options(rank, c);
  add_text_options(rank, c);
  add_feature_options(rank, c);
  add_jobs_option(rank, c);
  rank->add_option("--arff", c.arff, "Read features from an ARFF file instead of a corpus");
  rank->add_option("--out", c.out, "TSV file (default: stdout)");

  auto* train_cmd = app.add_subcommand("train", "Train a classifier on all data");
  add_corpus_options(train_cmd, c);
  add_text_options(train_cmd, c);
  add_feature_options(train_cmd, c);
  add_model_options(train_cmd, c);
  add_jobs_option(train_cmd, c);
  train_cmd->add_option("--arff", c.arff, "Read features from an ARFF file instead of a corpus");
  train_cmd->add_option("--out-dir", c.out_dir, "Directory for model.json and lexicon.txt")
      ->envname("PHISHKD_OUT_DIR");

  auto* eval = app.add_subcommand("eval", "Stratified k-fold cross-validation");
  add_corpus_options(eval, c);
  add_text_options(eval, c);
  add_feature_options(eval, c);
  add_model_options(eval, c);
  add_jobs_option(eval, c);
  eval->add_option("--arff", c.arff, "Read features from an ARFF file instead of a corpus");
  eval->add_option("--k", c.k, "Number of folds");
  eval->add_flag("--global-lexicon", c.global_lexicon, "Build one lexicon over all emails instead of per fold");
  eval->add_option("--out-dir", c.out_dir, "Directory for report.json, report.txt, roc.csv, model.json")
      ->envname("PHISHKD_OUT_DIR");

  auto* classify = app.add_subcommand("classify", "Classify a message with a trained model");
  classify->add_option("email", c.email, "Message file (.eml or mbox)")->required();
  classify->add_option("--model", c.model, "model.json from train/eval")->envname("PHISHKD_MODEL");
  classify->add_option("--lexicon", c.lexicon, "lexicon.txt from train/eval/lexicon")->envname("PHISHKD_LEXICON");
  classify->add_option("--stoplist", c.stoplist, "Override the stop-word file recorded in the model");
  classify->add_option("--synonyms", c.synonyms, "Override the synonym file recorded in the model");
  classify->add_flag("--exit-code", c.exit_code, "Exit 10 on a phishing verdict");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }
  if (c.verbose) log::set_min_level(log::Level::debug);

  auto* cmd = app.get_subcommands().front();
  const std::string name = cmd->get_name();
  try {
    log_config(name, c);
    if (name == "ingest") return cmd_ingest(c, out);
    if (name == "lexicon") return cmd_lexicon(c, out);
    if (name == "extract") return cmd_extract(c, out);
    if (name == "rank") return cmd_rank(c, out);
    if (name == "train") return cmd_train(c, out);
    if (name == "eval") return cmd_eval(c, out);
    return cmd_classify(c, out);
  } catch (const Error& e) {
    err << "phishkd " << name << ": " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "phishkd " << name << ": " << e.what() << '\n';
  }
  return kExitError;
}

}  // namespace phishkd::cli
