#include <fstream>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "phishkd/html.hpp"
#include "phishkd/mime.hpp"
#include "phishkd/porter.hpp"
#include "phishkd/random.hpp"
#include "phishkd/textproc.hpp"

using namespace phishkd;

namespace {

using Words = std::vector<std::string>;

TokenStream run_pipeline(const std::string& message, const StopList& stop, const SynonymLexicon& lex,
                         PreprocessOptions options = {}) {
  const auto doc = parse_email(testing::raw(message));
  return preprocess(doc, extract_artifacts(doc), stop, lex, options);
}

}  // namespace

TEST_SUITE("textproc") {
  TEST_CASE("tokenize") {
    CHECK(tokenize("Verify your account!") == Words{"verify", "your", "account"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("PayPal-Login 2024") == Words{"paypal", "login"});
    CHECK(tokenize("a b2 x9y caf\xC3\xA9") == Words{"b2", "x9y", "caf"});
    CHECK(tokenize(std::string(41, 'a') + " " + std::string(40, 'b')) == Words{std::string(40, 'b')});
  }

  TEST_CASE("token grammar holds on random text") {
    Rng rng(3);
    for (int trial = 0; trial < 500; ++trial) {
      std::string text;
      const auto len = rng.below(200);
      for (std::uint64_t i = 0; i < len; ++i) text.push_back(static_cast<char>(rng.below(256)));
      for (const auto& t : tokenize(text)) {
        REQUIRE(t.size() >= 2);
        REQUIRE(t.size() <= 40);
        REQUIRE(t[0] >= 'a');
        REQUIRE(t[0] <= 'z');
        for (const char c : t) REQUIRE(((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')));
      }
    }
  }

  TEST_CASE("stem examples") {
    CHECK(stem("caresses") == "caress");
    CHECK(stem("suspended") == "suspend");
    CHECK(stem("sky") == "sky");
    CHECK(stem("ponies") == "poni");
  }

  TEST_CASE("stem agrees with the reference list") {
    // Reference stems from NLTK's PorterStemmer in ORIGINAL_ALGORITHM mode.
    std::ifstream in(testing::fixtures() / "porter_reference.tsv");
    REQUIRE(in);
    std::string line;
    std::size_t total = 0;
    std::size_t agree = 0;
    while (std::getline(in, line)) {
      const auto tab = line.find('\t');
      if (tab == std::string::npos) continue;
      ++total;
      const auto word = line.substr(0, tab);
      const auto expected = line.substr(tab + 1);
      if (stem(word) == expected) {
        ++agree;
      } else {
        MESSAGE(word << ": got " << stem(word) << ", expected " << expected);
      }
    }
    CHECK(total == 100);
    CHECK(agree == total);
  }

  TEST_CASE("expand_synonyms") {
    SynonymLexicon lex;
    lex.add("cash", "money");
    // entries are held as stems
    CHECK(expand_synonyms({"cash"}, lex) == TermSet{"cash", stem("money")});
    CHECK(expand_synonyms({}, lex).empty());
    CHECK(expand_synonyms({"hello"}, SynonymLexicon{}) == TermSet{"hello"});
  }

  TEST_CASE("expansion is one hop") {
    SynonymLexicon lex;
    lex.add("cash", "money");
    lex.add("money", "wealth");
    CHECK(expand_synonyms({"cash"}, lex) == TermSet{"cash", "monei"});
  }

  TEST_CASE("expansion is monotone") {
    const auto lex = SynonymLexicon::bundled();
    Rng rng(11);
    std::vector<std::string> pool;
    for (const auto& [k, v] : lex.stem_entries()) pool.push_back(k);
    pool.push_back("unrelated");
    for (int trial = 0; trial < 200; ++trial) {
      TermSet s;
      for (int i = 0; i < 5; ++i) s.insert(pool[rng.below(pool.size())]);
      const auto e = expand_synonyms(s, lex);
      for (const auto& t : s) CHECK(e.count(t) == 1);
    }
  }

  TEST_CASE("synonym file parsing stems keys and drops self maps") {
    std::istringstream in("# comment\nsuspended\tfrozen,suspend\n\nverify\tconfirm\n");
    const auto lex = SynonymLexicon::parse(in);
    CHECK(lex.related_stems("suspend") == TermSet{"frozen"});
    CHECK(lex.related_stems("verifi") == TermSet{"confirm"});
    CHECK(lex.related_stems("absent").empty());
    for (const auto& [key, related] : lex.stem_entries()) CHECK(related.count(key) == 0);
  }

  TEST_CASE("stop list") {
    const auto english = StopList::english();
    // 174 source entries; contractions collapse once split by the tokenizer.
    CHECK(english.size() > 130);
    CHECK(english.contains("the"));
    CHECK(english.contains("then"));
    CHECK(english.contains("he"));
    CHECK_FALSE(english.contains("account"));
    std::istringstream in("the\n# note\nwas  \n");
    const auto custom = StopList::parse(in);
    CHECK(custom.words() == TermSet{"the", "was"});
  }

  TEST_CASE("preprocess pipeline trace") {
    const StopList stop(TermSet{"the", "was"});
    const auto ts = run_pipeline("Subject: \n\nthe account was suspended", stop, SynonymLexicon{});
    CHECK(ts.term_set == TermSet{"account", "suspend"});
  }

  TEST_CASE("preprocess of an empty email") {
    CHECK(run_pipeline("Subject: \n\n", StopList::english(), SynonymLexicon::bundled()).term_set.empty());
  }

  TEST_CASE("repeated words contribute one stem") {
    const auto ts = run_pipeline("Subject: Dear user\n\ndear Dear", StopList(TermSet{}), SynonymLexicon{});
    CHECK(ts.term_set == TermSet{"dear", "user"});
    CHECK(ts.tokens.size() == 4);
  }

  TEST_CASE("stop-word removal only removes listed words") {
    Rng rng(5);
    const Words vocab{"alpha", "beta", "gamma", "delta", "the", "and", "account", "verify"};
    for (int trial = 0; trial < 200; ++trial) {
      TermSet listed;
      for (const auto& w : vocab) {
        if (rng.below(2)) listed.insert(w);
      }
      std::string body;
      for (int i = 0; i < 10; ++i) body += vocab[rng.below(vocab.size())] + " ";
      const auto ts = run_pipeline("Subject: \n\n" + body, StopList(listed), SynonymLexicon{});
      TermSet expected;
      for (const auto& t : tokenize(body)) {
        if (!listed.count(t)) expected.insert(stem(t));
      }
      CHECK(ts.term_set == expected);
    }
  }

  TEST_CASE("expansion order flag") {
    SynonymLexicon lex;
    lex.add("suspended", "frozen");
    const StopList none(TermSet{});
    const auto after = run_pipeline("Subject: \n\nsuspended", none, lex);
    const auto before = run_pipeline("Subject: \n\nsuspended", none, lex, {.expand_raw = true});
    CHECK(after.term_set == TermSet{"frozen", "suspend"});
    CHECK(before.term_set == TermSet{"frozen", "suspend"});
    // Only the raw-word path sees an inflected form that differs from the key.
    const auto raw_only = run_pipeline("Subject: \n\nsuspending", none, lex, {.expand_raw = true});
    CHECK(raw_only.term_set == TermSet{"suspend"});
    const auto stems = run_pipeline("Subject: \n\nsuspending", none, lex);
    CHECK(stems.term_set == TermSet{"frozen", "suspend"});
  }
}
