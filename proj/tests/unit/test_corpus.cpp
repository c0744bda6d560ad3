#include <doctest.h>

#include <sstream>

#include "acci/corpus.hpp"
#include "acci/error.hpp"

using namespace acci;

namespace {

Corpus parse_text(const std::string& s) {
  std::istringstream in(s);
  return parse_corpus(in);
}

const char* kDoc = R"({"kind":"doc","doc_id":"d1","topic":"1","subtopic":"1_1","sentences":[["A","hit","B"]]})";

bool has_rule(const std::vector<Violation>& vs, const std::string& rule, const std::string& entity) {
  for (const auto& v : vs)
    if (v.rule == rule && v.entity == entity) return true;
  return false;
}

Corpus two_topic_corpus() {
  Corpus c;
  c.documents.push_back({"a", "1", "1", {{"x", "y"}}, std::nullopt});
  c.documents.push_back({"b", "2", "2", {{"x", "y"}}, std::nullopt});
  c.mentions.push_back({"ma", "a", 0, {0, 1}, "c1", {}});
  c.mentions.push_back({"mb", "b", 0, {1, 2}, "c2", {}});
  return c;
}

}  // namespace

TEST_CASE("empty input gives an empty corpus") {
  const Corpus c = parse_text("");
  CHECK(c.documents.empty());
  CHECK(c.mentions.empty());
}

TEST_CASE("one document with one mention") {
  const Corpus c = parse_text(std::string(kDoc) + "\n" +
                              R"({"kind":"mention","mention_id":"m1","doc_id":"d1","sentence_idx":0,"trigger":[1,2],"cluster":"c1"})");
  REQUIRE(c.mentions.size() == 1);
  CHECK(c.mentions[0].trigger == Span{1, 2});
  CHECK(c.documents[0].topic_id == "1");
  CHECK(validate_corpus(c).empty());

  const Corpus last = parse_text(std::string(kDoc) + "\n" +
                                 R"({"kind":"mention","mention_id":"m1","doc_id":"d1","sentence_idx":0,"trigger":[2,3],"cluster":"c1"})");
  CHECK(validate_corpus(last).empty());
}

TEST_CASE("arguments, sources and unknown fields") {
  const Corpus c = parse_text(
      R"({"kind":"doc","doc_id":"d1","topic":"1","subtopic":"1_1","sentences":[["A","hit","B"]],"source":"wire","extra":5})"
      "\n"
      R"({"kind":"mention","mention_id":"m1","doc_id":"d1","sentence_idx":0,"trigger":[1,2],"cluster":"c1","args":[{"role":"participant","span":[0,1]},{"role":"time","span":[2,3]}]})");
  REQUIRE(c.mentions[0].arguments.size() == 2);
  CHECK(c.mentions[0].arguments[1].role == ArgRole::time);
  CHECK(c.documents[0].source == std::optional<std::string>("wire"));
}

TEST_CASE("malformed records report their line") {
  try {
    parse_text(std::string(kDoc) + "\n{not json}\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_text(R"({"kind":"cat"})"), ParseError);
  CHECK_THROWS_AS(parse_text(R"({"kind":"doc","doc_id":"d"})"), ParseError);
}

TEST_CASE("dangling doc ids raise a referential error") {
  CHECK_THROWS_AS(
      parse_text(R"({"kind":"mention","mention_id":"m1","doc_id":"nope","sentence_idx":0,"trigger":[0,1],"cluster":"c"})"),
      ReferentialError);
}

TEST_CASE("validate_corpus names the broken entity and rule") {
  Corpus c = two_topic_corpus();
  CHECK(validate_corpus(c).empty());

  Corpus bad_span = c;
  bad_span.mentions[0].trigger = {1, 1};
  auto vs = validate_corpus(bad_span);
  REQUIRE(vs.size() == 1);
  CHECK(vs[0].entity == "mention:ma");
  CHECK(vs[0].rule == "span-order");

  Corpus dangling = c;
  dangling.mentions[1].doc_id = "zzz";
  vs = validate_corpus(dangling);
  REQUIRE(vs.size() == 1);
  CHECK(has_rule(vs, "dangling-doc", "mention:mb"));

  Corpus oob = c;
  oob.mentions[0].trigger = {1, 3};
  CHECK(has_rule(validate_corpus(oob), "span-bounds", "mention:ma"));
}

TEST_CASE("write then parse is the identity") {
  Corpus c = two_topic_corpus();
  c.documents[0].source = "feed";
  c.mentions[0].arguments = {{ArgRole::location, {1, 2}}};
  std::ostringstream out;
  write_corpus(out, c);
  std::istringstream in(out.str());
  const Corpus back = parse_corpus(in, c.split);
  CHECK(back == c);
  std::ostringstream again;
  write_corpus(again, back);
  CHECK(again.str() == out.str());
}

TEST_CASE("split_by_topics") {
  const Corpus c = two_topic_corpus();
  SUBCASE("everything to train") {
    const auto s = split_by_topics(c, {{"1", Split::train}, {"2", Split::train}});
    CHECK(s.train.documents == c.documents);
    CHECK(s.train.mentions == c.mentions);
    CHECK(s.dev.documents.empty());
    CHECK(s.test.documents.empty());
  }
  SUBCASE("one topic per split") {
    const auto s = split_by_topics(c, {{"1", Split::train}, {"2", Split::test}});
    REQUIRE(s.train.documents.size() == 1);
    CHECK(s.train.documents[0].doc_id == "a");
    CHECK(s.train.mentions[0].mention_id == "ma");
    REQUIRE(s.test.documents.size() == 1);
    CHECK(s.test.mentions[0].mention_id == "mb");
    CHECK(s.test.split == Split::test);
  }
  SUBCASE("uncovered topic") { CHECK_THROWS_AS(split_by_topics(c, {{"1", Split::train}}), ConfigError); }
}

TEST_CASE("ECB+ topic convention") {
  Corpus c;
  for (int t : {1, 2, 35, 36, 45}) c.documents.push_back({"d" + std::to_string(t), std::to_string(t), "", {{"x"}}, {}});
  const auto a = ecb_plus_topic_assignment(c);
  CHECK(a.at("1") == Split::train);
  CHECK(a.at("2") == Split::dev);
  CHECK(a.at("35") == Split::dev);
  CHECK(a.at("36") == Split::test);
  CHECK(a.at("45") == Split::test);
}

TEST_CASE("corpus statistics") {
  Corpus c = two_topic_corpus();
  c.mentions.push_back({"mc", "b", 0, {0, 1}, "c2", {}});
  const CorpusStats s = corpus_stats(c);
  CHECK(s.topics == 2);
  CHECK(s.documents == 2);
  CHECK(s.mentions == 3);
  CHECK(s.clusters == 2);
  CHECK(s.singletons == 1);
}

TEST_CASE("index lookups") {
  const Corpus c = two_topic_corpus();
  const CorpusIndex idx(c);
  REQUIRE(idx.find_mention("mb") != nullptr);
  CHECK(idx.find_mention("zz") == nullptr);
  CHECK(idx.trigger_tokens(*idx.find_mention("mb")) == std::vector<std::string>{"y"});
  CHECK(idx.document_of(*idx.find_mention("ma")).doc_id == "a");
}
