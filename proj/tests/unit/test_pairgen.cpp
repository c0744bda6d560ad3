#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "acci/error.hpp"
#include "acci/pairgen.hpp"

using namespace acci;

namespace {

void add_doc(Corpus& c, const std::string& id, const std::string& topic, const std::string& sub, Sentence s) {
  c.documents.push_back({id, topic, sub, {std::move(s)}, std::nullopt});
}

void add_mention(Corpus& c, const std::string& id, const std::string& doc, int tok, const std::string& cluster) {
  c.mentions.push_back({id, doc, 0, {tok, tok + 1}, cluster, {}});
}

// Topic 1 holds subtopics 1a and 1b; topic 2 has one document.
Corpus small_corpus() {
  Corpus c;
  add_doc(c, "d1", "1", "1a", {"they", "killed", "him", "and", "fled"});
  add_doc(c, "d2", "1", "1b", {"the", "killing", "shocked", "all"});
  add_doc(c, "d3", "2", "2a", {"markets", "fell", "sharply"});
  add_mention(c, "a", "d1", 1, "k");
  add_mention(c, "b", "d1", 4, "f");
  add_mention(c, "c", "d2", 1, "k");
  add_mention(c, "d", "d3", 1, "x");
  return c;
}

// n non-matching pairs inside one topic.
Corpus diverse_corpus(int n) {
  Corpus c;
  const std::vector<std::string> verbs = {"ran", "sang", "ate", "slept", "wrote", "read", "built", "drew",
                                          "swam", "flew", "cooked", "danced", "jumped", "laughed", "cried"};
  for (int i = 0; i < n; ++i) {
    const std::string t = "t" + std::to_string(i);
    add_doc(c, t + "x", t, t, {"he", verbs[i % verbs.size()]});
    add_doc(c, t + "y", t, t, {"she", verbs[(i + 1) % verbs.size()]});
    add_mention(c, t + "a", t + "x", 1, t + "p");
    add_mention(c, t + "b", t + "y", 1, t + "q");
  }
  return c;
}

}  // namespace

TEST_CASE("pair ids are symmetric") {
  CHECK(make_pair_id("a", "b") == make_pair_id("b", "a"));
  CHECK(make_pair_id("a", "b") != make_pair_id("a", "c"));
}

TEST_CASE("topic scope pairs everything within a topic") {
  const auto pairs = generate_pairs(small_corpus(), PairScope::topic);
  REQUIRE(pairs.size() == 3);
  CHECK(std::is_sorted(pairs.begin(), pairs.end(), [](auto& x, auto& y) { return x.pair_id < y.pair_id; }));
  for (const auto& p : pairs) {
    CHECK(p.m1 < p.m2);
    CHECK(p.pair_id == make_pair_id(p.m1, p.m2));
  }
  const auto ac = std::find_if(pairs.begin(), pairs.end(), [](auto& p) { return p.m1 == "a" && p.m2 == "c"; });
  REQUIRE(ac != pairs.end());
  CHECK(ac->gold_label == 1);
  CHECK(ac->lexically_similar_trigger);
}

TEST_CASE("subtopic scope") {
  const auto pairs = generate_pairs(small_corpus(), PairScope::subtopic);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].m1 == "a");
  CHECK(pairs[0].m2 == "b");
  CHECK(pairs[0].gold_label == 0);
}

TEST_CASE("two scope units of two mentions give two pairs") {
  Corpus c;
  add_doc(c, "d1", "1", "1", {"x", "y"});
  add_doc(c, "d2", "2", "2", {"x", "y"});
  add_mention(c, "a", "d1", 0, "c1");
  add_mention(c, "b", "d1", 1, "c1");
  add_mention(c, "c", "d2", 0, "c2");
  add_mention(c, "d", "d2", 1, "c3");
  CHECK(generate_pairs(c, PairScope::topic).size() == 2);
}

TEST_CASE("lemmas") {
  CHECK(default_lemma("killing") == default_lemma("killed"));
  CHECK(default_lemma("Killed") == default_lemma("kill"));
  CHECK(default_lemma("fell") != default_lemma("fled"));
  CHECK(trigger_lemma({"set", "fire"}, default_lemma) == default_lemma("set") + " " + default_lemma("fire"));
}

TEST_CASE("keep rate 1 keeps everything") {
  const Corpus c = small_corpus();
  const auto pairs = generate_pairs(c, PairScope::topic);
  FilterOptions o;
  o.keep_nonmatch_rate = 1.0;
  const auto r = heuristic_filter(pairs, c, o);
  CHECK(r.pairs == pairs);
  CHECK(r.dropped == 0);
}

TEST_CASE("keep rate 0 drops every non-matching pair, oracle keeps positives") {
  const Corpus c = small_corpus();
  const auto pairs = generate_pairs(c, PairScope::topic);
  FilterOptions o;
  const auto r = heuristic_filter(pairs, c, o);
  REQUIRE(r.pairs.size() == 1);
  CHECK(r.pairs[0].m2 == "c");
  CHECK(r.dropped == 2);
}

TEST_CASE("keep rate is respected on average and the filter is idempotent") {
  const Corpus c = diverse_corpus(2000);
  const auto pairs = generate_pairs(c, PairScope::topic);
  REQUIRE(pairs.size() == 2000);
  FilterOptions o;
  o.keep_nonmatch_rate = 0.4;
  o.seed = 17;
  const auto r = heuristic_filter(pairs, c, o);
  const double kept = static_cast<double>(r.pairs.size()) / 2000.0;
  CHECK(kept == doctest::Approx(0.4).epsilon(0.1));
  const auto again = heuristic_filter(r.pairs, c, o);
  CHECK(again.pairs == r.pairs);
  CHECK(heuristic_filter(pairs, c, o).pairs == r.pairs);
}

TEST_CASE("oracle variant keeps gold positives") {
  Corpus c = diverse_corpus(20);
  for (auto& m : c.mentions) m.gold_cluster_id = m.doc_id.substr(0, m.doc_id.size() - 1);
  const auto pairs = generate_pairs(c, PairScope::topic);
  FilterOptions o;
  const auto dropped = heuristic_filter(pairs, c, o);
  CHECK(dropped.pairs.empty());
  CHECK(dropped.dropped_positives == 20);
  o.oracle = true;
  CHECK(heuristic_filter(pairs, c, o).pairs.size() == 20);
}

TEST_CASE("filter options are validated") {
  const Corpus c = small_corpus();
  FilterOptions o;
  o.keep_nonmatch_rate = 1.5;
  CHECK_THROWS_AS(heuristic_filter(generate_pairs(c, PairScope::topic), c, o), ConfigError);
  CHECK_THROWS_AS(parse_pair_scope("galaxy"), ConfigError);
  CHECK_THROWS_AS(parse_filter_mode("nope"), ConfigError);
}

TEST_CASE("contingency table and phi") {
  std::vector<MentionPair> p;
  SUBCASE("phi is 1 for perfect association") {
    p.push_back({"1", "a", "b", 1, true});
    p.push_back({"2", "a", "c", 0, false});
    const auto t = trigger_match_stats(p);
    CHECK(t.coref_sim == 1);
    CHECK(t.noncoref_div == 1);
    REQUIRE(t.phi.has_value());
    CHECK(*t.phi == doctest::Approx(1.0));
  }
  SUBCASE("phi is undefined with an empty margin") {
    p.push_back({"1", "a", "b", 1, true});
    p.push_back({"2", "a", "c", 1, false});
    const auto t = trigger_match_stats(p);
    CHECK_FALSE(t.phi.has_value());
    CHECK_FALSE(t.phi_note.empty());
  }
}

TEST_CASE("labels do not depend on document order") {
  Corpus c = small_corpus();
  const auto before = generate_pairs(c, PairScope::topic);
  std::reverse(c.documents.begin(), c.documents.end());
  std::reverse(c.mentions.begin(), c.mentions.end());
  CHECK(generate_pairs(c, PairScope::topic) == before);
}

TEST_CASE("pairs JSONL round trip") {
  const auto pairs = generate_pairs(small_corpus(), PairScope::topic);
  std::ostringstream out;
  write_pairs(out, pairs);
  std::istringstream in(out.str());
  CHECK(read_pairs(in) == pairs);
  std::istringstream bad("{\"pair_id\":3}\n");
  CHECK_THROWS_AS(read_pairs(bad), ParseError);
}
