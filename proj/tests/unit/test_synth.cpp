#include <doctest.h>

#include <sstream>

#include "acci/error.hpp"
#include "acci/pairgen.hpp"
#include "acci/synth.hpp"

using namespace acci;

namespace {

ContingencyTable stats_of(const Corpus& c) { return trigger_match_stats(generate_pairs(c, PairScope::topic)); }

std::string text_of(const Corpus& c) {
  std::ostringstream out;
  write_corpus(out, c);
  return out.str();
}

}  // namespace

TEST_CASE("generation is a pure function of settings and seed") {
  ConfoundSpec spec;
  spec.n_train = 50;
  spec.n_dev = 10;
  spec.n_test = 10;
  const auto a = generate_confounded_corpus(spec, 3);
  const auto b = generate_confounded_corpus(spec, 3);
  CHECK(text_of(a.train) == text_of(b.train));
  CHECK(text_of(a.test) == text_of(b.test));
  const auto c = generate_confounded_corpus(spec, 4);
  CHECK(text_of(a.train) != text_of(c.train));
}

TEST_CASE("generated corpora are valid and one pair per topic") {
  ConfoundSpec spec;
  spec.n_train = 40;
  spec.n_dev = 5;
  spec.n_test = 7;
  const auto s = generate_confounded_corpus(spec, 1);
  CHECK(validate_corpus(s.train).empty());
  CHECK(validate_corpus(s.test).empty());
  CHECK(generate_pairs(s.train, PairScope::topic).size() == 40);
  CHECK(generate_pairs(s.dev, PairScope::topic).size() == 5);
  CHECK(generate_pairs(s.test, PairScope::topic).size() == 7);
  CHECK(s.test.split == Split::test);
}

TEST_CASE("confounder strength sets phi") {
  ConfoundSpec spec;
  spec.n_train = 10000;
  spec.n_dev = 0;
  spec.n_test = 0;
  SUBCASE("p = 0.5 gives no association") {
    spec.p_confounder = 0.5;
    const auto t = stats_of(generate_confounded_corpus(spec, 11).train);
    REQUIRE(t.phi.has_value());
    CHECK(std::abs(*t.phi) < 0.05);
  }
  SUBCASE("p = 0.9 gives phi near 0.8") {
    spec.p_confounder = 0.9;
    const auto t = stats_of(generate_confounded_corpus(spec, 11).train);
    REQUIRE(t.phi.has_value());
    CHECK(*t.phi == doctest::Approx(0.8).epsilon(0.0625));
  }
}

TEST_CASE("flipped test split inverts the association") {
  ConfoundSpec spec;
  spec.n_train = 2000;
  spec.n_dev = 0;
  spec.n_test = 2000;
  spec.flip_rate_test = 1.0;
  const auto s = generate_confounded_corpus(spec, 5);
  const auto train = stats_of(s.train);
  const auto test = stats_of(s.test);
  CHECK(*train.phi > 0.7);
  CHECK(*test.phi < -0.7);
  spec.flip_rate_test = 0.0;
  CHECK(*stats_of(generate_confounded_corpus(spec, 5).test).phi > 0.7);
}

TEST_CASE("generator settings are validated") {
  ConfoundSpec spec;
  spec.p_confounder = 1.5;
  CHECK_THROWS_AS(validate(spec), ConfigError);
  spec = {};
  spec.flip_rate_test = -0.1;
  CHECK_THROWS_AS(validate(spec), ConfigError);
  spec = {};
  spec.n_event_types = 0;
  CHECK_THROWS_AS(validate(spec), ConfigError);
}

TEST_CASE("empty splits") {
  ConfoundSpec spec;
  spec.n_train = 3;
  spec.n_dev = 0;
  spec.n_test = 0;
  const auto s = generate_confounded_corpus(spec, 2);
  CHECK(s.dev.documents.empty());
  CHECK(s.test.mentions.empty());
  CHECK(stats_of(s.dev).total() == 0);
}

TEST_CASE("preset") {
  const SyntheticPreset p = standard_synthetic_preset();
  CHECK(p.spec.p_confounder == 0.9);
  CHECK(p.spec.flip_rate_test == 1.0);
  CHECK(p.spec.n_train == 5000);
  CHECK(p.seed == 7);
}
