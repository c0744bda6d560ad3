#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "acci/encoding.hpp"
#include "acci/error.hpp"
#include "acci/rng.hpp"

using namespace acci;

namespace {

using Tokens = std::vector<std::string>;

MentionContext ctx(Tokens t, int s, int e) { return {std::move(t), {s, e}}; }

const MentionContext kA = ctx({"police", "arrested", "the", "man"}, 1, 2);
const MentionContext kB = ctx({"he", "was", "detained", "today"}, 2, 3);

ToyEncoder small_encoder(std::size_t layers = 2) {
  Corpus c;
  c.documents.push_back({"d", "1", "1", {kA.tokens, kB.tokens}, std::nullopt});
  const Corpus* cs[] = {&c};
  return ToyEncoder(ToyEncoder::build_vocabulary(cs), 8, 3, 16, layers);
}

double weighted_sum(const Matrix& h, const Matrix& r) {
  double s = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) s += h.flat()[i] * r.flat()[i];
  return s;
}

}  // namespace

TEST_CASE("factual input layout") {
  const EncoderInput in = build_factual_input(kA, kB);
  CHECK(in.tokens == Tokens{"[CLS]", "police", "<m>", "arrested", "</m>", "the", "man", "[SEP]", "he", "was",
                            "<m>", "detained", "</m>", "today", "[SEP]"});
  CHECK(in.marker_positions == std::vector<std::size_t>{2, 4, 10, 12});
  CHECK(in.pooled_rows[0] == std::pair<std::size_t, std::size_t>{3, 4});
  CHECK(in.pooled_rows[1] == std::pair<std::size_t, std::size_t>{11, 12});
}

TEST_CASE("trigger at the start of a one-token sentence") {
  const MentionContext one = ctx({"exploded"}, 0, 1);
  const EncoderInput in = build_factual_input(one, one);
  CHECK(in.tokens.size() == 9);
  CHECK(in.tokens[1] == "<m>");
  CHECK(in.tokens[2] == "exploded");
}

TEST_CASE("trigger-only and multiword triggers") {
  const MentionContext multi = ctx({"they", "set", "fire", "to", "it"}, 1, 3);
  const EncoderInput t = build_trigger_only_input(multi, kB);
  CHECK(t.tokens == Tokens{"[CLS]", "<m>", "set", "fire", "</m>", "[SEP]", "<m>", "detained", "</m>", "[SEP]"});
  CHECK(t.pooled_rows[0] == std::pair<std::size_t, std::size_t>{2, 4});
  const EncoderInput f = build_factual_input(multi, kB);
  CHECK(f.pooled_rows[0].second - f.pooled_rows[0].first == 2);
}

TEST_CASE("argument-only input hides the trigger") {
  const MentionContext multi = ctx({"they", "set", "fire", "to", "it"}, 1, 3);
  const EncoderInput in = build_argument_only_input(multi, kB);
  CHECK(in.tokens == Tokens{"[CLS]", "they", "[TMASK]", "to", "it", "[SEP]", "he", "was", "[TMASK]", "today", "[SEP]"});
  CHECK(in.marker_positions.empty());
  CHECK(in.pooled_rows[0] == std::pair<std::size_t, std::size_t>{2, 3});
  CHECK(in.pooled_rows[1] == std::pair<std::size_t, std::size_t>{8, 9});
  for (const auto& tok : in.tokens) {
    CHECK(tok != "set");
    CHECK(tok != "detained");
  }
}

TEST_CASE("invalid spans are rejected") {
  CHECK_THROWS_AS(build_factual_input(ctx({"a"}, 0, 2), kB), ContractError);
  CHECK_THROWS_AS(build_factual_input(ctx({"a"}, 1, 1), kB), ContractError);
}

TEST_CASE("document context offsets the trigger") {
  Corpus c;
  c.documents.push_back({"d", "1", "1", {{"a", "b"}, {"c", "d", "e"}}, std::nullopt});
  c.mentions.push_back({"m", "d", 1, {1, 2}, "x", {}});
  const CorpusIndex idx(c);
  const auto s = mention_context(idx, c.mentions[0], ContextWindow::sentence);
  CHECK(s.tokens == Tokens{"c", "d", "e"});
  const auto d = mention_context(idx, c.mentions[0], ContextWindow::document);
  CHECK(d.tokens.size() == 5);
  CHECK(d.trigger == Span{3, 4});
  CHECK(d.tokens[3] == "d");
}

TEST_CASE("encoding shapes and pooling") {
  const ToyEncoder enc = small_encoder();
  const EncoderInput in = build_factual_input(kA, kB);
  const EncodedPair p = encode(enc, in);
  CHECK(p.hidden.rows() == in.tokens.size());
  CHECK(p.hidden.cols() == 8);
  CHECK(p.h_cls.size() == 8);
  for (std::size_t c = 0; c < 8; ++c) {
    CHECK(p.h_cls[c] == p.hidden(0, c));
    CHECK(p.e_a[c] == p.hidden(3, c));
    CHECK(std::isfinite(p.e_b[c]));
  }
  CHECK_THROWS_AS(encode(enc, EncoderInput{}), ContractError);
}

TEST_CASE("pooling is the row mean and is linear") {
  EncoderInput in;
  in.tokens = {"[CLS]", "x", "y", "z"};
  in.pooled_rows = {{{1, 3}, {3, 4}}};
  Matrix h(4, 2);
  h(1, 0) = 1;
  h(2, 0) = 3;
  h(1, 1) = -2;
  h(3, 1) = 5;
  const EncodedPair p = pool(h, in);
  CHECK(p.e_a == Vector{2, -1});
  CHECK(p.e_b == Vector{0, 5});
  Matrix h2 = h;
  for (double& x : h2.flat()) x *= 3.0;
  const EncodedPair p2 = pool(h2, in);
  CHECK(p2.e_a == Vector{6, -3});
  CHECK_THROWS_AS(pool(Matrix(3, 2), in), ContractError);
}

TEST_CASE("repeated tokens in one segment give equal rows") {
  const ToyEncoder enc = small_encoder();
  const Tokens t = {"[CLS]", "man", "police", "man", "[SEP]", "man", "[SEP]"};
  const Matrix h = enc.forward(t);
  for (std::size_t c = 0; c < 8; ++c) CHECK(h(1, c) == h(3, c));
  bool differs = false;
  for (std::size_t c = 0; c < 8; ++c) differs = differs || h(1, c) != h(5, c);
  CHECK(differs);
}

TEST_CASE("toy encoder is deterministic and handles unknown tokens") {
  const ToyEncoder a = small_encoder(), b = small_encoder();
  const Tokens t = {"[CLS]", "zebra", "arrested", "[SEP]", "quokka", "[SEP]"};
  CHECK(a.forward(t) == b.forward(t));
  CHECK(a.token_id("zebra") >= a.vocabulary().size());
  CHECK(a.token_id("zebra") < a.vocabulary().size() + a.oov_buckets());
  CHECK(a.token_id("zebra") == b.token_id("zebra"));
  CHECK_THROWS_AS(ToyEncoder({"a"}, 4, 1, 1, 0), ConfigError);
  CHECK_THROWS_AS(ToyEncoder({"a", "a"}, 4, 1), ConfigError);
}

TEST_CASE("toy encoder gradients match finite differences") {
  for (std::size_t layers : {std::size_t{1}, std::size_t{2}}) {
    ToyEncoder enc = small_encoder(layers);
    const Tokens t = {"[CLS]", "police", "<m>", "arrested", "</m>", "[SEP]", "he", "police", "[SEP]"};
    Rng rng(5);
    Matrix r(t.size(), 8);
    for (double& x : r.flat()) x = rng.normal();
    ToyEncoderCache cache;
    enc.forward(t, cache);
    ToyEncoderGrads g = enc.make_grads();
    enc.backward(cache, r, g);

    const double eps = 1e-6;
    auto check_param = [&](double& p, double analytic) {
      const double keep = p;
      p = keep + eps;
      const double up = weighted_sum(enc.forward(t), r);
      p = keep - eps;
      const double down = weighted_sum(enc.forward(t), r);
      p = keep;
      const double numeric = (up - down) / (2 * eps);
      CHECK(std::abs(numeric - analytic) <= 1e-6 * std::max(1.0, std::abs(numeric)));
    };
    const std::size_t police = enc.token_id("police");
    for (std::size_t c = 0; c < 8; c += 3) check_param(enc.embeddings()(police, c), g.embeddings(police, c));
    const std::size_t seg1 = enc.segment_row(1);
    check_param(enc.embeddings()(seg1, 2), g.embeddings(seg1, 2));
    for (std::size_t l = 0; l < layers; ++l) {
      for (std::size_t i = 0; i < 8; i += 3) {
        check_param(enc.layers()[l].wq(i, 1), g.layers[l].wq(i, 1));
        check_param(enc.layers()[l].wk(1, i), g.layers[l].wk(1, i));
        check_param(enc.layers()[l].wv(i, i), g.layers[l].wv(i, i));
      }
    }
  }
}

TEST_CASE("vocabulary contains reserved tokens") {
  const ToyEncoder enc = small_encoder();
  const auto& v = enc.vocabulary();
  for (auto tok : {kCls, kSep, kMarkOpen, kMarkClose, kTriggerMask})
    CHECK(std::find(v.begin(), v.end(), std::string(tok)) != v.end());
  CHECK(std::is_sorted(v.begin(), v.end()));
}

TEST_CASE("external encoder through a fake transport") {
  std::string last_request;
  ExternalTransport fake = [&](const std::string& req) {
    last_request = req;
    const auto j = nlohmann::json::parse(req);
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < j["tokens"].size(); ++i) rows.push_back({static_cast<double>(i), 1.0});
    return nlohmann::json{{"hidden", rows}}.dump();
  };
  const ExternalEncoder enc(2, fake);
  const Tokens t = {"[CLS]", "a", "[SEP]"};
  const Matrix h = enc.forward(t);
  CHECK(nlohmann::json::parse(last_request)["tokens"] == nlohmann::json(t));
  CHECK(h.rows() == 3);
  CHECK(h(2, 0) == 2.0);
  CHECK_FALSE(enc.supports_gradients());

  const ExternalEncoder short_rows(2, [](const std::string&) { return std::string(R"({"hidden":[[1,2]]})"); });
  CHECK_THROWS_AS(short_rows.forward(t), Error);
  const ExternalEncoder garbage(2, [](const std::string&) { return std::string("<html>"); });
  CHECK_THROWS_AS(garbage.forward(t), Error);
  CHECK_THROWS_AS(ExternalEncoder(2, ExternalTransport{}), ConfigError);
}
