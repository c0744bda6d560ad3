#include "acci/pairgen.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <ostream>
#include <unordered_map>

#include "acci/error.hpp"
#include "acci/rng.hpp"
#include "acci/synth.hpp"
#include "json.hpp"

namespace acci {

using nlohmann::json;

std::string make_pair_id(std::string_view a, std::string_view b) {
  if (b < a) std::swap(a, b);
  std::string id;
  id.reserve(a.size() + b.size() + 1);
  id.append(a).append("|").append(b);
  return id;
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

const std::unordered_map<std::string, std::string>& lemma_table() {
  static const std::unordered_map<std::string, std::string> table = [] {
    std::unordered_map<std::string, std::string> t = {
        {"attacked", "attack"},   {"assaulted", "assault"}, {"raided", "raid"},       {"stormed", "storm"},
        {"killed", "kill"},       {"killing", "kill"},      {"kills", "kill"},        {"murdered", "murder"},
        {"slew", "slay"},         {"slain", "slay"},        {"executed", "execute"},  {"arrested", "arrest"},
        {"detained", "detain"},   {"apprehended", "apprehend"}, {"captured", "capture"}, {"injured", "injure"},
        {"wounded", "wound"},     {"hurt", "hurt"},         {"maimed", "maim"},       {"acquired", "acquire"},
        {"bought", "buy"},        {"purchased", "purchase"}, {"obtained", "obtain"},  {"announced", "announce"},
        {"unveiled", "unveil"},   {"revealed", "reveal"},   {"launched", "launch"},   {"shot", "shoot"},
        {"shooting", "shoot"},    {"died", "die"},          {"dead", "dead"},         {"fired", "fire"},
    };
    return t;
  }();
  return table;
}

}  // namespace

std::string default_lemma(std::string_view token) {
  std::string w = lower(token);
  if (auto it = lemma_table().find(w); it != lemma_table().end()) return it->second;
  auto ends_with = [&](std::string_view suf) { return w.size() > suf.size() + 2 && w.ends_with(suf); };
  auto undouble = [](std::string s) {
    const std::size_t n = s.size();
    if (n >= 2 && s[n - 1] == s[n - 2] && std::string_view("aeiouls").find(s[n - 1]) == std::string_view::npos)
      s.pop_back();
    return s;
  };
  if (ends_with("ing")) return undouble(w.substr(0, w.size() - 3));
  if (ends_with("ied")) return w.substr(0, w.size() - 3) + "y";
  if (ends_with("ed")) return undouble(w.substr(0, w.size() - 2));
  if (ends_with("ies")) return w.substr(0, w.size() - 3) + "y";
  if (ends_with("s") && !w.ends_with("ss")) return w.substr(0, w.size() - 1);
  return w;
}

std::optional<std::size_t> synonym_set_of(std::string_view lemma) {
  static const std::unordered_map<std::string, std::size_t> index = [] {
    std::unordered_map<std::string, std::size_t> idx;
    const auto& sets = synthetic_trigger_sets();
    for (std::size_t s = 0; s < sets.size(); ++s)
      for (const auto& form : sets[s]) idx.emplace(default_lemma(form), s);
    return idx;
  }();
  auto it = index.find(std::string(lemma));
  if (it == index.end()) return std::nullopt;
  return it->second;
}

std::string trigger_lemma(const std::vector<std::string>& tokens, const Lemmatizer& lemmatize) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += lemmatize(tokens[i]);
  }
  return out;
}

PairScope parse_pair_scope(std::string_view s) {
  if (s == "topic") return PairScope::topic;
  if (s == "subtopic") return PairScope::subtopic;
  if (s == "gold-topic") return PairScope::gold_topic;
  throw ConfigError("unknown pair scope '" + std::string(s) + "'");
}

std::string_view to_string(PairScope s) {
  switch (s) {
    case PairScope::topic: return "topic";
    case PairScope::subtopic: return "subtopic";
    case PairScope::gold_topic: return "gold-topic";
  }
  return "topic";
}

FilterMode parse_filter_mode(std::string_view s) {
  if (s == "lemma-overlap") return FilterMode::lemma_overlap;
  if (s == "synonym-set") return FilterMode::synonym_set;
  throw ConfigError("unknown filter mode '" + std::string(s) + "'");
}

std::string_view to_string(FilterMode m) {
  return m == FilterMode::lemma_overlap ? "lemma-overlap" : "synonym-set";
}

std::vector<MentionPair> generate_pairs(const Corpus& corpus, PairScope scope, const Lemmatizer& lemmatize) {
  const CorpusIndex index(corpus);
  // Scope units keyed by topic (or topic + subtopic). Topic ids in this data
  // model are gold topics, so `topic` and `gold-topic` coincide.
  std::map<std::string, std::vector<const Mention*>> units;
  for (const auto& m : corpus.mentions) {
    const Document& d = index.document_of(m);
    std::string key = scope == PairScope::subtopic ? d.topic_id + "\x1f" + d.subtopic_id : d.topic_id;
    units[key].push_back(&m);
  }
  std::vector<MentionPair> out;
  for (auto& [key, ms] : units) {
    std::vector<std::string> lemmas;
    lemmas.reserve(ms.size());
    for (const Mention* m : ms) lemmas.push_back(trigger_lemma(index.trigger_tokens(*m), lemmatize));
    for (std::size_t i = 0; i < ms.size(); ++i)
      for (std::size_t j = i + 1; j < ms.size(); ++j) {
        MentionPair p;
        const bool swap = ms[j]->mention_id < ms[i]->mention_id;
        p.m1 = swap ? ms[j]->mention_id : ms[i]->mention_id;
        p.m2 = swap ? ms[i]->mention_id : ms[j]->mention_id;
        p.pair_id = make_pair_id(p.m1, p.m2);
        p.gold_label = ms[i]->gold_cluster_id == ms[j]->gold_cluster_id ? 1 : 0;
        p.lexically_similar_trigger = lemmas[i] == lemmas[j];
        out.push_back(std::move(p));
      }
  }
  std::sort(out.begin(), out.end(), [](const MentionPair& a, const MentionPair& b) { return a.pair_id < b.pair_id; });
  return out;
}

FilterResult heuristic_filter(const std::vector<MentionPair>& pairs, const Corpus& corpus,
                              const FilterOptions& options, const Lemmatizer& lemmatize) {
  if (!(options.keep_nonmatch_rate >= 0.0 && options.keep_nonmatch_rate <= 1.0))
    throw ConfigError("keep_nonmatch_rate must lie in [0,1]");
  const CorpusIndex index(corpus);
  auto lemma_of = [&](const std::string& mention_id) {
    const Mention* m = index.find_mention(mention_id);
    if (!m) throw ReferentialError("pair references unknown mention " + mention_id);
    return trigger_lemma(index.trigger_tokens(*m), lemmatize);
  };

  FilterResult r;
  for (const auto& p : pairs) {
    bool match = false;
    if (options.mode == FilterMode::lemma_overlap) {
      match = lemma_of(p.m1) == lemma_of(p.m2);
    } else {
      const std::string l1 = lemma_of(p.m1), l2 = lemma_of(p.m2);
      const auto s1 = synonym_set_of(l1), s2 = synonym_set_of(l2);
      match = l1 == l2 || (s1 && s2 && *s1 == *s2);
    }
    const bool keep = match || (options.oracle && p.gold_label == 1) ||
                      keyed_uniform(options.seed, p.pair_id) < options.keep_nonmatch_rate;
    if (keep) {
      r.pairs.push_back(p);
    } else {
      ++r.dropped;
      if (p.gold_label == 1) ++r.dropped_positives;
    }
  }
  return r;
}

ContingencyTable trigger_match_stats(const std::vector<MentionPair>& pairs) {
  ContingencyTable t;
  for (const auto& p : pairs) {
    if (p.gold_label == 1) (p.lexically_similar_trigger ? t.coref_sim : t.coref_div)++;
    else (p.lexically_similar_trigger ? t.noncoref_sim : t.noncoref_div)++;
  }
  const double a = static_cast<double>(t.coref_sim), b = static_cast<double>(t.coref_div);
  const double c = static_cast<double>(t.noncoref_sim), d = static_cast<double>(t.noncoref_div);
  const double margins = (a + b) * (c + d) * (a + c) * (b + d);
  if (t.total() == 0) {
    t.phi_note = "no pairs";
  } else if (margins == 0.0) {
    t.phi_note = "zero-variance margin: every pair falls in one label or one trigger-match class";
  } else {
    t.phi = (a * d - b * c) / std::sqrt(margins);
  }
  return t;
}

void write_pairs(std::ostream& out, const std::vector<MentionPair>& pairs) {
  for (const auto& p : pairs)
    out << json{{"pair_id", p.pair_id}, {"m1", p.m1}, {"m2", p.m2}, {"label", p.gold_label},
                {"lexsim", p.lexically_similar_trigger}}
               .dump()
        << '\n';
}

std::vector<MentionPair> read_pairs(std::istream& in) {
  std::vector<MentionPair> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      MentionPair p;
      p.pair_id = j.at("pair_id").get<std::string>();
      p.m1 = j.at("m1").get<std::string>();
      p.m2 = j.at("m2").get<std::string>();
      p.gold_label = j.at("label").get<int>();
      p.lexically_similar_trigger = j.at("lexsim").get<bool>();
      out.push_back(std::move(p));
    } catch (const json::exception& e) {
      throw ParseError(lineno, std::string("malformed pair record: ") + e.what());
    }
  }
  return out;
}

}  // namespace acci
