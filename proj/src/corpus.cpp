#include "acci/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "acci/error.hpp"
#include "json.hpp"

namespace acci {

using nlohmann::json;

std::string_view to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    case Split::test: return "test";
  }
  return "train";
}

Split parse_split(std::string_view s) {
  if (s == "train") return Split::train;
  if (s == "dev") return Split::dev;
  if (s == "test") return Split::test;
  throw ConfigError("unknown split '" + std::string(s) + "'");
}

std::string_view to_string(ArgRole r) {
  switch (r) {
    case ArgRole::time: return "time";
    case ArgRole::location: return "location";
    case ArgRole::participant: return "participant";
    case ArgRole::other: return "other";
  }
  return "other";
}

ArgRole parse_arg_role(std::string_view s) {
  if (s == "time") return ArgRole::time;
  if (s == "location") return ArgRole::location;
  if (s == "participant") return ArgRole::participant;
  return ArgRole::other;
}

CorpusIndex::CorpusIndex(const Corpus& corpus) : corpus_(&corpus) {
  for (const auto& d : corpus.documents) docs_.emplace(d.doc_id, &d);
  for (const auto& m : corpus.mentions) mentions_.emplace(m.mention_id, &m);
}

const Document* CorpusIndex::find_document(std::string_view doc_id) const {
  auto it = docs_.find(std::string(doc_id));
  return it == docs_.end() ? nullptr : it->second;
}

const Mention* CorpusIndex::find_mention(std::string_view mention_id) const {
  auto it = mentions_.find(std::string(mention_id));
  return it == mentions_.end() ? nullptr : it->second;
}

const Document& CorpusIndex::document_of(const Mention& m) const {
  const Document* d = find_document(m.doc_id);
  if (!d) throw ReferentialError("mention " + m.mention_id + " references unknown doc " + m.doc_id);
  return *d;
}

const Sentence& CorpusIndex::sentence_of(const Mention& m) const {
  const Document& d = document_of(m);
  if (m.sentence_idx < 0 || static_cast<std::size_t>(m.sentence_idx) >= d.sentences.size())
    throw ContractError("mention " + m.mention_id + " has sentence index out of range");
  return d.sentences[static_cast<std::size_t>(m.sentence_idx)];
}

std::vector<std::string> CorpusIndex::trigger_tokens(const Mention& m) const {
  const Sentence& s = sentence_of(m);
  return {s.begin() + m.trigger.start, s.begin() + m.trigger.end};
}

namespace {

Span read_span(const json& j, std::size_t line, const char* field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
    throw ParseError(line, std::string("field '") + field + "' must be [int,int]");
  return {j[0].get<int>(), j[1].get<int>()};
}

std::string read_string(const json& rec, const char* field, std::size_t line) {
  auto it = rec.find(field);
  if (it == rec.end() || !it->is_string())
    throw ParseError(line, std::string("missing or non-string field '") + field + "'");
  return it->get<std::string>();
}

Document read_document(const json& rec, std::size_t line) {
  Document d;
  d.doc_id = read_string(rec, "doc_id", line);
  d.topic_id = read_string(rec, "topic", line);
  d.subtopic_id = read_string(rec, "subtopic", line);
  auto it = rec.find("sentences");
  if (it == rec.end() || !it->is_array()) throw ParseError(line, "missing array field 'sentences'");
  for (const auto& s : *it) {
    if (!s.is_array()) throw ParseError(line, "each sentence must be an array of strings");
    Sentence sent;
    for (const auto& tok : s) {
      if (!tok.is_string()) throw ParseError(line, "tokens must be strings");
      sent.push_back(tok.get<std::string>());
    }
    d.sentences.push_back(std::move(sent));
  }
  if (auto src = rec.find("source"); src != rec.end() && src->is_string()) d.source = src->get<std::string>();
  return d;
}

Mention read_mention(const json& rec, std::size_t line) {
  Mention m;
  m.mention_id = read_string(rec, "mention_id", line);
  m.doc_id = read_string(rec, "doc_id", line);
  auto si = rec.find("sentence_idx");
  if (si == rec.end() || !si->is_number_integer()) throw ParseError(line, "missing integer field 'sentence_idx'");
  m.sentence_idx = si->get<int>();
  auto tr = rec.find("trigger");
  if (tr == rec.end()) throw ParseError(line, "missing field 'trigger'");
  m.trigger = read_span(*tr, line, "trigger");
  m.gold_cluster_id = read_string(rec, "cluster", line);
  if (auto args = rec.find("args"); args != rec.end() && !args->is_null()) {
    if (!args->is_array()) throw ParseError(line, "field 'args' must be an array");
    for (const auto& a : *args) {
      if (!a.is_object()) throw ParseError(line, "each arg must be an object");
      ArgumentSpan arg;
      arg.role = parse_arg_role(read_string(a, "role", line));
      auto sp = a.find("span");
      if (sp == a.end()) throw ParseError(line, "arg missing 'span'");
      arg.span = read_span(*sp, line, "span");
      m.arguments.push_back(arg);
    }
  }
  return m;
}

std::string summarize(const std::vector<Violation>& vs) {
  std::ostringstream os;
  os << vs.size() << " corpus violation(s)";
  for (std::size_t i = 0; i < vs.size() && i < 5; ++i)
    os << "; " << vs[i].entity << " [" << vs[i].rule << "]: " << vs[i].message;
  return os.str();
}

}  // namespace

Corpus parse_corpus(std::istream& in, Split split) {
  Corpus c;
  c.split = split;
  std::vector<std::size_t> mention_lines;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (std::all_of(line.begin(), line.end(), [](unsigned char ch) { return std::isspace(ch); })) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(lineno, std::string("malformed JSON: ") + e.what());
    }
    if (!rec.is_object()) throw ParseError(lineno, "record must be a JSON object");
    const std::string kind = read_string(rec, "kind", lineno);
    if (kind == "doc") {
      c.documents.push_back(read_document(rec, lineno));
    } else if (kind == "mention") {
      c.mentions.push_back(read_mention(rec, lineno));
      mention_lines.push_back(lineno);
    } else {
      throw ParseError(lineno, "unknown record kind '" + kind + "'");
    }
  }

  std::set<std::string> doc_ids;
  for (const auto& d : c.documents) doc_ids.insert(d.doc_id);
  for (std::size_t i = 0; i < c.mentions.size(); ++i) {
    if (!doc_ids.count(c.mentions[i].doc_id))
      throw ReferentialError("line " + std::to_string(mention_lines[i]) + ": mention " +
                             c.mentions[i].mention_id + " references unknown doc_id '" +
                             c.mentions[i].doc_id + "'");
  }
  if (auto vs = validate_corpus(c); !vs.empty()) throw ValidationError(summarize(vs));
  return c;
}

Corpus parse_corpus(const std::filesystem::path& path, Split split) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus file " + path.string());
  return parse_corpus(in, split);
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& d : corpus.documents) {
    json rec = {{"kind", "doc"}, {"doc_id", d.doc_id}, {"topic", d.topic_id},
                {"subtopic", d.subtopic_id}, {"sentences", d.sentences}};
    if (d.source) rec["source"] = *d.source;
    out << rec.dump() << '\n';
  }
  for (const auto& m : corpus.mentions) {
    json rec = {{"kind", "mention"}, {"mention_id", m.mention_id}, {"doc_id", m.doc_id},
                {"sentence_idx", m.sentence_idx}, {"trigger", {m.trigger.start, m.trigger.end}},
                {"cluster", m.gold_cluster_id}};
    if (!m.arguments.empty()) {
      json args = json::array();
      for (const auto& a : m.arguments)
        args.push_back({{"role", to_string(a.role)}, {"span", {a.span.start, a.span.end}}});
      rec["args"] = std::move(args);
    }
    out << rec.dump() << '\n';
  }
}

void write_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write corpus file " + path.string());
  write_corpus(out, corpus);
}

std::vector<Violation> validate_corpus(const Corpus& corpus) {
  std::vector<Violation> out;
  std::unordered_map<std::string, const Document*> docs;
  for (const auto& d : corpus.documents) {
    const std::string ent = "doc:" + d.doc_id;
    if (d.doc_id.empty()) out.push_back({ent, "doc-id-empty", "doc_id is empty"});
    if (!docs.emplace(d.doc_id, &d).second)
      out.push_back({ent, "doc-id-unique", "duplicate doc_id"});
    if (d.topic_id.empty()) out.push_back({ent, "topic-empty", "topic_id is empty"});
    for (std::size_t s = 0; s < d.sentences.size(); ++s)
      if (d.sentences[s].empty())
        out.push_back({ent, "sentence-empty", "sentence " + std::to_string(s) + " has no tokens"});
  }

  std::set<std::string> mention_ids;
  std::map<std::string, std::string> cluster_topic;
  auto check_span = [&](const std::string& ent, const Span& sp, std::size_t len, const char* what) {
    if (sp.end <= sp.start) {
      out.push_back({ent, "span-order", std::string(what) + " span has end <= start"});
    } else if (sp.start < 0 || static_cast<std::size_t>(sp.end) > len) {
      out.push_back({ent, "span-bounds", std::string(what) + " span outside sentence bounds"});
    }
  };

  for (const auto& m : corpus.mentions) {
    const std::string ent = "mention:" + m.mention_id;
    if (m.mention_id.empty()) out.push_back({ent, "mention-id-empty", "mention_id is empty"});
    if (!mention_ids.insert(m.mention_id).second)
      out.push_back({ent, "mention-id-unique", "duplicate mention_id"});
    if (m.gold_cluster_id.empty()) out.push_back({ent, "cluster-empty", "gold cluster id is empty"});
    auto it = docs.find(m.doc_id);
    if (it == docs.end()) {
      out.push_back({ent, "dangling-doc", "unknown doc_id '" + m.doc_id + "'"});
      continue;
    }
    const Document& d = *it->second;
    if (m.sentence_idx < 0 || static_cast<std::size_t>(m.sentence_idx) >= d.sentences.size()) {
      out.push_back({ent, "sentence-index", "sentence_idx out of range"});
      continue;
    }
    const std::size_t len = d.sentences[static_cast<std::size_t>(m.sentence_idx)].size();
    check_span(ent, m.trigger, len, "trigger");
    for (const auto& a : m.arguments) check_span(ent, a.span, len, "argument");

    auto [ct, inserted] = cluster_topic.emplace(m.gold_cluster_id, d.topic_id);
    if (!inserted && ct->second != d.topic_id)
      out.push_back({ent, "cluster-topic",
                     "cluster '" + m.gold_cluster_id + "' spans topics " + ct->second + " and " + d.topic_id});
  }
  return out;
}

SplitCorpora split_by_topics(const Corpus& corpus, const std::map<std::string, Split>& assignment) {
  SplitCorpora out;
  out.train.split = Split::train;
  out.dev.split = Split::dev;
  out.test.split = Split::test;
  auto target = [&](Split s) -> Corpus& {
    return s == Split::train ? out.train : s == Split::dev ? out.dev : out.test;
  };
  std::unordered_map<std::string, Split> doc_split;
  for (const auto& d : corpus.documents) {
    auto it = assignment.find(d.topic_id);
    if (it == assignment.end()) throw ConfigError("split assignment does not cover topic '" + d.topic_id + "'");
    doc_split.emplace(d.doc_id, it->second);
    target(it->second).documents.push_back(d);
  }
  for (const auto& m : corpus.mentions) {
    auto it = doc_split.find(m.doc_id);
    if (it == doc_split.end()) throw ReferentialError("mention " + m.mention_id + " references unknown doc");
    target(it->second).mentions.push_back(m);
  }
  return out;
}

std::map<std::string, Split> ecb_plus_topic_assignment(const Corpus& corpus) {
  static const std::set<int> dev_topics = {2, 5, 12, 18, 21, 34, 35};
  std::map<std::string, Split> out;
  for (const auto& d : corpus.documents) {
    int t = 0;
    try {
      t = std::stoi(d.topic_id);
    } catch (const std::exception&) {
      throw ConfigError("ECB+ topic ids must be integers, got '" + d.topic_id + "'");
    }
    Split s = Split::train;
    if (t >= 36) s = Split::test;
    else if (dev_topics.count(t)) s = Split::dev;
    out[d.topic_id] = s;
  }
  return out;
}

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats st;
  std::set<std::string> topics;
  for (const auto& d : corpus.documents) topics.insert(d.topic_id);
  std::map<std::string, std::size_t> sizes;
  for (const auto& m : corpus.mentions) ++sizes[m.gold_cluster_id];
  st.topics = topics.size();
  st.documents = corpus.documents.size();
  st.mentions = corpus.mentions.size();
  st.clusters = sizes.size();
  for (const auto& [id, n] : sizes)
    if (n == 1) ++st.singletons;
  return st;
}

}  // namespace acci
