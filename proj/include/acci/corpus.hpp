#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace acci {

enum class Split { train, dev, test };
std::string_view to_string(Split s);
Split parse_split(std::string_view s);

// Half-open token interval [start, end).
struct Span {
  int start = 0;
  int end = 0;
  int length() const { return end - start; }
  friend bool operator==(const Span&, const Span&) = default;
};

enum class ArgRole { time, location, participant, other };
std::string_view to_string(ArgRole r);
ArgRole parse_arg_role(std::string_view s);

struct ArgumentSpan {
  ArgRole role = ArgRole::other;
  Span span;
  friend bool operator==(const ArgumentSpan&, const ArgumentSpan&) = default;
};

using Sentence = std::vector<std::string>;

struct Document {
  std::string doc_id;
  std::string topic_id;
  std::string subtopic_id;
  std::vector<Sentence> sentences;
  std::optional<std::string> source;
  friend bool operator==(const Document&, const Document&) = default;
};

struct Mention {
  std::string mention_id;
  std::string doc_id;
  int sentence_idx = 0;
  Span trigger;
  // Singletons carry their own one-member cluster id.
  std::string gold_cluster_id;
  std::vector<ArgumentSpan> arguments;
  friend bool operator==(const Mention&, const Mention&) = default;
};

struct Corpus {
  std::vector<Document> documents;
  std::vector<Mention> mentions;
  Split split = Split::train;
  friend bool operator==(const Corpus&, const Corpus&) = default;
};

struct Violation {
  std::string entity;  // e.g. "mention:m12" or "doc:d3"
  std::string rule;    // short rule tag, e.g. "span-order"
  std::string message;
};

// Lookup tables over a corpus. Holds pointers into `corpus`, which must
// outlive the index and stay unmodified.
class CorpusIndex {
 public:
  explicit CorpusIndex(const Corpus& corpus);

  const Corpus& corpus() const { return *corpus_; }
  const Document* find_document(std::string_view doc_id) const;
  const Mention* find_mention(std::string_view mention_id) const;
  const Document& document_of(const Mention& m) const;
  const Sentence& sentence_of(const Mention& m) const;
  std::vector<std::string> trigger_tokens(const Mention& m) const;

 private:
  const Corpus* corpus_;
  std::unordered_map<std::string, const Document*> docs_;
  std::unordered_map<std::string, const Mention*> mentions_;
};

Corpus parse_corpus(const std::filesystem::path& path, Split split = Split::train);
Corpus parse_corpus(std::istream& in, Split split = Split::train);
void write_corpus(std::ostream& out, const Corpus& corpus);
void write_corpus(const std::filesystem::path& path, const Corpus& corpus);

std::vector<Violation> validate_corpus(const Corpus& corpus);

struct SplitCorpora {
  Corpus train;
  Corpus dev;
  Corpus test;
};

SplitCorpora split_by_topics(const Corpus& corpus, const std::map<std::string, Split>& assignment);

// Conventional ECB+ topic assignment: 36-45 test, {2,5,12,18,21,34,35} dev,
// the remaining topics train. Topic ids are matched by their integer value.
std::map<std::string, Split> ecb_plus_topic_assignment(const Corpus& corpus);

struct CorpusStats {
  std::size_t topics = 0;
  std::size_t documents = 0;
  std::size_t mentions = 0;
  std::size_t clusters = 0;
  std::size_t singletons = 0;
};
CorpusStats corpus_stats(const Corpus& corpus);

}  // namespace acci
