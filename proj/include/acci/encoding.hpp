#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "acci/corpus.hpp"
#include "acci/tensor.hpp"

namespace acci {

// Reserved token strings (bit-exact).
inline constexpr std::string_view kCls = "[CLS]";
inline constexpr std::string_view kSep = "[SEP]";
inline constexpr std::string_view kMarkOpen = "<m>";
inline constexpr std::string_view kMarkClose = "</m>";
inline constexpr std::string_view kTriggerMask = "[TMASK]";

enum class Variant { factual, trigger_only, argument_only };
std::string_view to_string(Variant v);

// A mention's context window with the trigger located inside it.
struct MentionContext {
  std::vector<std::string> tokens;
  Span trigger;
};

enum class ContextWindow { sentence, document };
ContextWindow parse_context_window(std::string_view s);

MentionContext mention_context(const CorpusIndex& index, const Mention& mention,
                               ContextWindow window = ContextWindow::sentence);

struct EncoderInput {
  std::vector<std::string> tokens;
  Variant variant = Variant::factual;
  // Factual and trigger-only: indices of <m>, </m>, <m>, </m>. Empty for the
  // argument-only variant, which carries no markers.
  std::vector<std::size_t> marker_positions;
  // Half-open row ranges averaged into e_a and e_b: the tokens inside each
  // marker pair, or each mention's [TMASK] row.
  std::array<std::pair<std::size_t, std::size_t>, 2> pooled_rows{};
};

// [CLS] prefix <m> trigger </m> suffix [SEP] (second mention) [SEP]
EncoderInput build_factual_input(const MentionContext& a, const MentionContext& b);
// [CLS] <m> trigger </m> [SEP] <m> trigger </m> [SEP]
EncoderInput build_trigger_only_input(const MentionContext& a, const MentionContext& b);
// [CLS] prefix [TMASK] suffix [SEP] ... [SEP]; one [TMASK] per trigger, whatever
// its length, so the input carries no trace of the trigger.
EncoderInput build_argument_only_input(const MentionContext& a, const MentionContext& b);

struct PairInputs {
  EncoderInput factual;
  EncoderInput trigger_only;
  EncoderInput argument_only;
};
PairInputs build_pair_inputs(const MentionContext& a, const MentionContext& b);

struct EncodedPair {
  Matrix hidden;  // L x d
  Vector h_cls;
  Vector e_a;
  Vector e_b;
  Variant variant = Variant::factual;
};

// Pools an already computed hidden-state matrix according to `input`.
EncodedPair pool(Matrix hidden, const EncoderInput& input);

class EncoderBackend {
 public:
  virtual ~EncoderBackend() = default;
  virtual std::string name() const = 0;
  virtual std::size_t dim() const = 0;
  // One row per token. Deterministic for fixed parameters.
  virtual Matrix forward(std::span<const std::string> tokens) const = 0;
  virtual bool supports_gradients() const { return false; }
  virtual std::unique_ptr<EncoderBackend> clone() const = 0;
};

EncodedPair encode(const EncoderBackend& backend, const EncoderInput& input);

// ---------------------------------------------------------------------------
// Toy backend: token plus segment embedding followed by a stack of single-head
// self-attention mixing layers, each with a residual connection and tanh:
//
//   X0 = E[ids] + S[seg];  A = softmax(X Wq (X Wk)^T / sqrt(d));  X' = tanh(X + A X Wv)
//
// Segment 0 runs through the first [SEP], segment 1 is the rest. There are no
// position embeddings, so equal tokens in one segment map to equal rows.

struct ToyLayer {
  Matrix wq, wk, wv;
};

struct ToyLayerCache {
  Matrix x, q, k, v, attn, out;
};

struct ToyEncoderCache {
  std::vector<std::size_t> ids;
  std::vector<std::size_t> segments;  // embedding rows of the segment vectors
  std::vector<ToyLayerCache> layers;
};

struct ToyEncoderGrads {
  Matrix embeddings;
  std::vector<ToyLayer> layers;
  void zero();
};

class ToyEncoder final : public EncoderBackend {
 public:
  static constexpr std::size_t kDefaultDim = 64;
  static constexpr std::size_t kDefaultLayers = 2;
  static constexpr std::size_t kDefaultOovBuckets = 1024;

  ToyEncoder(std::vector<std::string> vocabulary, std::size_t dim, std::uint64_t seed,
             std::size_t oov_buckets = kDefaultOovBuckets, std::size_t layers = kDefaultLayers);

  // Sorted distinct tokens of the corpora plus the reserved tokens.
  static std::vector<std::string> build_vocabulary(std::span<const Corpus* const> corpora);

  std::string name() const override { return "toy"; }
  std::size_t dim() const override { return dim_; }
  Matrix forward(std::span<const std::string> tokens) const override;
  bool supports_gradients() const override { return true; }
  std::unique_ptr<EncoderBackend> clone() const override { return std::make_unique<ToyEncoder>(*this); }

  Matrix forward(std::span<const std::string> tokens, ToyEncoderCache& cache) const;
  // Accumulates parameter gradients for upstream gradient dH.
  void backward(const ToyEncoderCache& cache, const Matrix& d_hidden, ToyEncoderGrads& grads) const;
  ToyEncoderGrads make_grads() const;

  std::size_t token_id(std::string_view token) const;
  // Embedding row holding segment vector 0 or 1.
  std::size_t segment_row(std::size_t segment) const { return vocab_.size() + oov_buckets_ + segment; }
  const std::vector<std::string>& vocabulary() const { return vocab_; }
  std::size_t oov_buckets() const { return oov_buckets_; }

  Matrix& embeddings() { return embeddings_; }
  const Matrix& embeddings() const { return embeddings_; }
  std::vector<ToyLayer>& layers() { return layers_; }
  const std::vector<ToyLayer>& layers() const { return layers_; }

 private:
  std::size_t dim_;
  std::size_t oov_buckets_;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, std::size_t> ids_;
  Matrix embeddings_;
  std::vector<ToyLayer> layers_;
};

// ---------------------------------------------------------------------------
// External backend: any contextual encoder reachable through a request/response
// transport. Request {"tokens":[str,...]}; response {"hidden":[[float,...],...]}
// with one row per request token. The service owns subword tokenisation and
// must average sub-pieces back onto the given tokens.

using ExternalTransport = std::function<std::string(const std::string& request_json)>;

class ExternalEncoder final : public EncoderBackend {
 public:
  ExternalEncoder(std::size_t dim, ExternalTransport transport);

  std::string name() const override { return "external"; }
  std::size_t dim() const override { return dim_; }
  Matrix forward(std::span<const std::string> tokens) const override;
  std::unique_ptr<EncoderBackend> clone() const override { return std::make_unique<ExternalEncoder>(*this); }

 private:
  std::size_t dim_;
  ExternalTransport transport_;
};

// POSTs the request body to http://host:port/path.
ExternalTransport http_transport(std::string host, int port, std::string path);

}  // namespace acci
