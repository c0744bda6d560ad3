#include "acci/encoding.hpp"

#include "acci/error.hpp"

namespace acci {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::factual: return "factual";
    case Variant::trigger_only: return "trigger_only";
    case Variant::argument_only: return "argument_only";
  }
  return "factual";
}

ContextWindow parse_context_window(std::string_view s) {
  if (s == "sentence") return ContextWindow::sentence;
  if (s == "document") return ContextWindow::document;
  throw ConfigError("unknown context window '" + std::string(s) + "'");
}

MentionContext mention_context(const CorpusIndex& index, const Mention& mention, ContextWindow window) {
  MentionContext ctx;
  if (window == ContextWindow::sentence) {
    ctx.tokens = index.sentence_of(mention);
    ctx.trigger = mention.trigger;
  } else {
    const Document& d = index.document_of(mention);
    int offset = 0;
    for (std::size_t s = 0; s < d.sentences.size(); ++s) {
      if (static_cast<int>(s) == mention.sentence_idx) {
        ctx.trigger = {offset + mention.trigger.start, offset + mention.trigger.end};
      }
      offset += static_cast<int>(d.sentences[s].size());
      ctx.tokens.insert(ctx.tokens.end(), d.sentences[s].begin(), d.sentences[s].end());
    }
  }
  if (ctx.trigger.start < 0 || ctx.trigger.end <= ctx.trigger.start ||
      static_cast<std::size_t>(ctx.trigger.end) > ctx.tokens.size())
    throw ContractError("mention " + mention.mention_id + " has an invalid trigger span");
  return ctx;
}

namespace {

void check(const MentionContext& m) {
  if (m.trigger.start < 0 || m.trigger.end <= m.trigger.start ||
      static_cast<std::size_t>(m.trigger.end) > m.tokens.size())
    throw ContractError("trigger span outside its context");
}

template <typename It>
void append(std::vector<std::string>& out, It first, It last) {
  out.insert(out.end(), first, last);
}

}  // namespace

EncoderInput build_factual_input(const MentionContext& a, const MentionContext& b) {
  check(a);
  check(b);
  EncoderInput in;
  in.variant = Variant::factual;
  in.tokens.emplace_back(kCls);
  for (int side = 0; side < 2; ++side) {
    const MentionContext& m = side == 0 ? a : b;
    append(in.tokens, m.tokens.begin(), m.tokens.begin() + m.trigger.start);
    in.marker_positions.push_back(in.tokens.size());
    in.tokens.emplace_back(kMarkOpen);
    const std::size_t first = in.tokens.size();
    append(in.tokens, m.tokens.begin() + m.trigger.start, m.tokens.begin() + m.trigger.end);
    in.pooled_rows[side] = {first, in.tokens.size()};
    in.marker_positions.push_back(in.tokens.size());
    in.tokens.emplace_back(kMarkClose);
    append(in.tokens, m.tokens.begin() + m.trigger.end, m.tokens.end());
    in.tokens.emplace_back(kSep);
  }
  return in;
}

EncoderInput build_trigger_only_input(const MentionContext& a, const MentionContext& b) {
  check(a);
  check(b);
  EncoderInput in;
  in.variant = Variant::trigger_only;
  in.tokens.emplace_back(kCls);
  for (int side = 0; side < 2; ++side) {
    const MentionContext& m = side == 0 ? a : b;
    in.marker_positions.push_back(in.tokens.size());
    in.tokens.emplace_back(kMarkOpen);
    const std::size_t first = in.tokens.size();
    append(in.tokens, m.tokens.begin() + m.trigger.start, m.tokens.begin() + m.trigger.end);
    in.pooled_rows[side] = {first, in.tokens.size()};
    in.marker_positions.push_back(in.tokens.size());
    in.tokens.emplace_back(kMarkClose);
    in.tokens.emplace_back(kSep);
  }
  return in;
}

EncoderInput build_argument_only_input(const MentionContext& a, const MentionContext& b) {
  check(a);
  check(b);
  EncoderInput in;
  in.variant = Variant::argument_only;
  in.tokens.emplace_back(kCls);
  for (int side = 0; side < 2; ++side) {
    const MentionContext& m = side == 0 ? a : b;
    append(in.tokens, m.tokens.begin(), m.tokens.begin() + m.trigger.start);
    in.pooled_rows[side] = {in.tokens.size(), in.tokens.size() + 1};
    in.tokens.emplace_back(kTriggerMask);
    append(in.tokens, m.tokens.begin() + m.trigger.end, m.tokens.end());
    in.tokens.emplace_back(kSep);
  }
  return in;
}

PairInputs build_pair_inputs(const MentionContext& a, const MentionContext& b) {
  return {build_factual_input(a, b), build_trigger_only_input(a, b), build_argument_only_input(a, b)};
}

EncodedPair pool(Matrix hidden, const EncoderInput& input) {
  if (hidden.rows() != input.tokens.size()) throw ContractError("hidden states do not match the input length");
  EncodedPair out;
  out.variant = input.variant;
  out.h_cls.assign(hidden.row(0).begin(), hidden.row(0).end());
  out.e_a = mean_rows(hidden, input.pooled_rows[0].first, input.pooled_rows[0].second);
  out.e_b = mean_rows(hidden, input.pooled_rows[1].first, input.pooled_rows[1].second);
  out.hidden = std::move(hidden);
  return out;
}

EncodedPair encode(const EncoderBackend& backend, const EncoderInput& input) {
  if (input.tokens.empty()) throw ContractError("cannot encode an empty input");
  return pool(backend.forward(input.tokens), input);
}

}  // namespace acci
