#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "acci/encoding.hpp"
#include "acci/tensor.hpp"

namespace acci {

// Parameters of the three pair heads. The fusion matrix w_f is a single
// object read by both the bias head and the argument head.
struct PairHeads {
  std::size_t dim = 0;     // d
  std::size_t hidden = 0;  // d_h

  // Factual head: h = tanh(W^T [h_cls; e_a; e_b; e_a*e_b]), p_f = sigmoid(w_p.h + b_p)
  Matrix w;  // 4d x d_h
  Vector w_p;
  double b_p = 0.0;

  Matrix w_f;  // 4d x d_h, shared

  // Bias head: h_E = tanh(W_f^T [phi_c; t_a; t_b; t_a*t_b]), s_bias = sigmoid(w_e.h_E + b_e)
  Vector w_e;
  double b_e = 0.0;
  Vector phi_c;

  // Argument head: h_arg = tanh(W_f^T [c_arg; phi_e; phi_e; 0]), p_c = sigmoid(w_arg.h_arg + b_arg)
  Vector w_arg;
  double b_arg = 0.0;
  Vector phi_e;

  // Fusion matrices ~ N(0, 1/(4d)); output weights ~ N(0, 1/d_h); biases and
  // placeholders zero.
  static PairHeads init(std::size_t dim, std::size_t hidden, std::uint64_t seed);
  static PairHeads zeros(std::size_t dim, std::size_t hidden);

  friend bool operator==(const PairHeads&, const PairHeads&) = default;
};

// Everything a head computed on one input, kept for the backward pass.
struct HeadTrace {
  Vector z;  // fused 4d input
  Vector h;  // d_h activations
  double logit = 0.0;
  double p = 0.5;
};

HeadTrace factual_forward(const PairHeads& heads, const EncodedPair& enc);
HeadTrace bias_forward(const PairHeads& heads, const EncodedPair& enc);
HeadTrace argument_forward(const PairHeads& heads, const EncodedPair& enc);

inline double factual_score(const PairHeads& h, const EncodedPair& e) { return factual_forward(h, e).p; }
inline double bias_score(const PairHeads& h, const EncodedPair& e) { return bias_forward(h, e).p; }
inline double argument_score(const PairHeads& h, const EncodedPair& e) { return argument_forward(h, e).p; }

struct HeadGrads {
  Matrix w;
  Vector w_p;
  double b_p = 0.0;
  Matrix w_f;
  Vector w_e;
  double b_e = 0.0;
  Vector phi_c;
  Vector w_arg;
  double b_arg = 0.0;
  Vector phi_e;

  explicit HeadGrads(const PairHeads& shape);
  void zero();
};

// Gradients with respect to the pooled encoder outputs of one input.
struct PooledGrads {
  Vector h_cls, e_a, e_b;
};

// Each backward takes dL/dlogit. The factual and argument passes return the
// gradient reaching the encoder; the bias pass updates w_e, b_e and phi_c
// only and returns nothing.
PooledGrads factual_backward(const PairHeads& heads, const HeadTrace& t, double d_logit, HeadGrads& g);
PooledGrads argument_backward(const PairHeads& heads, const HeadTrace& t, double d_logit, HeadGrads& g);
void bias_backward(const PairHeads& heads, const HeadTrace& t, double d_logit, HeadGrads& g);

// Scatters pooled-vector gradients back onto the rows of dH.
Matrix unpool(const PooledGrads& g, const EncoderInput& input, std::size_t dim);

// Raw head outputs for one pair; independent of alpha and beta.
struct PairComponents {
  double p_f = 0.5;
  double p_c = 0.5;
  double s_bias = 0.5;
};

struct ScoreBundle {
  double p_f = 0.5;
  double p_c = 0.5;
  double s_bias = 0.5;
  double y = 0.5;
  double alpha_infer = 0.0;
  double beta = 0.0;
  bool decision = true;
};

inline constexpr double kDecisionThreshold = 0.5;

// y = p_f + alpha * p_c - beta * s_bias; coreferent iff y >= 0.5.
ScoreBundle debiased_combine(double p_f, double p_c, double s_bias, double alpha_infer, double beta);
inline ScoreBundle debiased_combine(const PairComponents& c, double alpha_infer, double beta) {
  return debiased_combine(c.p_f, c.p_c, c.s_bias, alpha_infer, beta);
}

struct ScoredPair {
  std::string pair_id;
  std::string m1, m2;
  ScoreBundle score;
};

// JSONL {"pair_id","m1","m2","p_f","p_c","s_bias","y","alpha","beta","decision"}
void write_scores(std::ostream& out, const std::vector<ScoredPair>& scores);
std::vector<ScoredPair> read_scores(std::istream& in);

}  // namespace acci
