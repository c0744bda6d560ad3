#include <algorithm>
#include <cmath>
#include <set>

#include "acci/encoding.hpp"
#include "acci/error.hpp"
#include "acci/rng.hpp"

namespace acci {

void ToyEncoderGrads::zero() {
  embeddings.fill(0.0);
  for (auto& l : layers) {
    l.wq.fill(0.0);
    l.wk.fill(0.0);
    l.wv.fill(0.0);
  }
}

ToyEncoder::ToyEncoder(std::vector<std::string> vocabulary, std::size_t dim, std::uint64_t seed,
                       std::size_t oov_buckets, std::size_t layers)
    : dim_(dim), oov_buckets_(oov_buckets), vocab_(std::move(vocabulary)) {
  if (dim_ == 0) throw ConfigError("encoder dimension must be positive");
  if (oov_buckets_ == 0) throw ConfigError("at least one OOV bucket is required");
  if (layers == 0) throw ConfigError("the toy encoder needs at least one layer");
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    if (!ids_.emplace(vocab_[i], i).second) throw ConfigError("duplicate vocabulary entry '" + vocab_[i] + "'");
  }
  Rng rng(seed);
  embeddings_ = Matrix(vocab_.size() + oov_buckets_ + 2, dim_);
  for (double& x : embeddings_.flat()) x = rng.normal();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim_));
  layers_.resize(layers);
  for (auto& l : layers_) {
    for (Matrix* w : {&l.wq, &l.wk, &l.wv}) {
      *w = Matrix(dim_, dim_);
      for (double& x : w->flat()) x = scale * rng.normal();
    }
  }
}

std::vector<std::string> ToyEncoder::build_vocabulary(std::span<const Corpus* const> corpora) {
  std::set<std::string> seen{std::string(kCls), std::string(kSep), std::string(kMarkOpen),
                             std::string(kMarkClose), std::string(kTriggerMask)};
  for (const Corpus* c : corpora) {
    for (const auto& d : c->documents)
      for (const auto& s : d.sentences) seen.insert(s.begin(), s.end());
  }
  return {seen.begin(), seen.end()};
}

std::size_t ToyEncoder::token_id(std::string_view token) const {
  if (auto it = ids_.find(std::string(token)); it != ids_.end()) return it->second;
  return vocab_.size() + stable_hash(token) % oov_buckets_;
}

ToyEncoderGrads ToyEncoder::make_grads() const {
  ToyEncoderGrads g{Matrix(embeddings_.rows(), dim_), {}};
  g.layers.assign(layers_.size(), ToyLayer{Matrix(dim_, dim_), Matrix(dim_, dim_), Matrix(dim_, dim_)});
  return g;
}

Matrix ToyEncoder::forward(std::span<const std::string> tokens) const {
  ToyEncoderCache cache;
  return forward(tokens, cache);
}

namespace {

void layer_forward(const ToyLayer& w, ToyLayerCache& c, std::size_t dim) {
  const std::size_t n = c.x.rows();
  c.q = matmul(c.x, w.wq);
  c.k = matmul(c.x, w.wk);
  c.v = matmul(c.x, w.wv);

  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(dim));
  c.attn = matmul_nt(c.q, c.k);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = c.attn.row(i);
    double top = -INFINITY;
    for (double& s : r) {
      s *= inv_sqrt_d;
      top = std::max(top, s);
    }
    double z = 0.0;
    for (double& s : r) {
      s = std::exp(s - top);
      z += s;
    }
    for (double& s : r) s /= z;
  }

  c.out = matmul(c.attn, c.v);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < dim; ++j) c.out(i, j) = std::tanh(c.x(i, j) + c.out(i, j));
}

// Returns the gradient with respect to the layer input.
Matrix layer_backward(const ToyLayer& w, const ToyLayerCache& c, const Matrix& d_out, ToyLayer& g, std::size_t dim) {
  const std::size_t n = c.x.rows();
  Matrix dz(n, dim);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      const double h = c.out(i, j);
      dz(i, j) = d_out(i, j) * (1.0 - h * h);
    }

  Matrix d_attn = matmul_nt(dz, c.v);
  Matrix dv = matmul_tn(c.attn, dz);

  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(dim));
  Matrix ds(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double inner = 0.0;
    for (std::size_t j = 0; j < n; ++j) inner += d_attn(i, j) * c.attn(i, j);
    for (std::size_t j = 0; j < n; ++j) ds(i, j) = c.attn(i, j) * (d_attn(i, j) - inner) * inv_sqrt_d;
  }
  Matrix dq = matmul(ds, c.k);
  Matrix dk = matmul_tn(ds, c.q);

  add_matmul_tn(c.x, dq, g.wq);
  add_matmul_tn(c.x, dk, g.wk);
  add_matmul_tn(c.x, dv, g.wv);

  Matrix dx = std::move(dz);
  const Matrix via_q = matmul_nt(dq, w.wq);
  const Matrix via_k = matmul_nt(dk, w.wk);
  const Matrix via_v = matmul_nt(dv, w.wv);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < dim; ++j) dx(i, j) += via_q(i, j) + via_k(i, j) + via_v(i, j);
  return dx;
}

}  // namespace

Matrix ToyEncoder::forward(std::span<const std::string> tokens, ToyEncoderCache& cache) const {
  const std::size_t n = tokens.size();
  if (n == 0) throw ContractError("cannot encode an empty token sequence");
  cache.ids.resize(n);
  cache.segments.resize(n);
  cache.layers.resize(layers_.size());
  Matrix& x0 = cache.layers[0].x;
  x0 = Matrix(n, dim_);
  std::size_t segment = 0;
  for (std::size_t i = 0; i < n; ++i) {
    cache.ids[i] = token_id(tokens[i]);
    cache.segments[i] = segment_row(segment);
    if (segment == 0 && tokens[i] == kSep) segment = 1;
    const auto e = embeddings_.row(cache.ids[i]);
    const auto s = embeddings_.row(cache.segments[i]);
    for (std::size_t c = 0; c < dim_; ++c) x0(i, c) = e[c] + s[c];
  }
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (l > 0) cache.layers[l].x = cache.layers[l - 1].out;
    layer_forward(layers_[l], cache.layers[l], dim_);
  }
  return cache.layers.back().out;
}

void ToyEncoder::backward(const ToyEncoderCache& cache, const Matrix& d_hidden, ToyEncoderGrads& grads) const {
  const std::size_t n = cache.ids.size();
  if (d_hidden.rows() != n || d_hidden.cols() != dim_) throw ContractError("gradient shape mismatch");
  if (cache.layers.size() != layers_.size() || grads.layers.size() != layers_.size())
    throw ContractError("encoder cache or gradient does not match the layer count");

  Matrix d = d_hidden;
  for (std::size_t l = layers_.size(); l-- > 0;) d = layer_backward(layers_[l], cache.layers[l], d, grads.layers[l], dim_);

  for (std::size_t i = 0; i < n; ++i) {
    auto g = grads.embeddings.row(cache.ids[i]);
    auto gs = grads.embeddings.row(cache.segments[i]);
    for (std::size_t c = 0; c < dim_; ++c) {
      g[c] += d(i, c);
      gs[c] += d(i, c);
    }
  }
}

}  // namespace acci
