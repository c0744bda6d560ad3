#include "acci/scoring.hpp"

#include <cmath>
#include <istream>
#include <json.hpp>
#include <ostream>

#include "acci/error.hpp"
#include "acci/rng.hpp"

namespace acci {

namespace {

void require(const EncodedPair& enc, Variant v, std::size_t dim) {
  if (enc.variant != v)
    throw ContractError("head expects a " + std::string(to_string(v)) + " encoding, got " +
                        std::string(to_string(enc.variant)));
  if (enc.h_cls.size() != dim || enc.e_a.size() != dim || enc.e_b.size() != dim)
    throw ContractError("encoding dimension does not match the heads");
}

Vector fuse(std::span<const double> a, std::span<const double> b, std::span<const double> c, bool interaction) {
  const std::size_t d = a.size();
  Vector z(4 * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    z[i] = a[i];
    z[d + i] = b[i];
    z[2 * d + i] = c[i];
    if (interaction) z[3 * d + i] = b[i] * c[i];
  }
  return z;
}

HeadTrace run(const Matrix& fusion, const Vector& out_w, double out_b, Vector z) {
  HeadTrace t;
  t.h = project(fusion, z);
  for (double& v : t.h) v = std::tanh(v);
  t.logit = dot(out_w, t.h) + out_b;
  t.p = sigmoid(t.logit);
  t.z = std::move(z);
  return t;
}

// dL/d(pre-activation) of the hidden layer.
Vector hidden_grad(const HeadTrace& t, const Vector& out_w, double d_logit) {
  Vector d_pre(t.h.size());
  for (std::size_t j = 0; j < t.h.size(); ++j) d_pre[j] = d_logit * out_w[j] * (1.0 - t.h[j] * t.h[j]);
  return d_pre;
}

void accumulate_outer(const Vector& z, const Vector& d_pre, Matrix& g) {
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i] == 0.0) continue;
    auto r = g.row(i);
    for (std::size_t j = 0; j < d_pre.size(); ++j) r[j] += z[i] * d_pre[j];
  }
}

// dz = W d_pre
Vector input_grad(const Matrix& w, const Vector& d_pre) {
  Vector dz(w.rows(), 0.0);
  for (std::size_t i = 0; i < w.rows(); ++i) dz[i] = dot(w.row(i), d_pre);
  return dz;
}

void fill_normal(Rng& rng, std::span<double> xs, double sd) {
  for (double& x : xs) x = sd * rng.normal();
}

}  // namespace

PairHeads PairHeads::zeros(std::size_t dim, std::size_t hidden) {
  if (dim == 0 || hidden == 0) throw ConfigError("head dimensions must be positive");
  PairHeads h;
  h.dim = dim;
  h.hidden = hidden;
  h.w = Matrix(4 * dim, hidden);
  h.w_p.assign(hidden, 0.0);
  h.w_f = Matrix(4 * dim, hidden);
  h.w_e.assign(hidden, 0.0);
  h.phi_c.assign(dim, 0.0);
  h.w_arg.assign(hidden, 0.0);
  h.phi_e.assign(dim, 0.0);
  return h;
}

PairHeads PairHeads::init(std::size_t dim, std::size_t hidden, std::uint64_t seed) {
  PairHeads h = zeros(dim, hidden);
  Rng rng(seed);
  const double fuse_sd = 1.0 / std::sqrt(4.0 * static_cast<double>(dim));
  const double out_sd = 1.0 / std::sqrt(static_cast<double>(hidden));
  fill_normal(rng, h.w.flat(), fuse_sd);
  fill_normal(rng, h.w_p, out_sd);
  fill_normal(rng, h.w_f.flat(), fuse_sd);
  fill_normal(rng, h.w_e, out_sd);
  fill_normal(rng, h.w_arg, out_sd);
  return h;
}

HeadTrace factual_forward(const PairHeads& heads, const EncodedPair& enc) {
  require(enc, Variant::factual, heads.dim);
  return run(heads.w, heads.w_p, heads.b_p, fuse(enc.h_cls, enc.e_a, enc.e_b, true));
}

HeadTrace bias_forward(const PairHeads& heads, const EncodedPair& enc) {
  require(enc, Variant::trigger_only, heads.dim);
  return run(heads.w_f, heads.w_e, heads.b_e, fuse(heads.phi_c, enc.e_a, enc.e_b, true));
}

HeadTrace argument_forward(const PairHeads& heads, const EncodedPair& enc) {
  require(enc, Variant::argument_only, heads.dim);
  return run(heads.w_f, heads.w_arg, heads.b_arg, fuse(enc.h_cls, heads.phi_e, heads.phi_e, false));
}

HeadGrads::HeadGrads(const PairHeads& s)
    : w(s.w.rows(), s.w.cols()),
      w_p(s.hidden, 0.0),
      w_f(s.w_f.rows(), s.w_f.cols()),
      w_e(s.hidden, 0.0),
      phi_c(s.dim, 0.0),
      w_arg(s.hidden, 0.0),
      phi_e(s.dim, 0.0) {}

void HeadGrads::zero() {
  w.fill(0.0);
  w_f.fill(0.0);
  for (Vector* v : {&w_p, &w_e, &phi_c, &w_arg, &phi_e}) std::fill(v->begin(), v->end(), 0.0);
  b_p = b_e = b_arg = 0.0;
}

PooledGrads factual_backward(const PairHeads& heads, const HeadTrace& t, double d_logit, HeadGrads& g) {
  const std::size_t d = heads.dim;
  for (std::size_t j = 0; j < heads.hidden; ++j) g.w_p[j] += d_logit * t.h[j];
  g.b_p += d_logit;
  const Vector d_pre = hidden_grad(t, heads.w_p, d_logit);
  accumulate_outer(t.z, d_pre, g.w);
  const Vector dz = input_grad(heads.w, d_pre);
  PooledGrads out{Vector(d), Vector(d), Vector(d)};
  for (std::size_t i = 0; i < d; ++i) {
    const double e_a = t.z[d + i], e_b = t.z[2 * d + i], dprod = dz[3 * d + i];
    out.h_cls[i] = dz[i];
    out.e_a[i] = dz[d + i] + dprod * e_b;
    out.e_b[i] = dz[2 * d + i] + dprod * e_a;
  }
  return out;
}

PooledGrads argument_backward(const PairHeads& heads, const HeadTrace& t, double d_logit, HeadGrads& g) {
  const std::size_t d = heads.dim;
  for (std::size_t j = 0; j < heads.hidden; ++j) g.w_arg[j] += d_logit * t.h[j];
  g.b_arg += d_logit;
  const Vector d_pre = hidden_grad(t, heads.w_arg, d_logit);
  accumulate_outer(t.z, d_pre, g.w_f);
  const Vector dz = input_grad(heads.w_f, d_pre);
  PooledGrads out{Vector(d), Vector(d, 0.0), Vector(d, 0.0)};
  for (std::size_t i = 0; i < d; ++i) {
    out.h_cls[i] = dz[i];
    g.phi_e[i] += dz[d + i] + dz[2 * d + i];
  }
  return out;
}

void bias_backward(const PairHeads& heads, const HeadTrace& t, double d_logit, HeadGrads& g) {
  const std::size_t d = heads.dim;
  for (std::size_t j = 0; j < heads.hidden; ++j) g.w_e[j] += d_logit * t.h[j];
  g.b_e += d_logit;
  const Vector d_pre = hidden_grad(t, heads.w_e, d_logit);
  for (std::size_t i = 0; i < d; ++i) g.phi_c[i] += dot(heads.w_f.row(i), d_pre);
}

Matrix unpool(const PooledGrads& g, const EncoderInput& input, std::size_t dim) {
  Matrix dh(input.tokens.size(), dim);
  for (std::size_t c = 0; c < dim; ++c) dh(0, c) += g.h_cls[c];
  const Vector* side[2] = {&g.e_a, &g.e_b};
  for (int s = 0; s < 2; ++s) {
    const auto [lo, hi] = input.pooled_rows[s];
    const double share = 1.0 / static_cast<double>(hi - lo);
    for (std::size_t r = lo; r < hi; ++r)
      for (std::size_t c = 0; c < dim; ++c) dh(r, c) += (*side[s])[c] * share;
  }
  return dh;
}

ScoreBundle debiased_combine(double p_f, double p_c, double s_bias, double alpha_infer, double beta) {
  auto unit = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw ContractError(std::string(name) + " must lie in [0,1]");
  };
  unit(p_f, "p_f");
  unit(p_c, "p_c");
  unit(s_bias, "s_bias");
  if (!(alpha_infer >= 0.0) || !std::isfinite(alpha_infer)) throw ContractError("alpha must be finite and >= 0");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ContractError("beta must be finite and >= 0");
  ScoreBundle b;
  b.p_f = p_f;
  b.p_c = p_c;
  b.s_bias = s_bias;
  b.alpha_infer = alpha_infer;
  b.beta = beta;
  b.y = p_f + alpha_infer * p_c - beta * s_bias;
  b.decision = b.y >= kDecisionThreshold;
  return b;
}

void write_scores(std::ostream& out, const std::vector<ScoredPair>& scores) {
  for (const auto& s : scores) {
    nlohmann::json j;
    j["pair_id"] = s.pair_id;
    j["m1"] = s.m1;
    j["m2"] = s.m2;
    j["p_f"] = s.score.p_f;
    j["p_c"] = s.score.p_c;
    j["s_bias"] = s.score.s_bias;
    j["y"] = s.score.y;
    j["alpha"] = s.score.alpha_infer;
    j["beta"] = s.score.beta;
    j["decision"] = s.score.decision;
    out << j.dump() << '\n';
  }
}

std::vector<ScoredPair> read_scores(std::istream& in) {
  std::vector<ScoredPair> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      ScoredPair s;
      s.pair_id = j.at("pair_id").get<std::string>();
      s.m1 = j.at("m1").get<std::string>();
      s.m2 = j.at("m2").get<std::string>();
      s.score.p_f = j.at("p_f").get<double>();
      s.score.p_c = j.value("p_c", 0.5);
      s.score.s_bias = j.value("s_bias", 0.5);
      s.score.y = j.at("y").get<double>();
      s.score.alpha_infer = j.value("alpha", 0.0);
      s.score.beta = j.value("beta", 0.0);
      s.score.decision = j.value("decision", s.score.y >= kDecisionThreshold);
      out.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return out;
}

}  // namespace acci
