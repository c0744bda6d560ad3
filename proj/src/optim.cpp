#include "acci/optim.hpp"

#include <cmath>

#include "acci/error.hpp"

namespace acci {

AdamW::AdamW(std::vector<ParamGroup> groups, double beta1, double beta2, double eps)
    : groups_(std::move(groups)), beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (const auto& g : groups_)
    if (!(g.lr > 0.0) || !(g.weight_decay >= 0.0)) throw ConfigError("learning rates must be > 0 and decay >= 0");
}

void AdamW::step(std::span<const ParamRef> params) {
  if (m_.empty()) {
    for (const auto& p : params) {
      m_.emplace_back(p.value.size(), 0.0);
      v_.emplace_back(p.value.size(), 0.0);
    }
  }
  if (m_.size() != params.size()) throw ContractError("optimizer parameter list changed between steps");
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    const ParamRef& p = params[k];
    if (p.group >= groups_.size()) throw ContractError("unknown parameter group");
    if (p.grad.size() != p.value.size() || m_[k].size() != p.value.size())
      throw ContractError("parameter and gradient sizes differ");
    const ParamGroup& g = groups_[p.group];
    auto& m = m_[k];
    auto& v = v_[k];
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double gi = p.grad[i];
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * gi;
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * gi * gi;
      if (p.decay) p.value[i] -= g.lr * g.weight_decay * p.value[i];
      p.value[i] -= g.lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
    }
  }
}

}  // namespace acci
