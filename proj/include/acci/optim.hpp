#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace acci {

struct ParamRef {
  std::span<double> value;
  std::span<const double> grad;
  std::size_t group = 0;
  bool decay = true;
};

struct ParamGroup {
  double lr = 1e-4;
  double weight_decay = 0.01;
};

// Adam with decoupled weight decay. Moment buffers are matched to parameters
// by position, so every step must pass the same parameter list.
class AdamW {
 public:
  explicit AdamW(std::vector<ParamGroup> groups, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

  void step(std::span<const ParamRef> params);
  std::size_t steps() const { return t_; }
  const std::vector<ParamGroup>& groups() const { return groups_; }

 private:
  std::vector<ParamGroup> groups_;
  double beta1_, beta2_, eps_;
  std::size_t t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

}  // namespace acci
