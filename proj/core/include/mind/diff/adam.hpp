#pragma once

#include <vector>

#include "mind/diff/tape.hpp"

namespace mind::diff {

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Bias-corrected Adam over a fixed parameter list.
template <class T>
class Adam {
 public:
  Adam() = default;
  Adam(std::vector<Parameter<T>*> params, AdamConfig cfg = {});

  /// Applies one update from the accumulated grads and zeroes them.
  void step();
  void zero_grad();

  std::uint64_t steps() const { return t_; }
  const AdamConfig& config() const { return cfg_; }
  void set_lr(double lr) { cfg_.lr = lr; }
  const std::vector<Parameter<T>*>& params() const { return params_; }

 private:
  std::vector<Parameter<T>*> params_;
  std::vector<Matrix<T>> m_, v_;
  AdamConfig cfg_;
  std::uint64_t t_ = 0;
};

}  // namespace mind::diff
