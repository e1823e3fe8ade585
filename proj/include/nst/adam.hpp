#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace nst {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam over a fixed sequence of parameter tensors. Call begin_step() once per
// update, then update() for each tensor in the same order every time.
class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}

  void begin_step() {
    ++t_;
    slot_ = 0;
  }

  template <typename Param, typename Grad>
  void update(Param&& param, const Grad& grad) {
    if (slot_ == first_.size()) {
      first_.emplace_back(Eigen::VectorXd::Zero(param.size()));
      second_.emplace_back(Eigen::VectorXd::Zero(param.size()));
    }
    Eigen::VectorXd& m = first_[slot_];
    Eigen::VectorXd& v = second_[slot_];
    ++slot_;
    const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
    for (Eigen::Index i = 0; i < param.size(); ++i) {
      const double g = grad.data()[i];
      m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g;
      v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g * g;
      param.data()[i] -= config_.lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + config_.epsilon);
    }
  }

  long steps() const { return t_; }
  void set_lr(double lr) { config_.lr = lr; }

 private:
  AdamConfig config_;
  long t_ = 0;
  std::size_t slot_ = 0;
  std::vector<Eigen::VectorXd> first_;
  std::vector<Eigen::VectorXd> second_;
};

}  // namespace nst
