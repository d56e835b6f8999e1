#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "jargon/autograd.hpp"

namespace jargon::nn {

/// Linear warmup to the peak rate, then linear decay to zero.
struct LinearSchedule {
  double peak = 1e-5;
  std::size_t warmup_steps = 0;
  std::size_t total_steps = 1;

  double at(std::size_t step) const {
    if (warmup_steps > 0 && step < warmup_steps) {
      return peak * static_cast<double>(step + 1) / static_cast<double>(warmup_steps);
    }
    if (total_steps <= warmup_steps) return peak;
    const double remaining = static_cast<double>(total_steps - std::min(step, total_steps));
    return peak * remaining / static_cast<double>(total_steps - warmup_steps);
  }
};

/// Adam with decoupled weight decay. Decay applies only to parameters with
/// `decay == true`.
class AdamW {
 public:
  AdamW(std::vector<Parameter*> params, double weight_decay = 0.01, double beta1 = 0.9, double beta2 = 0.999,
        double eps = 1e-8)
      : params_(std::move(params)), wd_(weight_decay), b1_(beta1), b2_(beta2), eps_(eps) {
    for (auto* p : params_) {
      m_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
      v_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
    }
  }

  /// One update with learning rate `lr`; `grad_scale` multiplies every gradient.
  void step(const Gradients& grads, double lr, double grad_scale = 1.0) {
    ++t_;
    const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params_.size(); ++i) {
      Parameter& p = *params_[i];
      const Matrix* g = grads.find(p);
      if (p.decay && wd_ > 0.0) p.value *= (1.0 - lr * wd_);
      if (g == nullptr) continue;
      m_[i] = b1_ * m_[i] + (1.0 - b1_) * (*g * grad_scale);
      v_[i] = b2_ * v_[i] + (1.0 - b2_) * (*g * grad_scale).cwiseAbs2();
      p.value.array() -= lr * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + eps_);
    }
  }

  std::size_t steps() const { return t_; }

 private:
  std::vector<Parameter*> params_;
  std::vector<Matrix> m_, v_;
  double wd_, b1_, b2_, eps_;
  std::size_t t_ = 0;
};

}  // namespace jargon::nn
