#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tape.hpp"

namespace sqa::nn {

// Adam with bias correction. One instance per model; tensors must be passed
// in the same order every step.
class Adam {
 public:
  explicit Adam(double lr = 1e-3, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(const std::vector<Mat*>& params, const std::vector<Mat>& grads) {
    if (params.size() != grads.size()) throw std::runtime_error("adam: size mismatch");
    if (m_.empty()) {
      for (const Mat* p : params) {
        m_.push_back(Mat::Zero(p->rows(), p->cols()));
        v_.push_back(Mat::Zero(p->rows(), p->cols()));
      }
    }
    if (m_.size() != params.size()) throw std::runtime_error("adam: parameter set changed");
    ++t_;
    double bc1 = 1.0 - std::pow(beta1_, t_);
    double bc2 = 1.0 - std::pow(beta2_, t_);
    for (std::size_t i = 0; i < params.size(); ++i) {
      Mat& p = *params[i];
      const Mat& g = grads[i];
      if (g.rows() != p.rows() || g.cols() != p.cols())
        throw std::runtime_error("adam: shape mismatch");
      m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
      v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g.cwiseProduct(g);
      Mat mhat = m_[i] / bc1;
      Mat vhat = v_[i] / bc2;
      p.array() -= lr_ * mhat.array() / (vhat.array().sqrt() + eps_);
    }
  }

  int steps_taken() const { return t_; }
  double learning_rate() const { return lr_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  int t_ = 0;
  std::vector<Mat> m_, v_;
};

}  // namespace sqa::nn
