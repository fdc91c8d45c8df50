#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rng.hpp"
#include "tape.hpp"

namespace sqa::nn {

using Vec = Eigen::VectorXd;

enum class Activation { None, Sigmoid, Softmax };

struct DenseParams {
  Mat W;  // out x in
  Mat b;  // out x 1
  Activation activation = Activation::None;

  void init(int in, int out, Activation act, Rng& rng);
  std::vector<Mat*> params() { return {&W, &b}; }
  std::vector<std::pair<std::string, Mat*>> named(const std::string& prefix) {
    return {{prefix + ".W", &W}, {prefix + ".b", &b}};
  }
};

// activation(Wx + b)
Vec dense_forward(const DenseParams& p, const Vec& x);

enum class DropoutMode { Train, Infer };

// Train mode zeroes components with probability `rate` and rescales the
// survivors by 1/(1-rate); infer mode is the identity. Throws for rate >= 1.
Vec dropout_apply(const Vec& x, double rate, DropoutMode mode, Rng& rng);

// Mask matrix usable as a tape constant: entries are 0 or 1/(1-rate).
Mat dropout_mask(Eigen::Index rows, double rate, Rng& rng);

}  // namespace sqa::nn
