#include "layers.hpp"

#include <stdexcept>

namespace sqa::nn {

void DenseParams::init(int in, int out, Activation act, Rng& rng) {
  if (out < 1) throw std::runtime_error("dense: output dim must be >= 1");
  W = Mat(out, in);
  b = Mat(out, 1);
  for (Eigen::Index i = 0; i < W.rows(); ++i)
    for (Eigen::Index j = 0; j < W.cols(); ++j) W(i, j) = rng.uniform(-kInitScale, kInitScale);
  for (Eigen::Index i = 0; i < b.rows(); ++i) b(i, 0) = rng.uniform(-kInitScale, kInitScale);
  activation = act;
}

Vec dense_forward(const DenseParams& p, const Vec& x) {
  if (x.size() != p.W.cols()) throw std::runtime_error("dense: shape mismatch");
  Vec z = p.W * x + p.b;
  switch (p.activation) {
    case Activation::None:
      return z;
    case Activation::Sigmoid:
      return (1.0 / (1.0 + (-z.array()).exp())).matrix();
    case Activation::Softmax: {
      Eigen::ArrayXd e = (z.array() - z.maxCoeff()).exp();
      return (e / e.sum()).matrix();
    }
  }
  throw std::runtime_error("dense: unknown activation");
}

Vec dropout_apply(const Vec& x, double rate, DropoutMode mode, Rng& rng) {
  if (rate < 0.0 || rate >= 1.0) throw std::runtime_error("dropout: rate must be in [0, 1)");
  if (mode == DropoutMode::Infer || rate == 0.0) return x;
  Vec out(x.size());
  double keep = 1.0 / (1.0 - rate);
  for (Eigen::Index i = 0; i < x.size(); ++i)
    out(i) = rng.bernoulli(rate) ? 0.0 : x(i) * keep;
  return out;
}

Mat dropout_mask(Eigen::Index rows, double rate, Rng& rng) {
  if (rate < 0.0 || rate >= 1.0) throw std::runtime_error("dropout: rate must be in [0, 1)");
  Mat m(rows, 1);
  double keep = 1.0 / (1.0 - rate);
  for (Eigen::Index i = 0; i < rows; ++i) m(i, 0) = rng.bernoulli(rate) ? 0.0 : keep;
  return m;
}

}  // namespace sqa::nn
