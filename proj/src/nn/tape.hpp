#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

namespace sqa::nn {

using Mat = Eigen::MatrixXd;

// Dynamic reverse-mode tape over dense matrices. Each forward op appends a
// node; backward() walks the tape in reverse accumulating gradients.
// Parameters are registered once per tape via param(); their gradients are
// read back with grad().
class Tape {
 public:
  int input(Mat v) { return push(std::move(v), {}); }

  int param(Mat* p) {
    auto it = params_.find(p);
    if (it != params_.end()) return it->second;
    int id = push(*p, {});
    params_[p] = id;
    return id;
  }

  int matmul(int a, int b) {
    check_cols_rows(a, b);
    int id = push(val(a) * val(b), {a, b});
    node(id).back = [this, id, a, b]() {
      node(a).grad += node(id).grad * val(b).transpose();
      node(b).grad += val(a).transpose() * node(id).grad;
    };
    return id;
  }

  int add(int a, int b) {
    check_same_shape(a, b);
    int id = push(val(a) + val(b), {a, b});
    node(id).back = [this, id, a, b]() {
      node(a).grad += node(id).grad;
      node(b).grad += node(id).grad;
    };
    return id;
  }

  int cmul(int a, int b) {
    check_same_shape(a, b);
    int id = push(val(a).cwiseProduct(val(b)), {a, b});
    node(id).back = [this, id, a, b]() {
      node(a).grad += node(id).grad.cwiseProduct(val(b));
      node(b).grad += node(id).grad.cwiseProduct(val(a));
    };
    return id;
  }

  // scale * A + shift (elementwise)
  int affine(int a, double scale, double shift) {
    int id = push((scale * val(a)).array() + shift, {a});
    node(id).back = [this, id, a, scale]() { node(a).grad += scale * node(id).grad; };
    return id;
  }

  int sigmoid(int a) {
    Mat y = (1.0 / (1.0 + (-val(a).array()).exp())).matrix();
    int id = push(std::move(y), {a});
    node(id).back = [this, id, a]() {
      const Mat& y = val(id);
      node(a).grad += node(id).grad.cwiseProduct(
          (y.array() * (1.0 - y.array())).matrix());
    };
    return id;
  }

  int tanh(int a) {
    int id = push(val(a).array().tanh().matrix(), {a});
    node(id).back = [this, id, a]() {
      const Mat& y = val(id);
      node(a).grad += node(id).grad.cwiseProduct((1.0 - y.array().square()).matrix());
    };
    return id;
  }

  int vconcat(int a, int b) {
    if (val(a).cols() != val(b).cols()) throw std::runtime_error("vconcat: column mismatch");
    Mat v(val(a).rows() + val(b).rows(), val(a).cols());
    v << val(a), val(b);
    int id = push(std::move(v), {a, b});
    node(id).back = [this, id, a, b]() {
      auto ra = val(a).rows();
      node(a).grad += node(id).grad.topRows(ra);
      node(b).grad += node(id).grad.bottomRows(val(b).rows());
    };
    return id;
  }

  // Column vector holding row `row` of `table`.
  int row_lookup(int table, Eigen::Index row) {
    if (row < 0 || row >= val(table).rows()) throw std::runtime_error("row_lookup: out of range");
    int id = push(val(table).row(row).transpose(), {table});
    node(id).back = [this, id, table, row]() {
      node(table).grad.row(row) += node(id).grad.transpose();
    };
    return id;
  }

  // Cross-entropy of softmax(logits) against a target class; 1x1 output.
  int softmax_xent(int logits, Eigen::Index target) {
    const Mat& z = val(logits);
    if (z.cols() != 1 || target < 0 || target >= z.rows())
      throw std::runtime_error("softmax_xent: bad logits/target");
    double zmax = z.maxCoeff();
    double lse = zmax + std::log((z.array() - zmax).exp().sum());
    Mat loss(1, 1);
    loss(0, 0) = lse - z(target, 0);
    int id = push(std::move(loss), {logits});
    node(id).back = [this, id, logits, target, lse]() {
      const Mat& z = val(logits);
      Mat soft = (z.array() - lse).exp().matrix();
      soft(target, 0) -= 1.0;
      node(logits).grad += node(id).grad(0, 0) * soft;
    };
    return id;
  }

  // Binary cross-entropy of sigmoid(logit) against target in {0,1}; stable
  // softplus form, 1x1 in and out.
  int bce_logit(int logit, double target) {
    const Mat& z = val(logit);
    if (z.rows() != 1 || z.cols() != 1) throw std::runtime_error("bce_logit: scalar expected");
    double x = z(0, 0);
    double softplus = std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
    Mat loss(1, 1);
    loss(0, 0) = softplus - target * x;
    int id = push(std::move(loss), {logit});
    node(id).back = [this, id, logit, target]() {
      double x = val(logit)(0, 0);
      double sig = 1.0 / (1.0 + std::exp(-x));
      node(logit).grad(0, 0) += node(id).grad(0, 0) * (sig - target);
    };
    return id;
  }

  const Mat& val(int id) const { return nodes_[static_cast<std::size_t>(id)].value; }
  const Mat& grad_of(int id) const { return nodes_[static_cast<std::size_t>(id)].grad; }

  // Seeds the (1x1) loss gradient with 1 and runs the tape backwards.
  void backward(int loss) {
    auto& l = node(loss);
    if (l.value.rows() != 1 || l.value.cols() != 1)
      throw std::runtime_error("backward: loss must be scalar");
    l.grad(0, 0) = 1.0;
    for (int id = loss; id >= 0; --id) {
      auto& n = nodes_[static_cast<std::size_t>(id)];
      if (n.back) n.back();
    }
  }

  Mat grad(Mat* p) const {
    auto it = params_.find(p);
    if (it == params_.end()) throw std::runtime_error("grad: unregistered parameter");
    return nodes_[static_cast<std::size_t>(it->second)].grad;
  }

  bool has_param(Mat* p) const { return params_.count(p) != 0; }

 private:
  struct Node {
    Mat value;
    Mat grad;
    std::function<void()> back;
  };

  Node& node(int id) { return nodes_[static_cast<std::size_t>(id)]; }

  int push(Mat v, std::initializer_list<int>) {
    Node n;
    n.grad = Mat::Zero(v.rows(), v.cols());
    n.value = std::move(v);
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }

  void check_same_shape(int a, int b) const {
    if (val(a).rows() != val(b).rows() || val(a).cols() != val(b).cols())
      throw std::runtime_error("shape mismatch");
  }
  void check_cols_rows(int a, int b) const {
    if (val(a).cols() != val(b).rows()) throw std::runtime_error("shape mismatch");
  }

  std::vector<Node> nodes_;
  std::map<Mat*, int> params_;
};

}  // namespace sqa::nn
