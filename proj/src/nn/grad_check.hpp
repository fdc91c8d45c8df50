#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "tape.hpp"

namespace sqa::nn {

// Central finite differences against analytic gradients. `loss` must be a
// pure deterministic function of the current parameter values. Returns the
// worst relative error over every parameter entry.
inline double grad_check(const std::function<double()>& loss, const std::vector<Mat*>& params,
                         const std::vector<Mat>& analytic, double epsilon = 1e-5) {
  double worst = 0.0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    Mat& p = *params[k];
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      for (Eigen::Index j = 0; j < p.cols(); ++j) {
        double saved = p(i, j);
        p(i, j) = saved + epsilon;
        double up = loss();
        p(i, j) = saved - epsilon;
        double down = loss();
        p(i, j) = saved;
        double numeric = (up - down) / (2.0 * epsilon);
        double a = analytic[k](i, j);
        double denom = std::max({std::abs(a), std::abs(numeric), 1e-3});
        worst = std::max(worst, std::abs(a - numeric) / denom);
      }
    }
  }
  return worst;
}

}  // namespace sqa::nn
