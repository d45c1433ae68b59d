#pragma once

#include "gcnsamp/common.hpp"

namespace gcnsamp {

// (sum_i ||w_i||_2^4)^(1/4) over the columns w_i of W.
double norm_2_4(const Matrix& W);

struct RegularizerValue {
  double value = 0.0;
  Matrix grad_w;
  Matrix grad_v;
};

/// lambda_w ||sqrt(lambda_t) W||_{2,4}^4 + lambda_v ||sqrt(lambda_t) V||_F^2
///   = lambda_w lambda_t^2 ||W||_{2,4}^4 + lambda_v lambda_t ||V||_F^2
/// together with its gradient in W and V.
RegularizerValue regularizer(const Matrix& W, const Matrix& V, double lambda_t, double lambda_w, double lambda_v);

}  // namespace gcnsamp
