#include "gcnsamp/regularizer.hpp"

#include <cmath>

namespace gcnsamp {

double norm_2_4(const Matrix& W) {
  double s = 0.0;
  for (Index j = 0; j < W.cols(); ++j) {
    const double sq = W.col(j).squaredNorm();
    s += sq * sq;
  }
  return std::sqrt(std::sqrt(s));
}

RegularizerValue regularizer(const Matrix& W, const Matrix& V, double lambda_t, double lambda_w, double lambda_v) {
  RegularizerValue r;
  const double wscale = lambda_w * lambda_t * lambda_t;
  r.grad_w.setZero(W.rows(), W.cols());
  double quartic = 0.0;
  for (Index j = 0; j < W.cols(); ++j) {
    const double sq = W.col(j).squaredNorm();
    quartic += sq * sq;
    r.grad_w.col(j) = (4.0 * wscale * sq) * W.col(j);
  }
  const double vscale = lambda_v * lambda_t;
  r.value = wscale * quartic + vscale * V.squaredNorm();
  r.grad_v = (2.0 * vscale) * V;
  return r;
}

}  // namespace gcnsamp
