#include "dfh/linalg.hpp"

#include "dfh/errors.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace dfh::linalg {

namespace {

Vector singular_values(const Matrix& a) {
  if (a.size() == 0) return Vector();
  return Eigen::JacobiSVD<Matrix>(a).singularValues();
}

}  // namespace

bool is_finite(const Matrix& a) { return a.allFinite(); }

Matrix pseudoinverse(const Matrix& a, const NumericSettings& settings) {
  if (a.size() == 0) throw std::invalid_argument("pseudoinverse: empty matrix");
  if (!is_finite(a)) throw std::invalid_argument("pseudoinverse: non-finite entry");

  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  const double cutoff = settings.pinv_cutoff_factor *
                        static_cast<double>(std::max(a.rows(), a.cols())) *
                        std::numeric_limits<double>::epsilon() * sigma[0];

  Vector inv_sigma = Vector::Zero(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma[i] > cutoff) inv_sigma[i] = 1.0 / sigma[i];
  }
  return svd.matrixV() * inv_sigma.asDiagonal() * svd.matrixU().transpose();
}

double spectral_norm(const Matrix& a) {
  const Vector sigma = singular_values(a);
  return sigma.size() == 0 ? 0.0 : sigma[0];
}

double frobenius_norm(const Matrix& a) { return a.norm(); }

std::size_t rank(const Matrix& a, double tol) {
  const Vector sigma = singular_values(a);
  if (sigma.size() == 0 || sigma[0] == 0.0) return 0;
  const double cutoff = tol * sigma[0];
  return static_cast<std::size_t>((sigma.array() > cutoff).count());
}

Matrix solve(const Matrix& a, const Matrix& b, const NumericSettings& settings) {
  if (a.rows() != a.cols()) throw std::invalid_argument("solve: matrix is not square");
  if (a.rows() != b.rows()) throw std::invalid_argument("solve: right-hand side has wrong row count");
  if (rank(a, settings.rank_rel_tol) < static_cast<std::size_t>(a.rows())) {
    throw SingularMatrixError("solve: matrix is singular to working precision");
  }
  return a.fullPivLu().solve(b);
}

}  // namespace dfh::linalg
