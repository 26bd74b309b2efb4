#include "equivar/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace equivar {

int numerical_rank(const Mat& a, double rel_tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(a);
  const VecX& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > rel_tol * sv(0)) ++r;
  return r;
}

Mat nullspace(const Mat& a, double rel_tol) {
  const int cols = int(a.cols());
  if (a.rows() == 0) return Mat::Identity(cols, cols);
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
  const VecX& sv = svd.singularValues();
  int r = 0;
  if (sv.size() > 0 && sv(0) > 0.0)
    for (int i = 0; i < sv.size(); ++i)
      if (sv(i) > rel_tol * sv(0)) ++r;
  return svd.matrixV().rightCols(cols - r);
}

Mat column_basis(const Mat& a, double rel_tol) {
  if (a.cols() == 0) return Mat(a.rows(), 0);
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU);
  const VecX& sv = svd.singularValues();
  int r = 0;
  if (sv.size() > 0 && sv(0) > 0.0)
    for (int i = 0; i < sv.size(); ++i)
      if (sv(i) > rel_tol * sv(0)) ++r;
  return svd.matrixU().leftCols(r);
}

double max_principal_angle(const Mat& a, const Mat& b) {
  if (a.cols() != b.cols()) return M_PI / 2;
  if (a.cols() == 0) return 0.0;
  Mat qa = column_basis(a, 1e-12), qb = column_basis(b, 1e-12);
  if (qa.cols() != qb.cols()) return M_PI / 2;
  Eigen::JacobiSVD<Mat> svd(qa.transpose() * qb);
  const double smin = std::clamp(svd.singularValues().minCoeff(), -1.0, 1.0);
  // acos loses accuracy near 1; use the sine of the angle from the residual instead.
  Mat resid = qb - qa * (qa.transpose() * qb);
  Eigen::JacobiSVD<Mat> rs(resid);
  const double smax = std::min(1.0, rs.singularValues().maxCoeff());
  return smin > 0.7 ? std::asin(smax) : std::acos(smin);
}

Mat mgs(const Mat& a, const Mat& gram) {
  Mat q = a;
  for (int i = 0; i < q.cols(); ++i) {
    for (int j = 0; j < i; ++j) {
      const double c = q.col(j).dot(gram * q.col(i));
      q.col(i) -= c * q.col(j);
    }
    const double nrm = std::sqrt(q.col(i).dot(gram * q.col(i)));
    q.col(i) /= nrm;
  }
  return q;
}

SymEigen sym_eigen(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  return {es.eigenvalues(), es.eigenvectors()};
}

}  // namespace equivar
