#pragma once

#include <Eigen/Dense>
#include <vector>

namespace equivar {

using Mat = Eigen::MatrixXd;
using VecX = Eigen::VectorXd;

inline constexpr double kRankTol = 1e-8;

// Singular values below rel_tol * sigma_max count as zero.
int numerical_rank(const Mat& a, double rel_tol = kRankTol);

// Orthonormal (Euclidean) basis of ker(a), as columns.
Mat nullspace(const Mat& a, double rel_tol = kRankTol);

// Orthonormal basis of the column span.
Mat column_basis(const Mat& a, double rel_tol = kRankTol);

// Largest principal angle between two column spans of equal dimension.
double max_principal_angle(const Mat& a, const Mat& b);

// Modified Gram-Schmidt on the columns of a in the inner product <x, y> = x^T G y.
Mat mgs(const Mat& a, const Mat& gram);

struct SymEigen {
  VecX values;   // ascending
  Mat vectors;   // columns
};
SymEigen sym_eigen(const Mat& h);

}  // namespace equivar
