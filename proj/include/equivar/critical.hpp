// Critical set of psi on the principal stratum.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "equivar/geometry.hpp"
#include "equivar/tmath.hpp"

namespace equivar {

struct PhaseGradient {
  VecX dq, dp, ds;
  double norm() const;
};
PhaseGradient phase_gradient(const GroupActionSpec& a, const PhasePoint& pt);

// (J_{X_1}(eta), ..., J_{X_d}(eta))
std::vector<double> omega_residual(const GroupActionSpec& a, int chart, const std::vector<double>& q,
                                   const std::vector<double>& p);

// Gram-orthonormal basis of the isotropy algebra at q, as columns of a d x e matrix.
Mat isotropy_algebra(const GroupActionSpec& a, int chart, const std::vector<double>& q, double tol = kRankTol);

struct CriticalSample {
  PhasePoint pt;
  double psi = 0.0;
  double grad_norm = 0.0;
  Mat hess;
  Mat normal_basis;   // columns
  Mat kernel_basis;   // columns
  Mat trans_hess;
  int rank = 0;
  int signature = 0;
  int kernel_dim = 0;
  double tangent_angle = 0.0;  // largest principal angle between ker(hess) and T Reg Crit
  std::string stratum;
};

CriticalSample certify_regular_critical(const GroupActionSpec& a, const PhasePoint& pt, double tol = 1e-10);

// Analytic parametrization of Reg Crit over a principal chart:
// (q, c, b) -> (q, sum c_k alpha_k(q), sum b_j iota_j(q)) where alpha is the
// annihilator of the orbit tangent, orthonormal for g^{-1}, and iota spans the
// isotropy algebra, orthonormal for the Gram matrix.
template <class T>
void regular_crit_frames(const GroupActionSpec& a, int chart, const Vec<T>& q, Vec<Vec<T>>* ann, Vec<Vec<T>>* iso) {
  const int n = a.n(), d = a.d();
  const Vec<T> g = a.metric<T>(chart, q);
  *ann = tmath::mgs(a.annihilator<T>(chart, q), tmath::inverse(g, n));
  Vec<T> gram(static_cast<std::size_t>(d * d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) gram[i * d + j] = T(a.info().gram(i, j));
  *iso = tmath::mgs(a.isotropy<T>(chart, q), gram);
}

template <class T>
Vec<T> regular_crit_param(const GroupActionSpec& a, int chart, const Vec<T>& q, const Vec<T>& c, const Vec<T>& b) {
  const int n = a.n(), d = a.d();
  Vec<Vec<T>> ann, iso;
  regular_crit_frames(a, chart, q, &ann, &iso);
  Vec<T> z(q);
  for (int i = 0; i < n; ++i) {
    T v(0.0);
    for (std::size_t k = 0; k < ann.size(); ++k) v += c[k] * ann[k][i];
    z.push_back(v);
  }
  for (int i = 0; i < d; ++i) {
    T v(0.0);
    for (std::size_t k = 0; k < iso.size(); ++k) v += b[k] * iso[k][i];
    z.push_back(v);
  }
  return z;
}

// Coordinates (c, b) of a point of Reg Crit in the parametrization above.
void regular_crit_coords(const GroupActionSpec& a, const PhasePoint& pt, std::vector<double>* c,
                         std::vector<double>* b);

// Jacobian of regular_crit_param at the point: (2n+d) x (n + (n-kappa) + e).
Mat regular_crit_tangent(const GroupActionSpec& a, const PhasePoint& pt);

struct SampleBox {
  double fiber_radius = 2.0;
  double algebra_radius = 1.0;
};

std::vector<CriticalSample> sample_regular_critical(const GroupActionSpec& a, int count, std::uint64_t seed,
                                                    SampleBox box = {});

// Unchecked construction of the sample points (used by the sampler and tests).
std::vector<PhasePoint> regular_critical_points(const GroupActionSpec& a, int count, std::uint64_t seed,
                                                SampleBox box = {});

}  // namespace equivar
