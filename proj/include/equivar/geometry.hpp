// Charts, cotangent coordinates, fundamental fields and the moment-map phase.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "equivar/catalogue.hpp"
#include "equivar/random.hpp"

namespace equivar {

// (eta, X) in chart coordinates: eta = sum p_i dq_i over q, X = sum s_i X_i.
struct PhasePoint {
  int chart = 0;
  std::vector<double> q, p, s;
};

template <class T>
Vec<T> fundamental_field_t(const GroupActionSpec& a, int chart, const Vec<T>& q, const Vec<T>& s) {
  Vec<T> v(static_cast<std::size_t>(a.n()), T(0.0));
  for (int i = 0; i < a.d(); ++i) {
    if (value_of(s[i]) == 0.0 && std::is_same_v<T, double>) continue;
    const Vec<T> f = a.basis_field<T>(chart, q, i);
    for (int k = 0; k < a.n(); ++k) v[k] += s[i] * f[k];
  }
  return v;
}

template <class T>
T phase_t(const GroupActionSpec& a, int chart, const Vec<T>& q, const Vec<T>& p, const Vec<T>& s) {
  const Vec<T> v = fundamental_field_t<T>(a, chart, q, s);
  T r(0.0);
  for (int k = 0; k < a.n(); ++k) r += p[k] * v[k];
  return r;
}

std::vector<double> fundamental_field(const GroupActionSpec& a, int chart, const std::vector<double>& q,
                                      const std::vector<double>& s);
double phase(const GroupActionSpec& a, const PhasePoint& pt);

// n x d matrix [X~_1 ... X~_d] at q
Mat field_matrix(const GroupActionSpec& a, int chart, const std::vector<double>& q);
Mat metric_matrix(const GroupActionSpec& a, int chart, const std::vector<double>& q);

enum class DensityKind { kCanonical, kBase, kOrthonormalFiber };
// kCanonical: weight of dq dp (identically 1).  kBase: sqrt det g of the base
// measure.  kOrthonormalFiber: weight of dq dp^ when p = L p^, g = L L^T.
double liouville_density(const GroupActionSpec& a, int chart, const std::vector<double>& q,
                         DensityKind kind = DensityKind::kCanonical);

struct GradHess {
  VecX grad;
  Mat hess;
  double value = 0.0;
};
using JetFunction = std::function<Jet(const std::vector<Jet>&)>;
GradHess dual_hessian(const JetFunction& f, const std::vector<double>& u);

// Gradient and Hessian of psi in the ordering (q, p, s).
GradHess phase_derivatives(const GroupActionSpec& a, const PhasePoint& pt);

// Ambient Jacobian of the embedding (ambient x n).
Mat embed_jacobian(const GroupActionSpec& a, int chart, const std::vector<double>& q);

// Covector components p at q -> ambient vector eta^sharp.
std::vector<double> covector_to_ambient(const GroupActionSpec& a, int chart, const std::vector<double>& q,
                                        const std::vector<double>& p);

// (ambient point, ambient tangent) -> (q, p) in the target chart.
PhasePoint ambient_to_chart(const GroupActionSpec& a, int chart, const std::vector<double>& x,
                            const std::vector<double>& xi, const std::vector<double>& s);

// Re-express a phase point in another chart.
PhasePoint change_chart(const GroupActionSpec& a, const PhasePoint& pt, int target);

// |p - p0 theta|_g
double fiber_norm(const GroupActionSpec& a, int chart, const std::vector<double>& q, const std::vector<double>& p,
                  double p0 = 0.0);

// Amplitude pieces.  a = base(q) * fiber(q, p) * algebra(s).
double amplitude_base(const AmplitudeSpec& amp, const GroupActionSpec& a, int chart, const std::vector<double>& q);
double amplitude_fiber(const AmplitudeSpec& amp, const GroupActionSpec& a, int chart, const std::vector<double>& q,
                       const std::vector<double>& p);
double amplitude_algebra(const AmplitudeSpec& amp, const std::vector<double>& s);
double amplitude(const AmplitudeSpec& amp, const GroupActionSpec& a, const PhasePoint& pt);

// Uniform point of the chart box, kept margin away from non-periodic edges and disk rims.
std::vector<double> random_chart_point(const GroupActionSpec& a, int chart, Rng& rng, double margin = 0.1);

// sqrt det of the Gram matrix: dX = w ds
double algebra_volume(const GroupActionSpec& a);

}  // namespace equivar
