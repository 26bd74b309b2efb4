// Blow-up coordinates of an isotropy chain, total and weak transforms of psi,
// and the checks attached to them.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "equivar/critical.hpp"

namespace equivar {

struct BlowupPoint {
  int chain = 0;
  std::vector<double> sigma;
  std::vector<double> tau;                 // delta_substitution(sigma)
  std::vector<double> x;                   // center parameters, all levels
  int rho = 0;                             // distinguished index of the normal sphere chart
  std::vector<double> qv;                  // c_N - 1 chart parameters of v~
  std::vector<std::vector<double>> alpha;  // per level, d_j coefficients
  std::vector<double> beta;                // e_N coefficients
  std::vector<double> p;                   // fiber coordinates over m
};

// tau from sigma: step j multiplies every coordinate except the j-th by the
// current j-th coordinate.
std::vector<double> delta_substitution(const std::vector<double>& sigma);
// Exponents (a_1..a_N) with |prod tau| = prod |sigma_j|^{a_j}.
std::vector<int> delta_monomial_exponents(int N);

// Unit vector of the rho-chart: e_rho + sum q_i e_i (i != rho), normalized.
template <class T> Vec<T> normal_sphere_point(const Vec<T>& qv, int rho, int c) {
  Vec<T> v(static_cast<std::size_t>(c), T(0.0));
  T n2(1.0);
  for (const auto& x : qv) n2 += x * x;
  const T inv = T(1.0) / sqrt(n2);
  int k = 0;
  for (int i = 0; i < c; ++i) v[i] = (i == rho) ? inv : qv[k++] * inv;
  return v;
}

template <class T>
struct WeakInputs {
  Vec<T> tau, x, qv;
  Vec<Vec<T>> alpha;
  Vec<T> beta, p;
  int rho = 0;
};

template <class T>
struct WeakEval {
  Vec<T> m;                 // chart point of the action
  Vec<T> X;                 // Lie algebra coefficients
  Vec<T> V;                 // psi_wk = p . V
  Vec<T> lambda_b_v;        // lambda(B) v~
  Vec<Vec<T>> E;            // spanning vectors of all E-distributions, at m
  Vec<Vec<T>> F;            // spanning vectors of F, at m
  T psi_wk{}, psi_tot{};
};

namespace detail {

template <class T> Vec<Dual<T>> lift(const Vec<T>& v) {
  Vec<Dual<T>> r;
  r.reserve(v.size());
  for (const auto& x : v) r.emplace_back(x, T(0.0));
  return r;
}

template <class T> Vec<T> combine(const Vec<Vec<T>>& basis, const Vec<T>& coeff, int d) {
  Vec<T> r(static_cast<std::size_t>(d), T(0.0));
  for (std::size_t k = 0; k < basis.size(); ++k)
    for (int i = 0; i < d; ++i) r[i] += coeff[k] * basis[k][i];
  return r;
}

}  // namespace detail

template <class T>
WeakEval<T> weak_eval(const GroupActionSpec& a, const IsotropyChain& ch, const WeakInputs<T>& in) {
  const int N = ch.depth(), n = a.n(), d = a.d();
  const auto& lv = ch.info().levels;
  const int cN = lv[N - 1].c;
  const Vec<T> vt = normal_sphere_point(in.qv, in.rho, cN);

  // Y[j] = m^{(j..N)}; Y[N] = v~, Y[0] = m
  Vec<Vec<T>> Y(static_cast<std::size_t>(N + 1)), arg(static_cast<std::size_t>(N));
  Y[N] = vt;
  for (int j = N - 1; j >= 0; --j) {
    arg[j] = Y[j + 1];
    for (auto& w : arg[j]) w = in.tau[j] * w;
    Y[j] = ch.exp<T>(j, in.x, arg[j]);
  }
  const Vec<Dual<T>> xd = detail::lift(in.x);
  auto push = [&](int k, Vec<T> w) {
    for (int j = k; j >= 0; --j) {
      Vec<Dual<T>> ad = detail::lift(arg[j]);
      for (std::size_t i = 0; i < ad.size(); ++i) ad[i].b = w[i];
      const Vec<Dual<T>> e = ch.exp<Dual<T>>(j, xd, ad);
      w.resize(e.size());
      for (std::size_t i = 0; i < e.size(); ++i) w[i] = e[i].b;
    }
    return w;
  };

  WeakEval<T> r;
  r.m = Y[0];
  r.X.assign(static_cast<std::size_t>(d), T(0.0));
  r.V.assign(static_cast<std::size_t>(n), T(0.0));
  for (int j = 0; j < N; ++j) {
    const Vec<Vec<T>> A = ch.a_basis<T>(j, in.x);
    T w(1.0);
    for (int r2 = j; r2 < N; ++r2) w = w * in.tau[r2];
    for (std::size_t k = 0; k < A.size(); ++k) {
      Vec<T> e;
      if (j == 0)
        e = fundamental_field_t<T>(a, ch.chart(), r.m, A[k]);
      else
        e = push(j - 1, ch.rep<T>(j - 1, in.x, A[k], Y[j]));
      for (int i = 0; i < n; ++i) r.V[i] += in.alpha[j][k] * e[i];
      for (int i = 0; i < d; ++i) r.X[i] += w * in.alpha[j][k] * A[k][i];
      r.E.push_back(std::move(e));
    }
  }
  const Vec<Vec<T>> B = ch.b_basis<T>(N - 1, in.x);
  r.lambda_b_v.assign(static_cast<std::size_t>(cN), T(0.0));
  for (std::size_t k = 0; k < B.size(); ++k) {
    const Vec<T> lb = ch.rep<T>(N - 1, in.x, B[k], vt);
    Vec<T> f = push(N - 1, lb);
    for (int i = 0; i < n; ++i) r.V[i] += in.beta[k] * f[i];
    for (int i = 0; i < d; ++i) r.X[i] += in.beta[k] * B[k][i];
    for (int i = 0; i < cN; ++i) r.lambda_b_v[i] += in.beta[k] * lb[i];
    r.F.push_back(std::move(f));
  }
  r.psi_wk = T(0.0);
  for (int i = 0; i < n; ++i) r.psi_wk += in.p[i] * r.V[i];
  r.psi_tot = phase_t<T>(a, ch.chart(), r.m, in.p, r.X);
  return r;
}

// The sigma = 0 form: frames at the centers instead of differentials of exp.
std::vector<double> weak_vector_at_center(const GroupActionSpec& a, const IsotropyChain& ch, const BlowupPoint& bp);

WeakInputs<double> weak_inputs(const BlowupPoint& bp);

struct ForwardImage {
  PhasePoint pt;  // chart point and fiber coordinates p, algebra coordinates X
};
ForwardImage blowup_forward(const GroupActionSpec& a, const BlowupPoint& bp);

struct WeakTransformReport {
  double psi_tot = 0.0, psi_wk = 0.0, factor = 0.0, factor_residual = 0.0;
  bool cond_I = false, cond_II = false, cond_III = false;
  int wk_hess_rank = -1;
  double min_nonzero_eig = 0.0;
  int kernel_dim = -1;
  double kernel_angle = -1.0;
  double block_residual = -1.0;  // deviation from the zero-diagonal / pairing block pattern
};

WeakTransformReport weak_transform_phase(const GroupActionSpec& a, const BlowupPoint& bp);

struct WeakConditions {
  bool I = false, II = false, III = false;
  bool all() const { return I && II && III; }
};
WeakConditions weak_critical_conditions(const GroupActionSpec& a, const BlowupPoint& bp, double tol = 1e-8);

// Gradient of psi_wk with respect to (alpha, beta, p).
VecX weak_gradient(const GroupActionSpec& a, const BlowupPoint& bp);

// Hessian of psi_wk in (alpha, beta, p) with (sigma, x, v~) frozen.
WeakTransformReport certify_weak_hessian(const GroupActionSpec& a, const BlowupPoint& bp);

struct AlphaChartResult {
  bool applicable = false;
  double min_grad = 0.0;
  int samples = 0;
};
// Samples t in [-box, box]^c; other variables in the unit box.
AlphaChartResult alpha_chart_noncritical(const GroupActionSpec& a, int chain, int samples, std::uint64_t seed,
                                         double box = 1.0);

struct JacobianPower {
  double tilde = 0.0;      // |det D zeta|
  double monomial = 0.0;   // prod |tau_j|^{exp_j}
  double phi = 0.0;        // tilde / monomial, NaN when the monomial vanishes
  std::vector<int> exponents;
};
JacobianPower jacobian_power(const GroupActionSpec& a, const BlowupPoint& bp);
std::vector<int> jacobian_exponents(const IsotropyChain& ch);

// kappa-consistency: rank of the union of E and F spanning sets.
int weak_span_rank(const GroupActionSpec& a, const BlowupPoint& bp);

// Random blow-up points.  kind: 0 = generic, 1 = weak-critical, 2 = weak-critical with sigma = 0.
BlowupPoint random_blowup_point(const GroupActionSpec& a, int chain, Rng& rng, int kind = 0);
// Move an existing point onto the weak critical set: alpha = 0, beta in the
// kernel of beta -> lambda(B) v~, p a random annihilator of E + F.
void project_to_weak_critical(const GroupActionSpec& a, BlowupPoint* bp, Rng& rng);

// Same point in a different rho-chart; returns the sign relating psi_wk values.
BlowupPoint change_sphere_chart(const GroupActionSpec& a, const BlowupPoint& bp, int rho, double* sign);

}  // namespace equivar
