#include "equivar/geometry.hpp"

#include <cmath>

namespace equivar {

std::vector<double> fundamental_field(const GroupActionSpec& a, int chart, const std::vector<double>& q,
                                      const std::vector<double>& s) {
  a.check_domain(chart, q);
  if (int(s.size()) != a.d()) throw DomainError("algebra coordinate count mismatch");
  return fundamental_field_t<double>(a, chart, q, s);
}

double phase(const GroupActionSpec& a, const PhasePoint& pt) {
  a.check_domain(pt.chart, pt.q);
  return phase_t<double>(a, pt.chart, pt.q, pt.p, pt.s);
}

Mat field_matrix(const GroupActionSpec& a, int chart, const std::vector<double>& q) {
  Mat m(a.n(), a.d());
  for (int i = 0; i < a.d(); ++i) {
    const auto f = a.basis_field<double>(chart, q, i);
    for (int k = 0; k < a.n(); ++k) m(k, i) = f[k];
  }
  return m;
}

Mat metric_matrix(const GroupActionSpec& a, int chart, const std::vector<double>& q) {
  const auto g = a.metric<double>(chart, q);
  const int n = a.n();
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = g[i * n + j];
  return m;
}

double liouville_density(const GroupActionSpec& a, int chart, const std::vector<double>& q, DensityKind kind) {
  a.check_domain(chart, q);
  if (kind == DensityKind::kCanonical) return 1.0;
  return std::sqrt(metric_matrix(a, chart, q).determinant());
}

GradHess dual_hessian(const JetFunction& f, const std::vector<double>& u) {
  const int k = int(u.size());
  if (k > kMaxJetVars) throw DomainError("too many variables for jet arithmetic");
  std::vector<Jet> x(k);
  for (int i = 0; i < k; ++i) x[i] = Jet::variable(u[i], i, k);
  const Jet r = f(x);
  GradHess out;
  out.value = r.v;
  out.grad.resize(k);
  out.hess.resize(k, k);
  for (int i = 0; i < k; ++i) {
    out.grad(i) = i < r.n ? r.g[i] : 0.0;
    for (int j = 0; j < k; ++j) out.hess(i, j) = (i < r.n && j < r.n) ? r.h[hidx(i, j)] : 0.0;
  }
  return out;
}

GradHess phase_derivatives(const GroupActionSpec& a, const PhasePoint& pt) {
  a.check_domain(pt.chart, pt.q);
  const int n = a.n(), d = a.d();
  std::vector<double> u;
  u.insert(u.end(), pt.q.begin(), pt.q.end());
  u.insert(u.end(), pt.p.begin(), pt.p.end());
  u.insert(u.end(), pt.s.begin(), pt.s.end());
  const int chart = pt.chart;
  return dual_hessian(
      [&](const std::vector<Jet>& x) {
        Vec<Jet> q(x.begin(), x.begin() + n), p(x.begin() + n, x.begin() + 2 * n), s(x.begin() + 2 * n, x.begin() + 2 * n + d);
        return phase_t<Jet>(a, chart, q, p, s);
      },
      u);
}

Mat embed_jacobian(const GroupActionSpec& a, int chart, const std::vector<double>& q) {
  const int n = a.n(), k = a.info().ambient;
  Mat j(k, n);
  for (int c = 0; c < n; ++c) {
    Vec<Dual<double>> qd(n);
    for (int i = 0; i < n; ++i) qd[i] = Dual<double>(q[i], i == c ? 1.0 : 0.0);
    const auto e = a.embed<Dual<double>>(chart, qd);
    for (int r = 0; r < k; ++r) j(r, c) = e[r].b;
  }
  return j;
}

std::vector<double> covector_to_ambient(const GroupActionSpec& a, int chart, const std::vector<double>& q,
                                        const std::vector<double>& p) {
  const Mat g = metric_matrix(a, chart, q);
  VecX pv = Eigen::Map<const VecX>(p.data(), long(p.size()));
  const VecX v = g.ldlt().solve(pv);
  const VecX x = embed_jacobian(a, chart, q) * v;
  return std::vector<double>(x.data(), x.data() + x.size());
}

PhasePoint ambient_to_chart(const GroupActionSpec& a, int chart, const std::vector<double>& x,
                            const std::vector<double>& xi, const std::vector<double>& s) {
  PhasePoint out;
  out.chart = chart;
  out.q = a.chart_from_embed(chart, x);
  const Mat j = embed_jacobian(a, chart, out.q);
  VecX xv = Eigen::Map<const VecX>(xi.data(), long(xi.size()));
  const VecX p = j.transpose() * xv;  // eta(d/dq_i) = <eta^sharp, dE/dq_i>
  out.p.assign(p.data(), p.data() + p.size());
  out.s = s;
  return out;
}

PhasePoint change_chart(const GroupActionSpec& a, const PhasePoint& pt, int target) {
  const auto x = a.embed<double>(pt.chart, pt.q);
  const auto xi = covector_to_ambient(a, pt.chart, pt.q, pt.p);
  PhasePoint out = ambient_to_chart(a, target, x, xi, pt.s);
  a.check_domain(target, out.q);
  return out;
}

double fiber_norm(const GroupActionSpec& a, int chart, const std::vector<double>& q, const std::vector<double>& p,
                  double p0) {
  const int n = a.n();
  VecX pv = Eigen::Map<const VecX>(p.data(), n);
  if (p0 != 0.0) {
    const auto th = a.fiber_form<double>(chart, q);
    for (int i = 0; i < n; ++i) pv(i) -= p0 * th[i];
  }
  const Mat g = metric_matrix(a, chart, q);
  return std::sqrt(std::max(0.0, pv.dot(g.ldlt().solve(pv))));
}

double bump(double t) {
  const double t2 = t * t;
  if (t2 >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t2));
}

double smooth_step(double t) {
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / (1.0 - t)), b = std::exp(-1.0 / t);
  return a / (a + b);
}

double amplitude_base(const AmplitudeSpec& amp, const GroupActionSpec& a, int chart, const std::vector<double>& q) {
  if (amp.zero) return 0.0;
  const auto x = a.embed<double>(chart, q);
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d2 += (x[i] - amp.q0[i]) * (x[i] - amp.q0[i]);
  return amp.scale * bump(std::sqrt(d2) / amp.r_q);
}

double amplitude_fiber(const AmplitudeSpec& amp, const GroupActionSpec& a, int chart, const std::vector<double>& q,
                       const std::vector<double>& p) {
  if (amp.zero) return 0.0;
  return bump(fiber_norm(a, chart, q, p, amp.p0) / amp.R);
}

double amplitude_algebra(const AmplitudeSpec& amp, const std::vector<double>& s) {
  if (amp.zero) return 0.0;
  double d2 = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) d2 += (s[i] - amp.s0[i]) * (s[i] - amp.s0[i]);
  return bump(std::sqrt(d2) / amp.R_s);
}

double amplitude(const AmplitudeSpec& amp, const GroupActionSpec& a, const PhasePoint& pt) {
  if (amp.zero) return 0.0;
  const double b = amplitude_base(amp, a, pt.chart, pt.q);
  if (b == 0.0) return 0.0;
  const double s = amplitude_algebra(amp, pt.s);
  if (s == 0.0) return 0.0;
  return b * s * amplitude_fiber(amp, a, pt.chart, pt.q, pt.p);
}

std::vector<double> random_chart_point(const GroupActionSpec& a, int chart, Rng& rng, double margin) {
  const ChartInfo& ch = a.chart(chart);
  for (;;) {
    std::vector<double> q(static_cast<std::size_t>(ch.dim));
    for (int i = 0; i < ch.dim; ++i)
      q[i] = ch.periodic[i] ? rng.uniform(ch.lo[i], ch.hi[i]) : rng.uniform(ch.lo[i] + margin, ch.hi[i] - margin);
    bool ok = true;
    for (int f : ch.disk_first)
      if (std::hypot(q[f], q[f + 1]) >= ch.disk_radius - margin) ok = false;
    if (ok) return q;
  }
}

double algebra_volume(const GroupActionSpec& a) { return std::sqrt(a.info().gram.determinant()); }

}  // namespace equivar
