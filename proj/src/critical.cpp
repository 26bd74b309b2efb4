#include "equivar/critical.hpp"

#include <cmath>

namespace equivar {

double PhaseGradient::norm() const {
  return std::sqrt(dq.squaredNorm() + dp.squaredNorm() + ds.squaredNorm());
}

PhaseGradient phase_gradient(const GroupActionSpec& a, const PhasePoint& pt) {
  const GradHess gh = phase_derivatives(a, pt);
  const int n = a.n(), d = a.d();
  return {gh.grad.segment(0, n), gh.grad.segment(n, n), gh.grad.segment(2 * n, d)};
}

std::vector<double> omega_residual(const GroupActionSpec& a, int chart, const std::vector<double>& q,
                                   const std::vector<double>& p) {
  a.check_domain(chart, q);
  const Mat m = field_matrix(a, chart, q);
  const VecX j = m.transpose() * Eigen::Map<const VecX>(p.data(), a.n());
  return std::vector<double>(j.data(), j.data() + j.size());
}

Mat isotropy_algebra(const GroupActionSpec& a, int chart, const std::vector<double>& q, double tol) {
  a.check_domain(chart, q);
  const Mat m = field_matrix(a, chart, q);
  Mat ker;
  if (m.norm() == 0.0)
    ker = Mat::Identity(a.d(), a.d());
  else
    ker = nullspace(m, tol);
  if (ker.cols() == 0) return ker;
  return mgs(ker, a.info().gram);
}

void regular_crit_coords(const GroupActionSpec& a, const PhasePoint& pt, std::vector<double>* c,
                         std::vector<double>* b) {
  Vec<Vec<double>> ann, iso;
  regular_crit_frames<double>(a, pt.chart, pt.q, &ann, &iso);
  const int n = a.n();
  const auto g = a.metric<double>(pt.chart, pt.q);
  const auto ginv = tmath::inverse(g, n);
  c->clear();
  b->clear();
  for (const auto& v : ann) c->push_back(tmath::form(ginv, v, pt.p));
  Vec<double> gram(static_cast<std::size_t>(a.d() * a.d()));
  for (int i = 0; i < a.d(); ++i)
    for (int j = 0; j < a.d(); ++j) gram[i * a.d() + j] = a.info().gram(i, j);
  for (const auto& v : iso) b->push_back(tmath::form(gram, v, pt.s));
}

Mat regular_crit_tangent(const GroupActionSpec& a, const PhasePoint& pt) {
  std::vector<double> c, b;
  regular_crit_coords(a, pt, &c, &b);
  const int n = a.n(), nc = int(c.size()), nb = int(b.size());
  const int k = n + nc + nb;
  std::vector<Jet> x(static_cast<std::size_t>(k));
  for (int i = 0; i < n; ++i) x[i] = Jet::variable(pt.q[i], i, k);
  for (int i = 0; i < nc; ++i) x[n + i] = Jet::variable(c[i], n + i, k);
  for (int i = 0; i < nb; ++i) x[n + nc + i] = Jet::variable(b[i], n + nc + i, k);
  const Vec<Jet> z = regular_crit_param<Jet>(a, pt.chart, Vec<Jet>(x.begin(), x.begin() + n),
                                              Vec<Jet>(x.begin() + n, x.begin() + n + nc),
                                              Vec<Jet>(x.begin() + n + nc, x.end()));
  Mat j(z.size(), k);
  for (std::size_t r = 0; r < z.size(); ++r)
    for (int i = 0; i < k; ++i) j(r, i) = i < z[r].n ? z[r].g[i] : 0.0;
  return j;
}

CriticalSample certify_regular_critical(const GroupActionSpec& a, const PhasePoint& pt, double tol) {
  CriticalSample cs;
  cs.pt = pt;
  const GradHess gh = phase_derivatives(a, pt);
  cs.psi = gh.value;
  cs.grad_norm = gh.grad.norm();
  cs.hess = 0.5 * (gh.hess + gh.hess.transpose());
  if (!(cs.grad_norm <= tol)) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "gradient norm %.3e exceeds %.1e", cs.grad_norm, tol);
    throw NotCritical(buf);
  }
  const Mat iso = isotropy_algebra(a, pt.chart, pt.q);
  const bool principal = iso.cols() == a.info().principal_iso_dim;
  for (const auto& s : a.info().strata)
    if (s.principal == principal && (principal || s.e == iso.cols())) cs.stratum = s.label;
  if (!principal) throw DegenerateTransversal("base point is on a singular stratum (" + cs.stratum + ")");

  const SymEigen es = sym_eigen(cs.hess);
  const double emax = es.values.cwiseAbs().maxCoeff();
  const double thr = kRankTol * emax;
  std::vector<int> nz, ze;
  for (int i = 0; i < es.values.size(); ++i) (std::fabs(es.values(i)) > thr && emax > 0 ? nz : ze).push_back(i);
  cs.rank = int(nz.size());
  cs.kernel_dim = int(ze.size());
  cs.normal_basis.resize(cs.hess.rows(), cs.rank);
  cs.kernel_basis.resize(cs.hess.rows(), cs.kernel_dim);
  for (int i = 0; i < cs.rank; ++i) cs.normal_basis.col(i) = es.vectors.col(nz[i]);
  for (int i = 0; i < cs.kernel_dim; ++i) cs.kernel_basis.col(i) = es.vectors.col(ze[i]);
  cs.trans_hess = cs.normal_basis.transpose() * cs.hess * cs.normal_basis;
  cs.signature = 0;
  for (int i : nz) cs.signature += es.values(i) > 0 ? 1 : -1;
  if (cs.rank != 2 * a.kappa())
    throw DegenerateTransversal("transversal Hessian rank " + std::to_string(cs.rank) + " differs from 2 kappa = " +
                                std::to_string(2 * a.kappa()));
  cs.tangent_angle = max_principal_angle(cs.kernel_basis, regular_crit_tangent(a, pt));
  if (!(cs.tangent_angle <= 1e-6)) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "kernel misaligned with the critical set (angle %.3e)", cs.tangent_angle);
    throw DegenerateTransversal(buf);
  }
  return cs;
}

std::vector<PhasePoint> regular_critical_points(const GroupActionSpec& a, int count, std::uint64_t seed,
                                                SampleBox box) {
  Rng rng(seed);
  std::vector<PhasePoint> out;
  const int chart = a.info().principal_chart;
  const int nc = a.n() - a.kappa(), nb = a.info().principal_iso_dim;
  for (int k = 0; k < count; ++k) {
    PhasePoint pt;
    pt.chart = chart;
    pt.q = random_chart_point(a, chart, rng, 0.2);
    std::vector<double> c(static_cast<std::size_t>(nc)), b(static_cast<std::size_t>(nb));
    for (auto& x : c) x = rng.uniform(-box.fiber_radius, box.fiber_radius);
    for (auto& x : b) x = rng.uniform(-box.algebra_radius, box.algebra_radius);
    const auto z = regular_crit_param<double>(a, chart, pt.q, c, b);
    pt.p.assign(z.begin() + a.n(), z.begin() + 2 * a.n());
    pt.s.assign(z.begin() + 2 * a.n(), z.end());
    out.push_back(pt);
  }
  return out;
}

std::vector<CriticalSample> sample_regular_critical(const GroupActionSpec& a, int count, std::uint64_t seed,
                                                    SampleBox box) {
  std::vector<CriticalSample> out;
  for (const auto& pt : regular_critical_points(a, count, seed, box)) out.push_back(certify_regular_critical(a, pt));
  return out;
}

}  // namespace equivar
