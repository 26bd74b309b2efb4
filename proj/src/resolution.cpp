#include "equivar/resolution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace equivar {

std::vector<double> delta_substitution(const std::vector<double>& sigma) {
  std::vector<double> t = sigma;
  for (std::size_t j = 0; j < t.size(); ++j) {
    const double f = t[j];
    for (std::size_t i = 0; i < t.size(); ++i)
      if (i != j) t[i] *= f;
  }
  return t;
}

std::vector<int> delta_monomial_exponents(int N) {
  // e[i][k]: exponent of sigma_k in tau_i
  std::vector<std::vector<int>> e(static_cast<std::size_t>(N), std::vector<int>(static_cast<std::size_t>(N), 0));
  for (int i = 0; i < N; ++i) e[i][i] = 1;
  for (int j = 0; j < N; ++j) {
    const auto f = e[j];
    for (int i = 0; i < N; ++i)
      if (i != j)
        for (int k = 0; k < N; ++k) e[i][k] += f[k];
  }
  std::vector<int> a(static_cast<std::size_t>(N), 0);
  for (int i = 0; i < N; ++i)
    for (int k = 0; k < N; ++k) a[k] += e[i][k];
  return a;
}

namespace {

// Flattened variable layout: tau | x | qv | alpha | beta | p
struct Layout {
  int off[7] = {0, 0, 0, 0, 0, 0, 0};
  std::vector<int> dj;
  int size() const { return off[6]; }
};

Layout layout_of(const GroupActionSpec& a, const IsotropyChain& ch) {
  Layout l;
  const auto& lv = ch.info().levels;
  const int N = ch.depth();
  int na = 0;
  for (const auto& v : lv) {
    l.dj.push_back(v.d);
    na += v.d;
  }
  const int sizes[6] = {N, ch.x_total(), lv[N - 1].c - 1, na, lv[N - 1].e, a.n()};
  for (int k = 0; k < 6; ++k) l.off[k + 1] = l.off[k] + sizes[k];
  return l;
}

std::vector<double> flatten(const BlowupPoint& bp) {
  std::vector<double> u;
  u.insert(u.end(), bp.tau.begin(), bp.tau.end());
  u.insert(u.end(), bp.x.begin(), bp.x.end());
  u.insert(u.end(), bp.qv.begin(), bp.qv.end());
  for (const auto& al : bp.alpha) u.insert(u.end(), al.begin(), al.end());
  u.insert(u.end(), bp.beta.begin(), bp.beta.end());
  u.insert(u.end(), bp.p.begin(), bp.p.end());
  return u;
}

template <class T> WeakInputs<T> unflatten(const Layout& l, const Vec<T>& u, int rho) {
  WeakInputs<T> in;
  auto seg = [&](int k) { return Vec<T>(u.begin() + l.off[k], u.begin() + l.off[k + 1]); };
  in.tau = seg(0);
  in.x = seg(1);
  in.qv = seg(2);
  int o = l.off[3];
  for (int d : l.dj) {
    in.alpha.emplace_back(u.begin() + o, u.begin() + o + d);
    o += d;
  }
  in.beta = seg(4);
  in.p = seg(5);
  in.rho = rho;
  return in;
}

// Jets in the variables [first, last) of the layout, constants elsewhere.
template <class F> GradHess jet_derivs(const std::vector<double>& u, int first, int last, F&& f) {
  const int k = last - first;
  if (k > kMaxJetVars) throw DomainError("too many variables for jet arithmetic");
  Vec<Jet> x(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    x[i] = (int(i) >= first && int(i) < last) ? Jet::variable(u[i], int(i) - first, k) : Jet(u[i]);
  const Jet r = f(x);
  GradHess out;
  out.value = r.v;
  out.grad = VecX::Zero(k);
  out.hess = Mat::Zero(k, k);
  for (int i = 0; i < std::min(k, r.n); ++i) {
    out.grad(i) = r.g[i];
    for (int j = 0; j < std::min(k, r.n); ++j) out.hess(i, j) = r.h[hidx(i, j)];
  }
  return out;
}

const IsotropyChain& chain_of(const GroupActionSpec& a, const BlowupPoint& bp) {
  if (bp.chain < 0 || bp.chain >= int(a.chains().size()))
    throw DomainError("action " + a.name() + " has no chain " + std::to_string(bp.chain));
  return a.chains()[bp.chain];
}

void check_shape(const GroupActionSpec& a, const IsotropyChain& ch, const BlowupPoint& bp) {
  const auto& lv = ch.info().levels;
  const int N = ch.depth();
  bool ok = int(bp.tau.size()) == N && int(bp.x.size()) == ch.x_total() && int(bp.qv.size()) == lv[N - 1].c - 1 &&
            int(bp.alpha.size()) == N && int(bp.beta.size()) == lv[N - 1].e && int(bp.p.size()) == a.n() &&
            bp.rho >= 0 && bp.rho < lv[N - 1].c;
  for (int j = 0; ok && j < N; ++j) ok = int(bp.alpha[j].size()) == lv[j].d;
  if (!ok) throw DomainError("blow-up point has the wrong shape for chain " + ch.info().label);
}

Mat weak_matrix(const WeakEval<double>& ev) {
  const int n = int(ev.V.size());
  Mat w(n, long(ev.E.size() + ev.F.size()));
  int c = 0;
  for (const auto& e : ev.E) w.col(c++) = Eigen::Map<const VecX>(e.data(), n);
  for (const auto& f : ev.F) w.col(c++) = Eigen::Map<const VecX>(f.data(), n);
  return w;
}

WeakEval<double> eval_checked(const GroupActionSpec& a, const BlowupPoint& bp) {
  const IsotropyChain& ch = chain_of(a, bp);
  check_shape(a, ch, bp);
  WeakEval<double> ev = weak_eval<double>(a, ch, weak_inputs(bp));
  a.check_domain(ch.chart(), ev.m);
  return ev;
}

}  // namespace

WeakInputs<double> weak_inputs(const BlowupPoint& bp) {
  WeakInputs<double> in;
  in.tau = bp.tau;
  in.x = bp.x;
  in.qv = bp.qv;
  in.alpha = bp.alpha;
  in.beta = bp.beta;
  in.p = bp.p;
  in.rho = bp.rho;
  return in;
}

std::vector<double> weak_vector_at_center(const GroupActionSpec& a, const IsotropyChain& ch, const BlowupPoint& bp) {
  const int N = ch.depth(), n = a.n();
  const auto& lv = ch.info().levels;
  // frame_0 o ... o frame_k applied to coefficients w
  auto push = [&](int k, std::vector<double> w) {
    for (int j = k; j >= 0; --j) {
      const auto f = ch.frame<double>(j, bp.x);
      std::vector<double> r(f[0].size(), 0.0);
      for (std::size_t i = 0; i < f.size(); ++i)
        for (std::size_t c = 0; c < r.size(); ++c) r[c] += w[i] * f[i][c];
      w = r;
    }
    return w;
  };
  std::vector<double> V(static_cast<std::size_t>(n), 0.0);
  const auto m = ch.center<double>(0, bp.x);
  for (int j = 0; j < N; ++j) {
    const auto A = ch.a_basis<double>(j, bp.x);
    for (std::size_t k = 0; k < A.size(); ++k) {
      const auto e = j == 0 ? fundamental_field_t<double>(a, ch.chart(), m, A[k])
                            : push(j - 1, ch.rep<double>(j - 1, bp.x, A[k], ch.center<double>(j, bp.x)));
      for (int i = 0; i < n; ++i) V[i] += bp.alpha[j][k] * e[i];
    }
  }
  const auto vt = normal_sphere_point<double>(bp.qv, bp.rho, lv[N - 1].c);
  const auto B = ch.b_basis<double>(N - 1, bp.x);
  for (std::size_t k = 0; k < B.size(); ++k) {
    const auto f = push(N - 1, ch.rep<double>(N - 1, bp.x, B[k], vt));
    for (int i = 0; i < n; ++i) V[i] += bp.beta[k] * f[i];
  }
  return V;
}

ForwardImage blowup_forward(const GroupActionSpec& a, const BlowupPoint& bp) {
  const WeakEval<double> ev = eval_checked(a, bp);
  ForwardImage f;
  f.pt.chart = chain_of(a, bp).chart();
  f.pt.q = ev.m;
  f.pt.p = bp.p;
  f.pt.s = ev.X;
  return f;
}

WeakConditions weak_critical_conditions(const GroupActionSpec& a, const BlowupPoint& bp, double tol) {
  const WeakEval<double> ev = eval_checked(a, bp);
  WeakConditions c;
  double m1 = 0.0;
  for (const auto& al : bp.alpha)
    for (double v : al) m1 = std::max(m1, std::fabs(v));
  for (double v : ev.lambda_b_v) m1 = std::max(m1, std::fabs(v));
  c.I = m1 <= tol;
  const int n = a.n();
  auto pairing = [&](const Vec<Vec<double>>& vs) {
    double r = 0.0;
    for (const auto& v : vs) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += bp.p[i] * v[i];
      r = std::max(r, std::fabs(s));
    }
    return r;
  };
  c.II = pairing(ev.E) <= tol;
  c.III = pairing(ev.F) <= tol;
  return c;
}

WeakTransformReport weak_transform_phase(const GroupActionSpec& a, const BlowupPoint& bp) {
  const WeakEval<double> ev = eval_checked(a, bp);
  WeakTransformReport r;
  r.psi_tot = ev.psi_tot;
  r.psi_wk = ev.psi_wk;
  r.factor = 1.0;
  for (double t : bp.tau) r.factor *= t;
  r.factor_residual = std::fabs(r.psi_tot - r.factor * r.psi_wk) / std::max(1.0, std::fabs(r.psi_tot));
  const WeakConditions c = weak_critical_conditions(a, bp);
  r.cond_I = c.I;
  r.cond_II = c.II;
  r.cond_III = c.III;
  return r;
}

VecX weak_gradient(const GroupActionSpec& a, const BlowupPoint& bp) {
  const IsotropyChain& ch = chain_of(a, bp);
  check_shape(a, ch, bp);
  const Layout l = layout_of(a, ch);
  return jet_derivs(flatten(bp), l.off[3], l.off[6],
                    [&](const Vec<Jet>& u) { return weak_eval<Jet>(a, ch, unflatten(l, u, bp.rho)).psi_wk; })
      .grad;
}

WeakTransformReport certify_weak_hessian(const GroupActionSpec& a, const BlowupPoint& bp) {
  WeakTransformReport r = weak_transform_phase(a, bp);
  const IsotropyChain& ch = chain_of(a, bp);
  const Layout l = layout_of(a, ch);
  const GradHess gh = jet_derivs(flatten(bp), l.off[3], l.off[6], [&](const Vec<Jet>& u) {
    return weak_eval<Jet>(a, ch, unflatten(l, u, bp.rho)).psi_wk;
  });
  const Mat h = 0.5 * (gh.hess + gh.hess.transpose());
  const int k = l.off[5] - l.off[3], n = a.n();

  const Mat w = weak_matrix(weak_eval<double>(a, ch, weak_inputs(bp)));
  r.block_residual = std::max({h.topLeftCorner(k, k).cwiseAbs().maxCoeff(),
                               h.bottomRightCorner(n, n).cwiseAbs().maxCoeff(),
                               (h.bottomLeftCorner(n, k) - w).cwiseAbs().maxCoeff()});

  const SymEigen es = sym_eigen(h);
  const double emax = es.values.cwiseAbs().maxCoeff();
  std::vector<int> ze;
  r.wk_hess_rank = 0;
  r.min_nonzero_eig = std::numeric_limits<double>::infinity();
  for (int i = 0; i < es.values.size(); ++i) {
    const double e = std::fabs(es.values(i));
    if (emax > 0 && e > kRankTol * emax) {
      ++r.wk_hess_rank;
      r.min_nonzero_eig = std::min(r.min_nonzero_eig, e);
    } else {
      ze.push_back(i);
    }
  }
  if (r.wk_hess_rank == 0) r.min_nonzero_eig = 0.0;
  r.kernel_dim = int(ze.size());

  // Crit of (alpha, beta, p) -> p^T W (alpha, beta) is ker W x Ann W.
  const Mat kw = nullspace(w), aw = nullspace(w.transpose());
  Mat tan = Mat::Zero(k + n, kw.cols() + aw.cols());
  tan.topLeftCorner(k, kw.cols()) = kw;
  tan.bottomRightCorner(n, aw.cols()) = aw;
  Mat ker(k + n, long(ze.size()));
  for (std::size_t i = 0; i < ze.size(); ++i) ker.col(long(i)) = es.vectors.col(ze[i]);
  r.kernel_angle = ker.cols() == tan.cols() ? max_principal_angle(ker, tan) : M_PI / 2;
  return r;
}

int weak_span_rank(const GroupActionSpec& a, const BlowupPoint& bp) {
  return numerical_rank(weak_matrix(eval_checked(a, bp)));
}

std::vector<int> jacobian_exponents(const IsotropyChain& ch) {
  std::vector<int> e;
  int dsum = 0;
  for (const auto& l : ch.info().levels) {
    dsum += l.d;
    e.push_back(l.c + dsum - 1);
  }
  return e;
}

JacobianPower jacobian_power(const GroupActionSpec& a, const BlowupPoint& bp) {
  const IsotropyChain& ch = chain_of(a, bp);
  check_shape(a, ch, bp);
  const Layout l = layout_of(a, ch);
  const std::vector<double> u = flatten(bp);
  const int k = l.off[5];
  if (k != a.n() + a.d()) throw DomainError("blow-up of chain " + ch.info().label + " is not equidimensional");
  Vec<Jet> x(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) x[i] = int(i) < k ? Jet::variable(u[i], int(i), k) : Jet(u[i]);
  const WeakEval<Jet> ev = weak_eval<Jet>(a, ch, unflatten(l, x, bp.rho));
  Mat j(k, k);
  for (int r = 0; r < k; ++r) {
    const Jet& z = r < a.n() ? ev.m[r] : ev.X[r - a.n()];
    for (int c = 0; c < k; ++c) j(r, c) = c < z.n ? z.g[c] : 0.0;
  }
  JacobianPower jp;
  jp.exponents = jacobian_exponents(ch);
  jp.tilde = std::fabs(j.determinant());
  jp.monomial = 1.0;
  for (std::size_t i = 0; i < bp.tau.size(); ++i) jp.monomial *= std::pow(std::fabs(bp.tau[i]), jp.exponents[i]);
  jp.phi = jp.monomial > 0 ? jp.tilde / jp.monomial : std::numeric_limits<double>::quiet_NaN();
  return jp;
}

AlphaChartResult alpha_chart_noncritical(const GroupActionSpec& a, int chain, int samples, std::uint64_t seed,
                                         double box) {
  AlphaChartResult res;
  if (chain < 0 || chain >= int(a.chains().size())) throw DomainError("no such chain");
  const IsotropyChain& ch = a.chains()[chain];
  if (ch.depth() != 1 || ch.info().levels[0].d == 0) return res;
  res.applicable = true;
  const auto& lv = ch.info().levels[0];
  const int nx = lv.xdim, c = lv.c, d = lv.d, e = lv.e, n = a.n();
  // layout: x | tau | t | alpha' | beta | p
  const int k = nx + 1 + c + (d - 1) + e + n;
  Rng rng(seed);
  res.min_grad = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    std::vector<double> u;
    for (int i = 0; i < nx; ++i) u.push_back(rng.uniform(lv.xlo[i], lv.xhi[i]));
    std::vector<double> t(static_cast<std::size_t>(c));
    double tn = 0.0;
    for (auto& v : t) {
      v = rng.uniform(-box, box);
      tn += v * v;
    }
    u.push_back(rng.uniform(-1.0, 1.0) / std::max(1.0, std::sqrt(tn)));
    u.insert(u.end(), t.begin(), t.end());
    for (int i = 0; i < d - 1 + e + n; ++i) u.push_back(rng.uniform(-1.0, 1.0));
    const int rho = rng.index(d);
    const GradHess gh = jet_derivs(u, 0, k, [&](const Vec<Jet>& z) {
      int o = 0;
      const Vec<Jet> x(z.begin(), z.begin() + nx);
      o += nx;
      const Jet tau = z[o++];
      Vec<Jet> tt(z.begin() + o, z.begin() + o + c);
      o += c;
      Vec<Jet> al(z.begin() + o, z.begin() + o + d - 1);
      o += d - 1;
      Vec<Jet> be(z.begin() + o, z.begin() + o + e);
      o += e;
      Vec<Jet> p(z.begin() + o, z.begin() + o + n);
      Vec<Jet> w(tt);
      for (auto& v : w) v = tau * v;
      const Vec<Jet> m = ch.exp<Jet>(0, x, w);
      const auto A = ch.a_basis<Jet>(0, x);
      Vec<Jet> coef(static_cast<std::size_t>(a.d()), Jet(0.0));
      int ai = 0;
      for (int r = 0; r < d; ++r) {
        const Jet cr = r == rho ? Jet(1.0) : al[ai++];
        for (int i = 0; i < a.d(); ++i) coef[i] += cr * A[r][i];
      }
      Vec<Jet> V = fundamental_field_t<Jet>(a, ch.chart(), m, coef);
      const auto B = ch.b_basis<Jet>(0, x);
      Vec<Jet> bc(static_cast<std::size_t>(a.d()), Jet(0.0));
      for (int r = 0; r < e; ++r)
        for (int i = 0; i < a.d(); ++i) bc[i] += be[r] * B[r][i];
      const Vec<Jet> lb = ch.rep<Jet>(0, x, bc, tt);
      Vec<Dual<Jet>> xd = detail::lift(x), wd = detail::lift(w);
      for (int i = 0; i < c; ++i) wd[i].b = lb[i];
      const auto pushed = ch.exp<Dual<Jet>>(0, xd, wd);
      Jet psi(0.0);
      for (int i = 0; i < n; ++i) psi += p[i] * (V[i] + pushed[i].b);
      return psi;
    });
    res.min_grad = std::min(res.min_grad, gh.grad.norm());
    ++res.samples;
  }
  return res;
}

namespace {

std::vector<double> random_sigma(int N, Rng& rng, bool zero) {
  std::vector<double> s(static_cast<std::size_t>(N), 0.0);
  if (!zero)
    for (auto& v : s) v = rng.uniform(-0.95, 0.95);
  return s;
}

}  // namespace

void project_to_weak_critical(const GroupActionSpec& a, BlowupPoint* bp, Rng& rng) {
  const IsotropyChain& ch = chain_of(a, *bp);
  check_shape(a, ch, *bp);
  for (auto& al : bp->alpha) std::fill(al.begin(), al.end(), 0.0);
  const int N = ch.depth();
  const int cN = ch.info().levels[N - 1].c;
  const auto vt = normal_sphere_point<double>(bp->qv, bp->rho, cN);
  const auto B = ch.b_basis<double>(N - 1, bp->x);
  Mat lb(cN, long(B.size()));
  for (std::size_t k = 0; k < B.size(); ++k) {
    const auto r = ch.rep<double>(N - 1, bp->x, B[k], vt);
    for (int i = 0; i < cN; ++i) lb(i, long(k)) = r[i];
  }
  const Mat kb = nullspace(lb);
  std::fill(bp->beta.begin(), bp->beta.end(), 0.0);
  for (long c = 0; c < kb.cols(); ++c) {
    const double s = rng.uniform(-1.0, 1.0);
    for (long i = 0; i < kb.rows(); ++i) bp->beta[i] += s * kb(i, c);
  }
  const Mat w = weak_matrix(weak_eval<double>(a, ch, weak_inputs(*bp)));
  const Mat ann = nullspace(w.transpose());
  std::fill(bp->p.begin(), bp->p.end(), 0.0);
  for (long c = 0; c < ann.cols(); ++c) {
    const double s = rng.uniform(-2.0, 2.0);
    for (long i = 0; i < ann.rows(); ++i) bp->p[i] += s * ann(i, c);
  }
}

BlowupPoint random_blowup_point(const GroupActionSpec& a, int chain, Rng& rng, int kind) {
  if (chain < 0 || chain >= int(a.chains().size())) throw DomainError("no such chain");
  const IsotropyChain& ch = a.chains()[chain];
  const auto& lv = ch.info().levels;
  const int N = ch.depth();
  BlowupPoint bp;
  bp.chain = chain;
  bp.sigma = random_sigma(N, rng, kind == 2);
  bp.tau = delta_substitution(bp.sigma);
  for (const auto& l : lv)
    for (int i = 0; i < l.xdim; ++i) bp.x.push_back(rng.uniform(l.xlo[i], l.xhi[i]));
  bp.rho = rng.index(lv[N - 1].c);
  for (int i = 0; i < lv[N - 1].c - 1; ++i) bp.qv.push_back(rng.uniform(-1.0, 1.0));
  for (const auto& l : lv) {
    std::vector<double> al;
    for (int i = 0; i < l.d; ++i) al.push_back(rng.uniform(-1.0, 1.0));
    bp.alpha.push_back(al);
  }
  for (int i = 0; i < lv[N - 1].e; ++i) bp.beta.push_back(rng.uniform(-1.0, 1.0));
  for (int i = 0; i < a.n(); ++i) bp.p.push_back(rng.uniform(-2.0, 2.0));
  if (kind >= 1) project_to_weak_critical(a, &bp, rng);
  return bp;
}

BlowupPoint change_sphere_chart(const GroupActionSpec& a, const BlowupPoint& bp, int rho, double* sign) {
  const IsotropyChain& ch = chain_of(a, bp);
  check_shape(a, ch, bp);
  const int N = ch.depth();
  const int cN = ch.info().levels[N - 1].c;
  if (rho < 0 || rho >= cN) throw DomainError("no such normal sphere chart");
  auto vt = normal_sphere_point<double>(bp.qv, bp.rho, cN);
  if (vt[rho] == 0.0) throw DomainError("point is not in the requested normal sphere chart");
  const double s = vt[rho] > 0 ? 1.0 : -1.0;
  BlowupPoint out = bp;
  out.rho = rho;
  out.qv.clear();
  for (int i = 0; i < cN; ++i)
    if (i != rho) out.qv.push_back(vt[i] / vt[rho]);
  out.tau[N - 1] *= s;
  for (auto& al : out.alpha)
    for (auto& v : al) v *= s;
  // sigma consistent with the new tau where the substitution can be inverted
  if (N == 1) {
    out.sigma = out.tau;
  } else if (N == 2 && out.tau[0] != 0.0 && out.tau[1] != 0.0) {
    out.sigma = {out.tau[0] / out.tau[1], out.tau[1] * out.tau[1] / out.tau[0]};
  }
  if (sign) *sign = s;
  return out;
}

}  // namespace equivar
