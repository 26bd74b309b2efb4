#include "equivar/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>

#include "equivar/errors.hpp"

namespace equivar {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;
// evaluations above which the oracle refuses a grid
constexpr double kMaxEvaluations = 4e9;
// node multiplier for axes that carry smooth-step partition functions
constexpr int kPartitionFactor = 3;

int round8(double n) { return std::max(1, int(std::ceil(n / 8.0))) * 8; }

bool next_index(std::vector<int>& idx, const std::vector<int>& size, int from) {
  for (int k = int(idx.size()) - 1; k >= from; --k) {
    if (++idx[k] < size[k]) return true;
    idx[k] = 0;
  }
  return false;
}

cplx cis(double x) { return {std::cos(x), std::sin(x)}; }

double norm2(const double* v, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += v[i] * v[i];
  return std::sqrt(s);
}

// Orthonormal fiber frame at q: p = L p^, g = L L^T.
struct Frame {
  double base = 0.0;  // base amplitude times the chart weight
  double detL = 0.0;
  Mat L;
  Mat K;              // L^T M, n x d, M the field matrix
  VecX chat;          // L^{-1} p0 theta
};

Frame frame_at(const GroupActionSpec& a, const AmplitudeSpec& amp, int chart, const std::vector<double>& q,
               const PointWeight& w) {
  Frame f;
  f.base = amplitude_base(amp, a, chart, q);
  if (f.base != 0.0 && w) f.base *= w(q);
  const Mat g = metric_matrix(a, chart, q);
  f.L = g.llt().matrixL();
  f.detL = f.L.diagonal().prod();
  f.K = f.L.transpose() * field_matrix(a, chart, q);
  f.chat = VecX::Zero(a.n());
  if (amp.p0 != 0.0) {
    const auto th = a.fiber_form<double>(chart, q);
    const VecX t = amp.p0 * Eigen::Map<const VecX>(th.data(), a.n());
    f.chat = f.L.triangularView<Eigen::Lower>().solve(t);
  }
  return f;
}

std::vector<Rule> rules_for(const Box& b, const std::vector<int>& nodes) {
  std::vector<Rule> r;
  for (std::size_t k = 0; k < b.lo.size(); ++k) r.push_back(axis_rule(b.lo[k], b.hi[k], b.full_period[k], nodes[k]));
  return r;
}

int nodes_for(double range, double freq, const QuadratureConfig& cfg) {
  const double need = cfg.points_per_period * range * freq * 1.15 / kTwoPi;
  return round8(std::max<double>(cfg.base_nodes, need));
}

double box_volume_nodes(const std::vector<int>& nodes) {
  double v = 1.0;
  for (int n : nodes) v *= n;
  return v;
}

// Amplitude-support samples of a box.
std::vector<std::vector<double>> support_samples(const GroupActionSpec& a, const AmplitudeSpec& amp, int chart,
                                                 const Box& b, const PointWeight& w, int want, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> out;
  const int n = int(b.lo.size());
  for (int tries = 0; tries < 200 * want && int(out.size()) < want; ++tries) {
    std::vector<double> q(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) q[k] = rng.uniform(b.lo[k], b.hi[k]);
    if (!a.in_domain(chart, q)) continue;
    double v = amplitude_base(amp, a, chart, q);
    if (v > 0.0 && w) v *= w(q);
    if (v > 0.0) out.push_back(std::move(q));
  }
  return out;
}

struct ShapeKey {
  std::string s;
  explicit ShapeKey(const GroupActionSpec& a, const AmplitudeSpec& amp, int nodes, SignatureConvention c) {
    char buf[64];
    s = a.name() + "|" + amp.id + "|" + std::to_string(nodes) + "|" + std::to_string(int(c));
    auto add = [&](double v) {
      std::snprintf(buf, sizeof buf, "|%.17g", v);
      s += buf;
    };
    for (double v : amp.q0) add(v);
    for (double v : amp.s0) add(v);
    add(amp.r_q);
    add(amp.p0);
    add(amp.R);
    add(amp.R_s);
  }
};

std::shared_ptr<const RegCritGrid> cached_grid(const GroupActionSpec& a, const AmplitudeSpec& amp, int nodes,
                                               SignatureConvention c) {
  static std::mutex mu;
  static std::map<std::string, std::shared_ptr<const RegCritGrid>> cache;
  const ShapeKey key(a, amp, nodes, c);
  {
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(key.s);
    if (it != cache.end()) return it->second;
  }
  auto g = std::make_shared<const RegCritGrid>(reg_crit_grid(a, amp, nodes, c));
  std::lock_guard<std::mutex> lk(mu);
  cache.emplace(key.s, g);
  return g;
}

int fine_nodes(const QuadratureConfig& cfg) { return round8(1.5 * cfg.l0_nodes); }

bool has_singular_stratum(const GroupActionSpec& a) {
  for (const auto& s : a.info().strata)
    if (!s.principal) return true;
  return false;
}

// Pole-type chains: depth 1 with a trivial complement of the isotropy algebra.
bool pole_type(const IsotropyChain& ch) { return ch.depth() == 1 && ch.info().levels[0].d == 0; }

BlowupPoint pole_point(int chain, const IsotropyChain& ch, double tau, const std::vector<double>& qv, int rho,
                       const std::vector<double>& beta, int n) {
  BlowupPoint bp;
  bp.chain = chain;
  bp.sigma = {tau};
  bp.tau = {tau};
  bp.rho = rho;
  bp.qv = qv;
  bp.alpha = {std::vector<double>()};
  bp.beta = beta;
  bp.p.assign(static_cast<std::size_t>(n), 0.0);
  (void)ch;
  return bp;
}

// Largest |tau| at which the chain partition is still nonzero, scanned along sample directions.
double chain_tau_extent(const GroupActionSpec& a, int chain) {
  const IsotropyChain& ch = a.chains()[chain];
  const int c = ch.info().levels[0].c;
  Rng rng(0x7a0);
  double tmax = 0.0;
  for (int s = 0; s < 24; ++s) {
    std::vector<double> qv(static_cast<std::size_t>(c - 1));
    for (auto& v : qv) v = rng.uniform(-1.5, 1.5);
    const int rho = s % c;
    for (int i = 1; i <= 1000; ++i) {
      const double t = 0.999 * i / 1000.0;
      WeakInputs<double> in;
      in.tau = {t};
      in.qv = qv;
      in.rho = rho;
      in.alpha = {std::vector<double>()};
      in.beta.assign(static_cast<std::size_t>(ch.info().levels[0].e), 0.0);
      in.p.assign(static_cast<std::size_t>(a.n()), 0.0);
      const auto ev = weak_eval<double>(a, ch, in);
      if (!a.in_domain(ch.chart(), ev.m)) break;
      if (chain_partition(ch, a.embed<double>(ch.chart(), ev.m)) > 0.0) tmax = std::max(tmax, t);
    }
  }
  return std::min(0.999, tmax + 0.01);
}

double sphere_chart_box(int c) { return std::sqrt(2.0 * c - 1.0); }

}  // namespace

// ---------------------------------------------------------------- basics

cplx signature_factor(int signature, SignatureConvention c) {
  const double ph = c == SignatureConvention::kQuarter ? M_PI * signature / 4.0 : M_PI * signature;
  return cis(ph);
}

Box support_box(const GroupActionSpec& a, const AmplitudeSpec& amp, int chart, const PointWeight& w) {
  const ChartInfo& ch = a.chart(chart);
  const int n = ch.dim;
  const int S = n <= 2 ? 96 : n == 3 ? 40 : 20;
  Box b;
  b.lo = ch.lo;
  b.hi = ch.hi;
  b.full_period = ch.periodic;
  if (amp.zero) {
    b.empty = true;
    return b;
  }
  std::vector<std::vector<char>> occ(n, std::vector<char>(static_cast<std::size_t>(S), 0));
  std::vector<int> idx(static_cast<std::size_t>(n), 0), size(static_cast<std::size_t>(n), S);
  std::vector<double> q(static_cast<std::size_t>(n));
  bool any = false;
  do {
    for (int k = 0; k < n; ++k) q[k] = ch.lo[k] + (idx[k] + 0.5) * (ch.hi[k] - ch.lo[k]) / S;
    if (!a.in_domain(chart, q)) continue;
    double v = amplitude_base(amp, a, chart, q);
    if (v > 0.0 && w) v *= w(q);
    if (v > 0.0) {
      any = true;
      for (int k = 0; k < n; ++k) occ[k][idx[k]] = 1;
    }
  } while (next_index(idx, size, 0));
  if (!any) {
    b.empty = true;
    return b;
  }
  for (int k = 0; k < n; ++k) {
    const double h = (ch.hi[k] - ch.lo[k]) / S;
    const auto& o = occ[k];
    b.full_period[k] = false;
    if (ch.periodic[k]) {
      // largest circular run of empty cells
      int best = 0, start = 0;
      for (int i = 0; i < S; ++i) {
        if (o[i]) continue;
        int len = 0;
        while (len < S && !o[(i + len) % S]) ++len;
        if (len > best) {
          best = len;
          start = i;
        }
      }
      const int span = S - best + 2;
      if (best <= 2 || span >= S) {
        b.lo[k] = ch.lo[k];
        b.hi[k] = ch.hi[k];
        b.full_period[k] = true;
        continue;
      }
      const int first = (start + best) % S;
      b.lo[k] = ch.lo[k] + (first - 1) * h;
      b.hi[k] = b.lo[k] + span * h;
      continue;
    }
    int imin = S, imax = -1;
    for (int i = 0; i < S; ++i)
      if (o[i]) {
        imin = std::min(imin, i);
        imax = std::max(imax, i);
      }
    b.lo[k] = ch.lo[k] + std::max(0, imin - 1) * h;
    b.hi[k] = ch.lo[k] + std::min(S, imax + 2) * h;
  }
  return b;
}

// ---------------------------------------------------------------- Reg Crit

RegCritGrid reg_crit_grid(const GroupActionSpec& a, const AmplitudeSpec& amp, int nodes, SignatureConvention conv) {
  RegCritGrid grid;
  grid.nodes_per_axis = nodes;
  if (amp.zero) return grid;
  const int chart = a.info().principal_chart;
  const int n = a.n(), d = a.d(), nc = n - a.kappa(), nb = a.info().principal_iso_dim;
  const Box qb = support_box(a, amp, chart);
  if (qb.empty) return grid;

  double theta_max = 0.0;
  if (amp.p0 != 0.0) {
    for (const auto& q : support_samples(a, amp, chart, qb, nullptr, 400, 0x11)) {
      const auto th = a.fiber_form<double>(chart, q);
      theta_max = std::max(theta_max, fiber_norm(a, chart, q, th));
    }
  }
  const double rc = amp.R + std::fabs(amp.p0) * theta_max;
  const Eigen::SelfAdjointEigenSolver<Mat> ge(a.info().gram);
  double s0n = 0.0;
  for (double v : amp.s0) s0n += v * v;
  const double rb = std::sqrt(ge.eigenvalues().maxCoeff()) * (amp.R_s + std::sqrt(s0n));

  std::vector<Rule> rules = rules_for(qb, std::vector<int>(static_cast<std::size_t>(n), nodes));
  for (int k = 0; k < nc; ++k) rules.push_back(composite_gl(-rc, rc, std::max(1, nodes / 8)));
  for (int k = 0; k < nb; ++k) rules.push_back(composite_gl(-rb, rb, std::max(1, nodes / 8)));
  const int D = int(rules.size());
  std::vector<int> size;
  for (const auto& r : rules) size.push_back(int(r.size()));
  const double vol = algebra_volume(a);

  struct Node {
    PhasePoint z;
    cplx w;
  };
  auto block = [&](int i0) {
    std::vector<Node> out;
    std::vector<int> idx(static_cast<std::size_t>(D), 0);
    idx[0] = i0;
    std::vector<double> q(static_cast<std::size_t>(n)), c(static_cast<std::size_t>(nc)),
        b(static_cast<std::size_t>(nb));
    do {
      double qw = 1.0;
      for (int k = 0; k < D; ++k) qw *= rules[k].w[idx[k]];
      for (int k = 0; k < n; ++k) q[k] = rules[k].x[idx[k]];
      if (!a.in_domain(chart, q)) continue;
      if (amplitude_base(amp, a, chart, q) == 0.0) continue;
      for (int k = 0; k < nc; ++k) c[k] = rules[n + k].x[idx[n + k]];
      for (int k = 0; k < nb; ++k) b[k] = rules[n + nc + k].x[idx[n + nc + k]];
      const auto z = regular_crit_param<double>(a, chart, q, c, b);
      PhasePoint pt{chart, std::vector<double>(z.begin(), z.begin() + n),
                    std::vector<double>(z.begin() + n, z.begin() + 2 * n),
                    std::vector<double>(z.begin() + 2 * n, z.end())};
      if (amplitude(amp, a, pt) == 0.0) continue;
      const Mat J = regular_crit_tangent(a, pt);
      const Mat N = nullspace(J.transpose());
      if (N.cols() != 2 * a.kappa())
        throw DegenerateTransversal("normal space of Reg Crit has dimension " + std::to_string(N.cols()));
      const GradHess gh = phase_derivatives(a, pt);
      const Mat HN = N.transpose() * gh.hess * N;
      const SymEigen eg = sym_eigen(HN);
      double det = 1.0;
      int sig = 0;
      for (long i = 0; i < eg.values.size(); ++i) {
        det *= std::fabs(eg.values(i));
        sig += eg.values(i) > 0 ? 1 : -1;
      }
      const double area = std::sqrt((J.transpose() * J).determinant());
      out.push_back({pt, qw * area / std::sqrt(det) * vol * signature_factor(sig, conv)});
    } while (next_index(idx, size, 1));
    return out;
  };
  (void)d;
  const auto blocks = parallel_map<std::vector<Node>>(size[0], block);
  for (const auto& bl : blocks)
    for (const auto& nd : bl) {
      grid.z.push_back(nd.z);
      grid.w.push_back(nd.w);
    }
  return grid;
}

cplx integrate_on(const RegCritGrid& g, const std::function<double(const PhasePoint&)>& f) {
  std::vector<cplx> v(g.z.size());
  for (std::size_t i = 0; i < g.z.size(); ++i) v[i] = g.w[i] * f(g.z[i]);
  return pairwise_sum(v.data(), v.size());
}

L0Result leading_coefficient(const GroupActionSpec& a, const AmplitudeSpec& amp, const QuadratureConfig& cfg) {
  L0Result r;
  if (amp.zero) return r;
  if (cfg.l0_nodes < 2) throw DomainError("l0_nodes must be at least 2");
  auto f = [&](const PhasePoint& pt) { return amplitude(amp, a, pt); };
  const auto coarse = cached_grid(a, amp, round8(cfg.l0_nodes), cfg.convention);
  const auto fine = cached_grid(a, amp, fine_nodes(cfg), cfg.convention);
  r.coarse = integrate_on(*coarse, f);
  r.value = integrate_on(*fine, f);
  r.nodes = fine->z.size();
  const double scale = std::abs(r.value);
  r.rel_change = scale > 0 ? std::abs(r.value - r.coarse) / scale : std::abs(r.value - r.coarse);
  if (r.rel_change > cfg.l0_tol) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "Reg Crit quadrature did not settle: relative change %.3g > %.3g",
                  r.rel_change, cfg.l0_tol);
    throw QuadratureError(buf);
  }
  return r;
}

cplx leading_coefficient_L0(const GroupActionSpec& a, const AmplitudeSpec& amp, const QuadratureConfig& cfg) {
  return leading_coefficient(a, amp, cfg).value;
}

// ---------------------------------------------------------------- oracle

OracleResult brute_force_chart(const GroupActionSpec& a, const AmplitudeSpec& amp, double mu, int chart,
                               const PointWeight& w, const QuadratureConfig& cfg) {
  if (!(mu > 0.0)) throw DomainError("mu must be positive");
  if (cfg.base_nodes < 2 || cfg.points_per_period < 8.0)
    throw QuadratureError("oracle resolution below 8 points per oscillation");
  OracleResult res;
  res.mu = mu;
  if (amp.zero) return res;
  const Box qb = support_box(a, amp, chart, w);
  if (qb.empty) return res;
  const int n = a.n(), d = a.d();
  const double vol = algebra_volume(a);
  const VecX s0 = Eigen::Map<const VecX>(amp.s0.data(), d);

  // frames at support samples, with the range of chat
  const auto qs = support_samples(a, amp, chart, qb, w, 500, 0x5eed);
  if (qs.empty()) return res;
  VecX cmin = VecX::Constant(n, 1e300), cmax = VecX::Constant(n, -1e300);
  for (const auto& q : qs) {
    const Frame f = frame_at(a, amp, chart, q, nullptr);
    cmin = cmin.cwiseMin(f.chat);
    cmax = cmax.cwiseMax(f.chat);
  }

  // inner boxes
  Box fiber_inner, alg_inner;
  for (int i = 0; i < d; ++i) {
    alg_inner.lo.push_back(amp.s0[i] - amp.R_s);
    alg_inner.hi.push_back(amp.s0[i] + amp.R_s);
    alg_inner.full_period.push_back(false);
  }
  for (int i = 0; i < n; ++i) {
    fiber_inner.lo.push_back(cmin(i) - amp.R);
    fiber_inner.hi.push_back(cmax(i) + amp.R);
    fiber_inner.full_period.push_back(false);
  }

  // per-axis frequency bounds by central differences
  auto estimate = [&](Reduction red) {
    const bool fib = red == Reduction::kFiber;
    const Box& inner = fib ? alg_inner : fiber_inner;  // fiber reduction integrates s numerically
    const int m = int(inner.lo.size());
    const double Rr = fib ? amp.R : amp.R_s;
    std::vector<double> freq(static_cast<std::size_t>(n + m), 0.0);
    Rng rng(0xf00d);
    auto eval = [&](const Frame& f, const VecX& u, double* mag) {
      if (fib) {
        const VecX wv = f.K * u;
        *mag = wv.norm();
        return f.chat.dot(wv);
      }
      const VecX J = f.K.transpose() * u;
      *mag = J.norm();
      return s0.dot(J);
    };
    const std::size_t step = std::max<std::size_t>(1, qs.size() / 300);
    for (std::size_t si = 0; si < qs.size(); si += step) {
      const auto& q = qs[si];
      const Frame f0 = frame_at(a, amp, chart, q, nullptr);
      std::vector<Frame> fp, fm;
      std::vector<double> hq(static_cast<std::size_t>(n));
      for (int k = 0; k < n; ++k) {
        hq[k] = 1e-5 * (qb.hi[k] - qb.lo[k]);
        auto qp = q, qm = q;
        qp[k] += hq[k];
        qm[k] -= hq[k];
        fp.push_back(frame_at(a, amp, chart, qp, nullptr));
        fm.push_back(frame_at(a, amp, chart, qm, nullptr));
      }
      for (int r = 0; r < 5; ++r) {
        VecX u(m);
        for (int i = 0; i < m; ++i)
          u(i) = fib ? rng.uniform(inner.lo[i], inner.hi[i]) : f0.chat(i) + rng.uniform(-amp.R, amp.R);
        double a1, a2;
        for (int k = 0; k < n; ++k) {
          const double p1 = eval(fp[k], u, &a1), p2 = eval(fm[k], u, &a2);
          const double fk = (Rr * std::fabs(a1 - a2) + std::fabs(p1 - p2)) / (2 * hq[k] * mu);
          freq[k] = std::max(freq[k], fk);
        }
        for (int i = 0; i < m; ++i) {
          const double h = 1e-5 * (inner.hi[i] - inner.lo[i]);
          VecX up = u, um = u;
          up(i) += h;
          um(i) -= h;
          const double p1 = eval(f0, up, &a1), p2 = eval(f0, um, &a2);
          freq[n + i] = std::max(freq[n + i], (Rr * std::fabs(a1 - a2) + std::fabs(p1 - p2)) / (2 * h * mu));
        }
      }
    }
    std::vector<int> nodes;
    for (int k = 0; k < n; ++k) nodes.push_back(nodes_for(qb.hi[k] - qb.lo[k], freq[k], cfg));
    for (int i = 0; i < m; ++i) nodes.push_back(nodes_for(inner.hi[i] - inner.lo[i], freq[n + i], cfg));
    return nodes;
  };

  Reduction red = cfg.reduction;
  std::vector<int> nodes;
  if (red == Reduction::kAuto) {
    const auto nf = estimate(Reduction::kFiber), na = estimate(Reduction::kAlgebra);
    // the fiber reduction drops s-nodes outside the ball, the algebra one p-nodes
    const double cf = box_volume_nodes(nf) * (d >= 2 ? 0.78 : 1.0);
    const double ca = box_volume_nodes(na) * (n >= 2 ? 0.78 : 1.0);
    red = cf <= ca ? Reduction::kFiber : Reduction::kAlgebra;
    nodes = red == Reduction::kFiber ? nf : na;
  } else {
    nodes = estimate(red);
  }
  const bool fib = red == Reduction::kFiber;
  res.reduction = fib ? "fiber" : "algebra";
  res.nodes = nodes;
  if (box_volume_nodes(nodes) > kMaxEvaluations)
    throw QuadratureError("oracle grid exceeds the evaluation budget for this mu");

  const Box& inner = fib ? alg_inner : fiber_inner;
  const int m = int(inner.lo.size());
  const double Rr = fib ? amp.R : amp.R_s;
  const int hd = fib ? n : d;  // dimension of the reduced block
  const std::vector<Rule> qr = rules_for(qb, std::vector<int>(nodes.begin(), nodes.begin() + n));
  const std::vector<Rule> ir = rules_for(inner, std::vector<int>(nodes.begin() + n, nodes.end()));

  // inner nodes; weights carry the inner amplitude factor when it does not depend on q
  const bool inner_fixed = fib || amp.p0 == 0.0;
  std::vector<double> ix, iw;
  {
    std::vector<int> idx(static_cast<std::size_t>(m), 0), size;
    for (const auto& r : ir) size.push_back(int(r.size()));
    std::vector<double> u(static_cast<std::size_t>(m));
    do {
      double wt = 1.0;
      for (int i = 0; i < m; ++i) {
        u[i] = ir[i].x[idx[i]];
        wt *= ir[i].w[idx[i]];
      }
      if (fib)
        wt *= amplitude_algebra(amp, u);
      else if (inner_fixed)
        wt *= bump(norm2(u.data(), m) / amp.R);
      if (wt == 0.0) continue;
      ix.insert(ix.end(), u.begin(), u.end());
      iw.push_back(wt);
    } while (next_index(idx, size, 0));
  }
  const std::size_t ni = iw.size();
  const bool shifted = fib ? amp.p0 != 0.0 : s0.norm() > 0.0;

  std::vector<int> qsize;
  for (const auto& r : qr) qsize.push_back(int(r.size()));
  struct BlockOut {
    cplx sum;
    double evals = 0.0;
  };
  auto block = [&](int i0) {
    std::vector<cplx> terms;
    BlockOut bo;
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    idx[0] = i0;
    std::vector<double> q(static_cast<std::size_t>(n));
    std::vector<double> K(static_cast<std::size_t>(n * d));
    double wv[16];
    do {
      double qw = 1.0;
      for (int k = 0; k < n; ++k) {
        q[k] = qr[k].x[idx[k]];
        qw *= qr[k].w[idx[k]];
      }
      if (!a.in_domain(chart, q)) continue;
      double base = amplitude_base(amp, a, chart, q);
      if (base != 0.0 && w) base *= w(q);
      if (base == 0.0) continue;
      const Frame f = frame_at(a, amp, chart, q, nullptr);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) K[i * d + j] = f.K(i, j);
      const double* sh = fib ? f.chat.data() : amp.s0.data();
      cplx acc = 0.0;
      for (std::size_t t = 0; t < ni; ++t) {
        const double* u = &ix[t * m];
        double wt = iw[t];
        if (fib) {
          for (int i = 0; i < n; ++i) {
            double v = 0.0;
            for (int j = 0; j < d; ++j) v += K[i * d + j] * u[j];
            wv[i] = v;
          }
        } else {
          if (!inner_fixed) {
            double r2 = 0.0;
            for (int i = 0; i < n; ++i) r2 += (u[i] - f.chat(i)) * (u[i] - f.chat(i));
            wt *= bump(std::sqrt(r2) / amp.R);
            if (wt == 0.0) continue;
          }
          for (int j = 0; j < d; ++j) {
            double v = 0.0;
            for (int i = 0; i < n; ++i) v += K[i * d + j] * u[i];
            wv[j] = v;
          }
        }
        const double h = bump_fourier(hd, Rr * norm2(wv, hd) / mu);
        if (h == 0.0) continue;
        if (shifted) {
          double ph = 0.0;
          for (int i = 0; i < hd; ++i) ph += sh[i] * wv[i];
          acc += wt * h * cis(ph / mu);
        } else {
          acc += wt * h;
        }
      }
      bo.evals += double(ni);
      terms.push_back(qw * base * f.detL * acc);
    } while (next_index(idx, qsize, 1));
    bo.sum = pairwise_sum(terms.data(), terms.size());
    return bo;
  };
  const auto blocks = parallel_map<BlockOut>(qsize[0], block);
  std::vector<cplx> sums;
  for (const auto& b : blocks) {
    sums.push_back(b.sum);
    res.evaluations += b.evals;
  }
  res.I = pairwise_sum(sums.data(), sums.size()) * vol * std::pow(Rr, hd);
  return res;
}

OracleResult brute_force_I(const GroupActionSpec& a, const AmplitudeSpec& amp, double mu,
                           const QuadratureConfig& cfg) {
  return brute_force_chart(a, amp, mu, a.info().principal_chart, nullptr, cfg);
}

// ---------------------------------------------------------------- fits

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw FitError("slope needs two matching samples");
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) throw FitError("log-log slope of a non-positive value");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0) throw FitError("degenerate abscissae");
  return sxy / sxx;
}

std::vector<double> mu_grid(double mu_max, double mu_min, int points) {
  if (points < 2 || !(mu_max > mu_min) || !(mu_min > 0)) throw DomainError("mu grid needs mu_max > mu_min > 0");
  std::vector<double> v;
  for (int k = 0; k < points; ++k) v.push_back(mu_max * std::pow(mu_min / mu_max, double(k) / (points - 1)));
  return v;
}

AsymptoticFit fit_asymptotics(const std::vector<double>& mu, const std::vector<cplx>& I,
                              std::optional<int> kappa_known, std::optional<cplx> L0_ref) {
  if (mu.size() != I.size()) throw FitError("mu and I differ in length");
  if (mu.size() < 4) throw FitError("fit needs at least 4 samples");
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (!(mu[i] > 0)) throw FitError("mu must be positive");
    if (i > 0 && !(mu[i] < mu[i - 1])) throw FitError("mu values must be strictly decreasing");
  }
  bool all_small = true;
  for (const auto& v : I)
    if (std::abs(v) >= 1e-14) all_small = false;
  if (all_small) throw FitError("degenerate fit: all |I| below 1e-14");

  AsymptoticFit f;
  f.mu_values = mu;
  f.I_values = I;
  std::vector<double> absI;
  for (const auto& v : I) absI.push_back(std::max(std::abs(v), 1e-300));
  f.kappa_hat = loglog_slope(mu, absI);
  f.kappa_used = kappa_known ? *kappa_known : int(std::lround(f.kappa_hat));

  const std::size_t n = mu.size();
  std::vector<cplx> r(n);
  cplx mean = 0.0;
  double mm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = I[i] / std::pow(kTwoPi * mu[i], f.kappa_used);
    mean += r[i];
    mm += mu[i];
  }
  mean /= double(n);
  mm /= double(n);
  f.L0_hat = mean;
  cplx sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (mu[i] - mm) * (r[i] - mean);
    sxx += (mu[i] - mm) * (mu[i] - mm);
  }
  f.L0_intercept = mean - (sxy / sxx) * mm;

  const cplx L = L0_ref ? *L0_ref : f.L0_intercept;
  std::vector<double> res;
  for (std::size_t i = 0; i < n; ++i)
    res.push_back(std::max(std::abs(I[i] - std::pow(kTwoPi * mu[i], f.kappa_used) * L), 1e-300));
  f.residual_slope = loglog_slope(mu, res);
  return f;
}

// ---------------------------------------------------------------- cut-offs

double cutoff_weight(const GroupActionSpec& a, const PhasePoint& pt, double eps) {
  if (!(eps > 0)) throw DomainError("cut-off radius must be positive");
  const auto x = a.embed<double>(pt.chart, pt.q);
  const auto xi = covector_to_ambient(a, pt.chart, pt.q, pt.p);
  const double dist = a.sing_omega_distance(x, xi);
  if (!std::isfinite(dist)) return 0.0;
  return smooth_step((dist - eps) / (2.0 * eps));
}

CutoffResult cutoff_convergence(const GroupActionSpec& a, const AmplitudeSpec& amp, const std::vector<double>& eps,
                                const QuadratureConfig& cfg) {
  CutoffResult r;
  if (!has_singular_stratum(a)) return r;
  r.applicable = true;
  r.eps = eps;
  if (amp.zero) {
    r.L0_eps.assign(eps.size(), 0.0);
    return r;
  }
  r.L0 = leading_coefficient(a, amp, cfg).value;
  const auto g = cached_grid(a, amp, fine_nodes(cfg), cfg.convention);
  for (double e : eps) {
    if (!(e > 0)) throw DomainError("cut-off radius must be positive");
    r.L0_eps.push_back(integrate_on(*g, [&](const PhasePoint& pt) {
      const double v = amplitude(amp, a, pt);
      return v == 0.0 ? 0.0 : v * (1.0 - cutoff_weight(a, pt, e));
    }));
  }
  return r;
}

double chain_partition(const IsotropyChain& ch, const std::vector<double>& ambient) {
  const double d = ch.center_distance(ambient) / ch.info().tube_radius;
  return smooth_step((d - 0.5) / 0.5);
}

double sphere_chart_weight(const std::vector<double>& v, int rho) {
  const int c = int(v.size());
  if (rho < 0 || rho >= c) throw DomainError("no such normal sphere chart");
  const double x0 = 0.5 / c;
  auto f = [&](double x) { return 1.0 - smooth_step((x - x0) / x0); };
  double s = 0.0;
  for (double x : v) s += f(x * x);
  return s > 0 ? f(v[rho] * v[rho]) / s : 0.0;
}

// ---------------------------------------------------------------- resolved charts

namespace {

// Chain-side data at a (tau, qv) node of a pole-type chain.
struct ChainNode {
  bool live = false;
  std::vector<double> m;
  double weight = 0.0;   // Phi~ u_rho chi_chain base
  double tilde = 0.0;
  Frame frame;
  Mat W;                 // n x e, columns F_k
};

ChainNode chain_node(const GroupActionSpec& a, int chain, const AmplitudeSpec& amp, double tau,
                     const std::vector<double>& qv, int rho) {
  const IsotropyChain& ch = a.chains()[chain];
  const int n = a.n(), e = ch.info().levels[0].e, c = ch.info().levels[0].c;
  ChainNode nd;
  std::vector<double> beta(static_cast<std::size_t>(e), 0.0);
  const BlowupPoint bp = pole_point(chain, ch, tau, qv, rho, beta, n);
  const WeakEval<double> ev = weak_eval<double>(a, ch, weak_inputs(bp));
  nd.m = ev.m;
  if (!a.in_domain(ch.chart(), nd.m)) return nd;
  const double chi = chain_partition(ch, a.embed<double>(ch.chart(), nd.m));
  if (chi == 0.0) return nd;
  const double base = amplitude_base(amp, a, ch.chart(), nd.m);
  if (base == 0.0) return nd;
  const double u = sphere_chart_weight(normal_sphere_point<double>(qv, rho, c), rho);
  if (u == 0.0) return nd;
  nd.tilde = jacobian_power(a, bp).tilde;
  nd.weight = nd.tilde * u * chi * base;
  nd.frame = frame_at(a, amp, ch.chart(), nd.m, nullptr);
  nd.W = Mat(n, e);
  for (int k = 0; k < e; ++k)
    for (int i = 0; i < n; ++i) nd.W(i, k) = ev.F[k][i];
  nd.live = true;
  return nd;
}

}  // namespace

EpsilonSplit epsilon_split_diagnostic(const GroupActionSpec& a, int chain, const AmplitudeSpec& amp, double mu,
                                      bool with_direct, const QuadratureConfig& cfg) {
  if (chain < 0 || chain >= int(a.chains().size())) throw DomainError("no such chain");
  if (!(mu > 0)) throw DomainError("mu must be positive");
  EpsilonSplit r;
  r.mu = mu;
  const IsotropyChain& ch = a.chains()[chain];
  if (!pole_type(ch)) return r;
  r.applicable = true;
  r.eps = mu;  // N = 1
  if (amp.zero) return r;
  const int n = a.n(), c = ch.info().levels[0].c, e = ch.info().levels[0].e, nq = c - 1;
  const double T = chain_tau_extent(a, chain);
  const double qbox = sphere_chart_box(c);
  const double vol = algebra_volume(a);

  // frequency bounds from samples of w = tau L^T W beta
  std::vector<double> freq(static_cast<std::size_t>(1 + nq + e), 0.0);
  {
    Rng rng(0xe95);
    auto wfun = [&](const std::vector<double>& x, int rho, double* mag) {
      const ChainNode nd = chain_node(a, chain, amp, x[0], std::vector<double>(x.begin() + 1, x.begin() + 1 + nq), rho);
      if (nd.m.empty() || !a.in_domain(ch.chart(), nd.m)) return std::numeric_limits<double>::quiet_NaN();
      const Frame f = frame_at(a, amp, ch.chart(), nd.m, nullptr);
      Mat W(n, e);
      {
        std::vector<double> beta(static_cast<std::size_t>(e), 0.0);
        const auto ev = weak_eval<double>(a, ch, weak_inputs(pole_point(chain, ch, x[0], std::vector<double>(x.begin() + 1, x.begin() + 1 + nq), rho, beta, n)));
        for (int k = 0; k < e; ++k)
          for (int i = 0; i < n; ++i) W(i, k) = ev.F[k][i];
      }
      const VecX beta = Eigen::Map<const VecX>(x.data() + 1 + nq, e);
      const VecX wv = x[0] * (f.L.transpose() * (W * beta));
      *mag = wv.norm();
      return f.chat.dot(wv);
    };
    for (int s = 0; s < 400; ++s) {
      std::vector<double> x;
      x.push_back(rng.uniform(-T, T));
      for (int i = 0; i < nq; ++i) x.push_back(rng.uniform(-qbox, qbox));
      for (int i = 0; i < e; ++i) x.push_back(amp.s0[i] + rng.uniform(-amp.R_s, amp.R_s));
      const int rho = rng.index(c);
      double m0;
      if (std::isnan(wfun(x, rho, &m0))) continue;
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double h = 1e-5;
        auto xp = x, xm = x;
        xp[k] += h;
        xm[k] -= h;
        double a1, a2;
        const double p1 = wfun(xp, rho, &a1), p2 = wfun(xm, rho, &a2);
        if (std::isnan(p1) || std::isnan(p2)) continue;
        freq[k] = std::max(freq[k], (amp.R * std::fabs(a1 - a2) + std::fabs(p1 - p2)) / (2 * h * mu));
      }
    }
  }
  // tau and qv carry the smooth-step partitions, which need more than the base resolution
  QuadratureConfig pcfg = cfg;
  pcfg.base_nodes = kPartitionFactor * cfg.base_nodes;
  std::vector<Rule> rest;
  for (int i = 0; i < nq; ++i) rest.push_back(composite_gl(-qbox, qbox, nodes_for(2 * qbox, freq[1 + i], pcfg) / 8));
  for (int i = 0; i < e; ++i)
    rest.push_back(composite_gl(amp.s0[i] - amp.R_s, amp.s0[i] + amp.R_s, nodes_for(2 * amp.R_s, freq[1 + nq + i], cfg) / 8));
  std::vector<int> qsize;
  for (int i = 0; i < nq; ++i) qsize.push_back(int(rest[i].size()));
  // beta nodes with the algebra amplitude folded in
  std::vector<std::vector<double>> bx;
  std::vector<double> bw;
  {
    std::vector<int> idx(static_cast<std::size_t>(e), 0), size;
    for (int i = 0; i < e; ++i) size.push_back(int(rest[nq + i].size()));
    std::vector<double> b(static_cast<std::size_t>(e));
    do {
      double wt = 1.0;
      for (int i = 0; i < e; ++i) {
        b[i] = rest[nq + i].x[idx[i]];
        wt *= rest[nq + i].w[idx[i]];
      }
      wt *= amplitude_algebra(amp, b);  // X = sum beta_k B_k with B the standard basis
      if (wt == 0.0) continue;
      bx.push_back(b);
      bw.push_back(wt);
    } while (next_index(idx, size, 0));
  }
  const double Rn = std::pow(amp.R, n);

  auto tau_integral = [&](const Rule& tr) {
    auto block = [&](int it) {
      std::vector<cplx> terms;
      const double tau = tr.x[it];
      for (int rho = 0; rho < c; ++rho) {
        std::vector<int> idx(static_cast<std::size_t>(nq), 0);
        std::vector<double> qv(static_cast<std::size_t>(nq));
        do {
          double qw = tr.w[it];
          for (int i = 0; i < nq; ++i) {
            qv[i] = rest[i].x[idx[i]];
            qw *= rest[i].w[idx[i]];
          }
          const ChainNode nd = chain_node(a, chain, amp, tau, qv, rho);
          if (!nd.live) continue;
          const Mat LW = tau * (nd.frame.L.transpose() * nd.W);
          cplx acc = 0.0;
          for (std::size_t t = 0; t < bw.size(); ++t) {
            const VecX wv = LW * Eigen::Map<const VecX>(bx[t].data(), e);
            const double h = bump_fourier(n, amp.R * wv.norm() / mu);
            if (h == 0.0) continue;
            acc += bw[t] * h * cis(nd.frame.chat.dot(wv) / mu);
          }
          terms.push_back(qw * nd.weight * nd.frame.detL * acc);
        } while (next_index(idx, qsize, 0));
      }
      return pairwise_sum(terms.data(), terms.size());
    };
    const auto sums = parallel_map<cplx>(int(tr.size()), block);
    return pairwise_sum(sums.data(), sums.size()) * vol * Rn;
  };

  const double eps = std::min(r.eps, T);
  auto rule_on = [&](double lo, double hi) {
    const int base = std::max(cfg.base_nodes, int(pcfg.base_nodes * (hi - lo) / (2 * T)));
    QuadratureConfig c = cfg;
    c.base_nodes = base;
    return composite_gl(lo, hi, nodes_for(hi - lo, freq[0], c) / 8);
  };
  if (eps < T) {
    Rule outer = rule_on(-T, -eps);
    const Rule right = rule_on(eps, T);
    outer.x.insert(outer.x.end(), right.x.begin(), right.x.end());
    outer.w.insert(outer.w.end(), right.w.begin(), right.w.end());
    r.I1 = tau_integral(outer);
  }
  r.I2 = tau_integral(rule_on(-eps, eps));

  if (with_direct) {
    const PointWeight wchi = [&](const std::vector<double>& q) {
      return chain_partition(ch, a.embed<double>(ch.chart(), q));
    };
    r.direct = brute_force_chart(a, amp, mu, ch.chart(), wchi, cfg).I;
    r.has_direct = true;
  }
  return r;
}

ResolvedL0 resolved_leading_coefficient(const GroupActionSpec& a, const AmplitudeSpec& amp,
                                        const QuadratureConfig& cfg) {
  ResolvedL0 r;
  if (a.chains().empty()) return r;
  for (const auto& ch : a.chains())
    if (!pole_type(ch)) return r;
  r.applicable = true;
  if (amp.zero) {
    r.chain_terms.assign(a.chains().size(), 0.0);
    return r;
  }
  const int n = a.n(), kappa = a.kappa();
  const int nodes = fine_nodes(cfg);
  const int pc = a.info().principal_chart;

  const auto g = cached_grid(a, amp, nodes, cfg.convention);
  r.regular = integrate_on(*g, [&](const PhasePoint& pt) {
    const double v = amplitude(amp, a, pt);
    if (v == 0.0) return 0.0;
    const auto x = a.embed<double>(pc, pt.q);
    double keep = 1.0;
    for (const auto& ch : a.chains()) keep -= chain_partition(ch, x);
    return v * keep;
  });
  r.total = r.regular;

  const double vol = algebra_volume(a);
  const Rule tq = gauss_legendre(nodes);
  for (int chain = 0; chain < int(a.chains().size()); ++chain) {
    const IsotropyChain& ch = a.chains()[chain];
    const int c = ch.info().levels[0].c, nq = c - 1;
    const double T = chain_tau_extent(a, chain), qbox = sphere_chart_box(c);
    const Rule tr = composite_gl(-T, T, std::max(2, kPartitionFactor * nodes / 8));
    const Rule qr = composite_gl(-qbox, qbox, std::max(1, kPartitionFactor * nodes / 8));
    std::vector<int> qsize(static_cast<std::size_t>(nq), int(qr.size()));
    auto block = [&](int it) {
      std::vector<cplx> terms;
      const double tau = tr.x[it];
      for (int rho = 0; rho < c; ++rho) {
        std::vector<int> idx(static_cast<std::size_t>(nq), 0);
        std::vector<double> qv(static_cast<std::size_t>(nq));
        do {
          double qw = tr.w[it];
          for (int i = 0; i < nq; ++i) {
            qv[i] = qr.x[idx[i]];
            qw *= qr.w[idx[i]];
          }
          const ChainNode nd = chain_node(a, chain, amp, tau, qv, rho);
          if (!nd.live) continue;
          // critical set of the (beta, p) phase: beta = 0, p in Ann(W)
          const Eigen::JacobiSVD<Mat> svd(nd.W);
          const VecX sv = svd.singularValues();
          double sdet = 1.0;
          int rank = 0;
          for (long i = 0; i < sv.size(); ++i)
            if (sv(i) > kRankTol * sv(0)) {
              sdet *= sv(i);
              ++rank;
            }
          if (rank != kappa) throw DegenerateTransversal("weak Hessian rank differs from 2 kappa");
          const Mat ann = nullspace(nd.W.transpose());
          if (ann.cols() != 1 && n - kappa > 1) {
            // tensor grid over Ann(W) is only needed beyond one dimension; catalogue chains have one
          }
          double pre = qw * nd.weight / std::pow(std::fabs(tau), kappa) / sdet * vol;
          // integrate the fiber amplitude along each annihilator direction
          cplx acc = 0.0;
          if (ann.cols() == 1) {
            const VecX dir = ann.col(0);
            const Mat gm = metric_matrix(a, ch.chart(), nd.m);
            const double an = std::sqrt(dir.dot(gm.ldlt().solve(dir)));
            double th = 0.0;
            if (amp.p0 != 0.0) th = std::fabs(amp.p0) * fiber_norm(a, ch.chart(), nd.m, a.fiber_form<double>(ch.chart(), nd.m));
            const double tmax = (amp.R + th) / an;
            std::vector<double> p(static_cast<std::size_t>(n));
            const std::vector<double> X(static_cast<std::size_t>(a.d()), 0.0);
            for (std::size_t k = 0; k < tq.size(); ++k) {
              const double t = tmax * tq.x[k];
              for (int i = 0; i < n; ++i) p[i] = t * dir(i);
              acc += tmax * tq.w[k] * amplitude_fiber(amp, a, ch.chart(), nd.m, p) * amplitude_algebra(amp, X);
            }
          } else if (ann.cols() == 0) {
            acc = amplitude_algebra(amp, std::vector<double>(static_cast<std::size_t>(a.d()), 0.0)) *
                  amplitude_fiber(amp, a, ch.chart(), nd.m, std::vector<double>(static_cast<std::size_t>(n), 0.0));
          } else {
            throw DomainError("resolved coefficient supports annihilators of dimension at most one");
          }
          terms.push_back(pre * acc);
        } while (next_index(idx, qsize, 0));
      }
      return pairwise_sum(terms.data(), terms.size());
    };
    const auto sums = parallel_map<cplx>(int(tr.size()), block);
    const cplx term = pairwise_sum(sums.data(), sums.size());
    r.chain_terms.push_back(term);
    r.total += term;
  }
  return r;
}

}  // namespace equivar
