#include "equivar/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "equivar/errors.hpp"

namespace equivar {

namespace {

bool full(const AcceptanceOptions& o) { return o.budget == Budget::kFull; }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Metric at_most(const std::string& name, double v, double bound) {
  return {name, v, "<= " + fmt("%g", bound), v <= bound};
}
Metric at_least(const std::string& name, double v, double bound) {
  return {name, v, ">= " + fmt("%g", bound), v >= bound};
}
Metric within(const std::string& name, double v, double lo, double hi) {
  return {name, v, "in [" + fmt("%g", lo) + ", " + fmt("%g", hi) + "]", v >= lo && v <= hi};
}
Metric flag(const std::string& name, bool ok) { return {name, ok ? 1.0 : 0.0, "== 1", ok}; }

QuadratureConfig config_of(const AcceptanceOptions& o) {
  QuadratureConfig c;
  c.convention = o.convention;
  return c;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

struct Sweep {
  std::vector<double> mu;
  std::vector<cplx> I;
};

Sweep oracle_sweep(const GroupActionSpec& a, const AmplitudeSpec& amp, const std::vector<double>& mu,
                   const QuadratureConfig& cfg) {
  Sweep s;
  s.mu = mu;
  for (double m : mu) s.I.push_back(brute_force_I(a, amp, m, cfg).I);
  return s;
}

// ---------------------------------------------------------------- 1-3

CriterionResult free_baseline(const AcceptanceOptions& o) {
  CriterionResult r;
  r.name = "free baseline (circle_on_circle)";
  const auto& a = load_action("circle_on_circle");
  const auto& amp = load_amplitude(a.name(), "bump_A");
  const auto cfg = config_of(o);
  const cplx L0 = leading_coefficient_L0(a, amp, cfg);
  const cplx I = brute_force_I(a, amp, 0.02, cfg).I;
  r.metrics.push_back(at_most("rel_err_mu_0.02", rel(I, 2 * M_PI * 0.02 * L0), 0.03));
  const Sweep s = oracle_sweep(a, amp, mu_grid(0.1, 0.01, full(o) ? 6 : 4), cfg);
  const AsymptoticFit f = fit_asymptotics(s.mu, s.I, a.kappa(), L0);
  r.metrics.push_back(within("residual_slope", f.residual_slope, 1.8, 2.2));
  r.metrics.push_back({"L0", L0.real(), "", true});
  return r;
}

CriterionResult power_law(const AcceptanceOptions& o, const std::string& action, const std::vector<double>& mu,
                          double klo, double khi) {
  CriterionResult r;
  const auto& a = load_action(action);
  r.name = "power law (" + action + ")";
  const auto& amp = load_amplitude(action, default_amplitude(action));
  const auto cfg = config_of(o);
  const cplx L0 = leading_coefficient_L0(a, amp, cfg);
  const Sweep s = oracle_sweep(a, amp, mu, cfg);
  const AsymptoticFit f = fit_asymptotics(s.mu, s.I, a.kappa());
  r.metrics.push_back(within("kappa_hat", f.kappa_hat, klo, khi));
  r.metrics.push_back(at_most("L0_hat_rel_err", rel(f.L0_hat, L0), 0.05));
  r.metrics.push_back({"L0", L0.real(), "", true});
  r.metrics.push_back({"L0_hat", f.L0_hat.real(), "", true});
  return r;
}

CriterionResult singular_case(const AcceptanceOptions& o) {
  return power_law(o, "circle_on_sphere", mu_grid(0.05, 0.008, full(o) ? 6 : 4), 0.95, 1.05);
}

CriterionResult higher_kappa(const AcceptanceOptions& o) {
  const int pts = full(o) ? 6 : 4;
  return power_law(o, "so3_on_sphere", mu_grid(0.1, 0.1 * std::pow(0.7, pts - 1), pts), 1.9, 2.1);
}

// ---------------------------------------------------------------- 4-6

struct ChainRef {
  const GroupActionSpec* a;
  int chain;
  std::string label() const { return a->name() + "/" + a->chains()[chain].info().label; }
};

std::vector<ChainRef> all_chains() {
  std::vector<ChainRef> v;
  for (const auto& n : all_actions()) {
    const auto& a = load_action(n);
    for (int c = 0; c < int(a.chains().size()); ++c) v.push_back({&a, c});
  }
  return v;
}

CriterionResult factorization(const AcceptanceOptions& o) {
  CriterionResult r;
  r.name = "factorization psi o zeta = prod tau psi_wk";
  const int samples = full(o) ? 10000 : 1000;
  for (const auto& c : all_chains()) {
    Rng rng(o.seed * 7919 + c.chain);
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
      const BlowupPoint bp = random_blowup_point(*c.a, c.chain, rng, i % 3 == 0 ? 1 : 0);
      worst = std::max(worst, weak_transform_phase(*c.a, bp).factor_residual);
    }
    r.metrics.push_back(at_most("max_residual " + c.label(), worst, 1e-10));
  }
  return r;
}

BlowupPoint perturbed(const BlowupPoint& bp, Rng& rng, double h) {
  BlowupPoint q = bp;
  for (auto& al : q.alpha)
    for (auto& v : al) v += rng.uniform(-h, h);
  for (auto& v : q.beta) v += rng.uniform(-h, h);
  for (auto& v : q.p) v += rng.uniform(-h, h);
  return q;
}

CriterionResult first_theorem(const AcceptanceOptions& o) {
  CriterionResult r;
  r.name = "weak gradient vanishes iff conditions (I)-(III)";
  const int per_side = full(o) ? 1000 : 200;
  const double tol = 1e-8;
  for (const auto& c : all_chains()) {
    Rng rng(o.seed * 104729 + c.chain);
    int wrong = 0, crit = 0;
    auto classify = [&](const BlowupPoint& bp) {
      const bool grad0 = weak_gradient(*c.a, bp).cwiseAbs().maxCoeff() <= tol;
      const bool conds = weak_critical_conditions(*c.a, bp, tol).all();
      if (grad0 != conds) ++wrong;
      if (grad0) ++crit;
    };
    for (int i = 0; i < per_side; ++i) classify(random_blowup_point(*c.a, c.chain, rng, i % 4 == 0 ? 2 : 1));
    for (int i = 0; i < per_side; ++i) {
      if (i % 2 == 0) {
        classify(random_blowup_point(*c.a, c.chain, rng, 0));
      } else {
        const BlowupPoint bp = random_blowup_point(*c.a, c.chain, rng, 1);
        classify(perturbed(bp, rng, 1e-6));
      }
    }
    r.metrics.push_back(at_most("misclassified " + c.label(), wrong, 0));
    r.metrics.push_back(at_least("critical_side " + c.label(), crit, per_side));
  }
  return r;
}

double min_eig_at(const GroupActionSpec& a, BlowupPoint bp, double s, Rng& rng) {
  std::fill(bp.sigma.begin(), bp.sigma.end(), s);
  bp.tau = delta_substitution(bp.sigma);
  project_to_weak_critical(a, &bp, rng);
  return certify_weak_hessian(a, bp).min_nonzero_eig;
}

CriterionResult second_theorem(const AcceptanceOptions& o) {
  CriterionResult r;
  r.name = "weak Hessian rank 2 kappa and uniform in sigma";
  const int points = full(o) ? 200 : 40;
  for (const auto& c : all_chains()) {
    const GroupActionSpec& a = *c.a;
    Rng rng(o.seed * 15485863 + c.chain);
    int bad = 0;
    double worst_angle = 0.0, worst_block = 0.0;
    for (int i = 0; i < points; ++i) {
      const BlowupPoint bp = random_blowup_point(a, c.chain, rng, i % 2 == 0 ? 2 : 1);
      const WeakTransformReport w = certify_weak_hessian(a, bp);
      if (w.wk_hess_rank != 2 * a.kappa()) ++bad;
      worst_angle = std::max(worst_angle, w.kernel_angle);
      worst_block = std::max(worst_block, w.block_residual);
    }
    r.metrics.push_back(at_most("rank_failures " + c.label(), bad, 0));
    r.metrics.push_back(at_most("kernel_angle " + c.label(), worst_angle, 1e-6));
    r.metrics.push_back(at_most("block_residual " + c.label(), worst_block, 1e-10));

    // sigma sweep at fixed center, direction and coefficients
    double ratio = std::numeric_limits<double>::infinity();
    for (int t = 0; t < (full(o) ? 8 : 3); ++t) {
      const BlowupPoint bp = random_blowup_point(a, c.chain, rng, 1);
      const double ref = min_eig_at(a, bp, 0.5, rng);
      double lo = std::numeric_limits<double>::infinity();
      for (int k = 0; k <= 36; ++k) lo = std::min(lo, min_eig_at(a, bp, -0.9 + 0.05 * k, rng));
      ratio = std::min(ratio, lo / ref);
    }
    r.metrics.push_back(at_least("sweep_min_over_ref " + c.label(), ratio, 0.1));
  }
  return r;
}

// ---------------------------------------------------------------- 7-9

CriterionResult resolution_independence(const AcceptanceOptions& o) {
  CriterionResult r;
  r.name = "resolution independence (circle_on_sphere)";
  const auto& a = load_action("circle_on_sphere");
  const auto& amp = load_amplitude(a.name(), "bump_B");
  const auto cfg = config_of(o);
  const cplx L0 = leading_coefficient_L0(a, amp, cfg);
  const ResolvedL0 rl = resolved_leading_coefficient(a, amp, cfg);
  r.metrics.push_back(flag("applicable", rl.applicable));
  r.metrics.push_back(at_most("rel_diff", rel(rl.total, L0), 0.01));
  r.metrics.push_back({"L0", L0.real(), "", true});
  r.metrics.push_back({"resolved", rl.total.real(), "", true});
  return r;
}

CriterionResult cutoff_lemma(const AcceptanceOptions& o) {
  CriterionResult r;
  r.name = "cut-off convergence (circle_on_sphere)";
  const auto& a = load_action("circle_on_sphere");
  const auto& amp = load_amplitude(a.name(), "bump_B");
  const std::vector<double> eps = {0.2, 0.1, 0.05, 0.025};
  const CutoffResult c = cutoff_convergence(a, amp, eps, config_of(o));
  r.metrics.push_back(flag("applicable", c.applicable));
  std::vector<double> dev;
  for (const auto& v : c.L0_eps) dev.push_back(rel(v, c.L0));
  r.metrics.push_back(at_most("rel_dev_eps_0.05", dev[2], 0.05));
  bool mono = true;
  for (std::size_t i = 1; i < dev.size(); ++i) mono = mono && dev[i] < dev[i - 1];
  r.metrics.push_back(flag("monotone", mono));
  for (std::size_t i = 0; i < dev.size(); ++i) r.metrics.push_back({"rel_dev_eps_" + fmt("%g", eps[i]), dev[i], "", true});
  return r;
}

CriterionResult epsilon_split(const AcceptanceOptions& o) {
  CriterionResult r;
  r.name = "eps-split remainder scaling (circle_on_sphere)";
  const auto& a = load_action("circle_on_sphere");
  const auto& amp = load_amplitude(a.name(), "bump_B");
  const auto cfg = config_of(o);
  const std::vector<double> mu = {0.04, 0.02, 0.01};
  for (int chain = 0; chain < int(a.chains().size()); ++chain) {
    const std::string lab = a.chains()[chain].info().label;
    std::vector<double> i2;
    for (double m : mu) {
      const EpsilonSplit s = epsilon_split_diagnostic(a, chain, amp, m, m == mu.front(), cfg);
      i2.push_back(std::abs(s.I2));
      if (s.has_direct) r.metrics.push_back(at_most("additivity " + lab, rel(s.I1 + s.I2, s.direct), 1e-4));
    }
    r.metrics.push_back(at_least("I2_slope " + lab, loglog_slope(mu, i2), a.kappa() + 0.9));
  }
  return r;
}

// ---------------------------------------------------------------- 10

Mat fd_hessian(const GroupActionSpec& a, const PhasePoint& pt, double h) {
  const int n = a.n(), d = a.d(), k = 2 * n + d;
  auto f = [&](const VecX& u) {
    PhasePoint x{pt.chart, std::vector<double>(u.data(), u.data() + n),
                 std::vector<double>(u.data() + n, u.data() + 2 * n), std::vector<double>(u.data() + 2 * n, u.data() + k)};
    return phase(a, x);
  };
  VecX u(k);
  for (int i = 0; i < n; ++i) {
    u(i) = pt.q[i];
    u(n + i) = pt.p[i];
  }
  for (int i = 0; i < d; ++i) u(2 * n + i) = pt.s[i];
  Mat H(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      VecX pp = u, pm = u, mp = u, mm = u;
      pp(i) += h; pp(j) += h;
      pm(i) += h; pm(j) -= h;
      mp(i) -= h; mp(j) += h;
      mm(i) -= h; mm(j) -= h;
      H(i, j) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4 * h * h);
    }
  return H;
}

CriterionResult differentiation(const AcceptanceOptions& o) {
  CriterionResult r;
  r.name = "dual Hessians vs finite differences, Reg Crit block form";
  const int points = full(o) ? 100 : 20;
  for (const auto& name : all_actions()) {
    const auto& a = load_action(name);
    const int n = a.n(), d = a.d();
    Rng rng(o.seed * 31337 + n * 7 + d);
    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
      PhasePoint pt;
      pt.chart = rng.index(int(a.info().charts.size()));
      pt.q = random_chart_point(a, pt.chart, rng, 0.2);
      for (int k = 0; k < n; ++k) pt.p.push_back(rng.uniform(-2, 2));
      for (int k = 0; k < d; ++k) pt.s.push_back(rng.uniform(-1, 1));
      const Mat hd = phase_derivatives(a, pt).hess;
      const Mat hf = fd_hessian(a, pt, 1e-4);
      worst = std::max(worst, (hd - hf).cwiseAbs().maxCoeff() / std::max(1.0, hd.cwiseAbs().maxCoeff()));
    }
    r.metrics.push_back(at_most("hess_fd_rel " + name, worst, 1e-5));

    // at certified samples: zero p-p and s-s blocks, p-s block = [X~_1 .. X~_d]
    double block = 0.0;
    int certified = 0;
    for (const auto& cs : sample_regular_critical(a, full(o) ? 100 : 20, o.seed + 17)) {
      ++certified;
      const Mat& h = cs.hess;
      const Mat m = field_matrix(a, cs.pt.chart, cs.pt.q);
      block = std::max({block, h.block(n, n, n, n).cwiseAbs().maxCoeff(), h.block(2 * n, 2 * n, d, d).cwiseAbs().maxCoeff(),
                        (h.block(n, 2 * n, n, d) - m).cwiseAbs().maxCoeff(),
                        (h.block(2 * n, n, d, n) - m.transpose()).cwiseAbs().maxCoeff()});
    }
    // exact up to rounding: the dual pass and the field matrix order their products differently
    r.metrics.push_back(at_most("block_form " + name, block, 16 * std::numeric_limits<double>::epsilon()));
    r.metrics.push_back(at_least("certified " + name, certified, full(o) ? 100 : 20));
  }
  return r;
}

struct Entry {
  const char* name;
  CriterionResult (*run)(const AcceptanceOptions&);
  double limit_seconds;  // 0: none
};

const Entry kCriteria[] = {
    {"free baseline", free_baseline, 60.0},
    {"singular case", singular_case, 600.0},
    {"higher kappa", higher_kappa, 900.0},
    {"factorization", factorization, 0.0},
    {"first fundamental theorem", first_theorem, 0.0},
    {"second fundamental theorem", second_theorem, 0.0},
    {"resolution independence", resolution_independence, 0.0},
    {"cut-off lemma", cutoff_lemma, 0.0},
    {"eps-split bound", epsilon_split, 0.0},
    {"differentiation integrity", differentiation, 0.0},
};

}  // namespace

int acceptance_criterion_count() { return int(sizeof kCriteria / sizeof kCriteria[0]); }

CriterionResult run_criterion(int id, const AcceptanceOptions& opt) {
  if (id < 1 || id > acceptance_criterion_count()) throw DomainError("no acceptance criterion " + std::to_string(id));
  const Entry& e = kCriteria[id - 1];
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = e.run(opt);
  } catch (const Error& ex) {
    r.name = e.name;
    r.note = std::string("error: ") + ex.what();
    r.metrics.push_back(flag("completed", false));
  }
  r.id = id;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (e.limit_seconds > 0 && opt.budget == Budget::kFull)
    r.metrics.push_back(at_most("seconds", r.seconds, e.limit_seconds));
  r.pass = std::all_of(r.metrics.begin(), r.metrics.end(), [](const Metric& m) { return m.pass; });
  return r;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt,
                                            const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= acceptance_criterion_count(); ++id) {
    if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), id) == opt.only.end()) continue;
    out.push_back(run_criterion(id, opt));
    if (on_result) on_result(out.back());
  }
  return out;
}

std::string format_criterion(const CriterionResult& r) {
  std::string s = std::string(r.pass ? "PASS" : "FAIL") + " [" + std::to_string(r.id) + "] " + r.name + ":";
  for (const auto& m : r.metrics) {
    if (m.bound.empty()) continue;
    s += " " + m.name + "=" + fmt("%.6g", m.value);
    if (!m.pass) s += "(" + m.bound + ")";
  }
  s += " (" + fmt("%.1f", r.seconds) + "s)";
  if (!r.note.empty()) s += " " + r.note;
  return s;
}

}  // namespace equivar
