// equivar: command-line front end.  Records go to stdout as JSON lines (or a
// plain table without --json); the run manifest and a summary go to stderr.
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "equivar/acceptance.hpp"
#include "equivar/asymptotics.hpp"
#include "equivar/catalogue.hpp"
#include "equivar/critical.hpp"
#include "equivar/errors.hpp"
#include "equivar/resolution.hpp"
#include "json.hpp"

using json = nlohmann::json;
using namespace equivar;

namespace {

constexpr const char* kVersion = "0.1.0";

std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Options {
  std::string action = "circle_on_sphere";
  std::string amplitude;
  int chain = 0;
  int samples = 100;
  std::uint64_t seed = 1;
  double mu_min = 0.02, mu_max = 0.1;
  int mu_points = 0;  // 0: 6 for full, 4 for quick
  std::string convention = "quarter";
  bool json = false;
  std::string csv;
  std::string budget = "full";
};

// Output sink: every emitted byte passes through here so the checksum covers stdout exactly.
class Out {
 public:
  explicit Out(bool json) : json_(json) {}
  void record(const json& j, const std::string& text) {
    write(json_ ? j.dump() : text);
  }
  void write(const std::string& line) {
    const std::string s = line + "\n";
    std::fwrite(s.data(), 1, s.size(), stdout);
    hash_ = fnv1a(s, hash_);
  }
  std::uint64_t checksum() const { return hash_; }

 private:
  bool json_;
  std::uint64_t hash_ = 1469598103934665603ull;
};

struct CsvRow {
  double mu, re, im, resid;
};

void write_csv(const std::string& path, const std::vector<CsvRow>& rows) {
  if (path.empty()) return;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot open " + path);
  f << "mu,re_I,im_I,abs_residual\r\n";
  for (const auto& r : rows) f << g17(r.mu) << ',' << g17(r.re) << ',' << g17(r.im) << ',' << g17(r.resid) << "\r\n";
}

QuadratureConfig config(const Options& o) {
  QuadratureConfig c;
  c.convention = o.convention == "unit" ? SignatureConvention::kUnit : SignatureConvention::kQuarter;
  return c;
}

const AmplitudeSpec& amplitude(const Options& o) {
  return load_amplitude(o.action, o.amplitude.empty() ? default_amplitude(o.action) : o.amplitude);
}

int mu_points(const Options& o) { return o.mu_points > 0 ? o.mu_points : (o.budget == "quick" ? 4 : 6); }

// ------------------------------------------------------------------ commands

int cmd_list_actions(const Options&, Out& out, std::string& summary) {
  const auto names = list_actions();
  for (const auto& name : names) {
    const auto& a = load_action(name);
    json strata = json::array();
    std::string text = name + "  n=" + std::to_string(a.n()) + " d=" + std::to_string(a.d()) +
                       " kappa=" + std::to_string(a.kappa()) + "  strata:";
    for (const auto& s : a.info().strata) {
      strata.push_back({{"label", s.label}, {"locus", s.locus}, {"isotropy_dim", s.e}, {"normal_dim", s.c},
                        {"complement_dim", s.d}, {"components", s.components}, {"principal", s.principal}});
      text += " " + s.label + "(e=" + std::to_string(s.e) + ",c=" + std::to_string(s.c) + ")";
    }
    json chains = json::array();
    for (const auto& c : a.chains()) chains.push_back({{"label", c.info().label}, {"depth", c.depth()}});
    out.record({{"record", "action"}, {"name", name}, {"n", a.n()}, {"d", a.d()}, {"kappa", a.kappa()},
                {"extended", a.info().extended}, {"strata", strata}, {"chains", chains},
                {"amplitudes", list_amplitudes(name)}},
               text);
  }
  summary = std::to_string(names.size()) + " actions";
  return 0;
}

int cmd_verify_critical(const Options& o, Out& out, std::string& summary) {
  const auto& a = load_action(o.action);
  const double tol = 1e-10;
  int failed = 0, index = 0, first_failed = -1;
  for (const auto& pt : regular_critical_points(a, o.samples, o.seed)) {
    json j{{"record", "critical_sample"}, {"index", index}, {"chart", pt.chart}};
    bool pass = false;
    std::string text = "#" + std::to_string(index);
    try {
      const CriticalSample s = certify_regular_critical(a, pt, tol);
      pass = s.rank == 2 * a.kappa() && s.grad_norm <= tol && std::fabs(s.psi) <= tol;
      j.update({{"grad_norm", s.grad_norm}, {"psi", s.psi}, {"rank", s.rank}, {"expected_rank", 2 * a.kappa()},
                {"signature", s.signature}, {"kernel_dim", s.kernel_dim}, {"tol", tol}});
      text += " grad=" + g17(s.grad_norm) + " rank=" + std::to_string(s.rank) +
              " signature=" + std::to_string(s.signature) + " kernel=" + std::to_string(s.kernel_dim);
    } catch (const Error& e) {
      j["error"] = e.what();
      text += std::string(" error: ") + e.what();
    }
    j["pass"] = pass;
    out.record(j, text + (pass ? "  ok" : "  FAIL"));
    if (!pass && first_failed < 0) first_failed = index;
    failed += !pass;
    ++index;
  }
  summary = std::to_string(index - failed) + "/" + std::to_string(index) + " samples certified";
  if (failed) summary += "; first failing sample #" + std::to_string(first_failed);
  return failed ? 1 : 0;
}

int cmd_resolve_check(const Options& o, Out& out, std::string& summary) {
  const auto& a = load_action(o.action);
  if (o.chain < 0 || o.chain >= int(a.chains().size()))
    throw DomainError(o.action + " has no chain " + std::to_string(o.chain));
  const double tol = 1e-10;
  Rng rng(o.seed);
  double max_resid = 0.0, min_eig = INFINITY;
  int min_rank = 1 << 30, failed = 0, first_failed = -1;
  for (int i = 0; i < o.samples; ++i) {
    const BlowupPoint bp = random_blowup_point(a, o.chain, rng, i % 2 == 0 ? 1 : 2);
    const WeakTransformReport f = weak_transform_phase(a, bp);
    const WeakTransformReport h = certify_weak_hessian(a, bp);
    const bool pass = f.factor_residual <= tol && h.wk_hess_rank == 2 * a.kappa();
    max_resid = std::max(max_resid, f.factor_residual);
    min_rank = std::min(min_rank, h.wk_hess_rank);
    min_eig = std::min(min_eig, h.min_nonzero_eig);
    if (!pass && first_failed < 0) first_failed = i;
    failed += !pass;
    out.record({{"record", "weak_transform"}, {"index", i}, {"psi_tot", f.psi_tot}, {"psi_wk", f.psi_wk},
                {"factor", f.factor}, {"factor_residual", f.factor_residual}, {"cond_I", f.cond_I},
                {"cond_II", f.cond_II}, {"cond_III", f.cond_III}, {"wk_hess_rank", h.wk_hess_rank},
                {"expected_rank", 2 * a.kappa()}, {"min_nonzero_eig", h.min_nonzero_eig},
                {"kernel_dim", h.kernel_dim}, {"kernel_angle", h.kernel_angle},
                {"block_residual", h.block_residual}, {"tol", tol}, {"pass", pass}},
               "#" + std::to_string(i) + " residual=" + g17(f.factor_residual) +
                   " rank=" + std::to_string(h.wk_hess_rank) + " min_eig=" + g17(h.min_nonzero_eig) +
                   (pass ? "  ok" : "  FAIL"));
  }
  out.record({{"record", "summary"}, {"max_residual", max_resid}, {"min_rank", min_rank},
              {"min_nonzero_eig", min_eig}, {"failed", failed}, {"pass", failed == 0}},
             "max residual " + g17(max_resid) + ", min rank " + std::to_string(min_rank) +
                 ", min nonzero eig " + g17(min_eig));
  summary = std::to_string(o.samples - failed) + "/" + std::to_string(o.samples) + " blow-up samples certified";
  if (failed) summary += "; first failing sample #" + std::to_string(first_failed);
  return failed ? 1 : 0;
}

int cmd_compute_l0(const Options& o, Out& out, std::string& summary) {
  const auto& a = load_action(o.action);
  const auto& amp = amplitude(o);
  const QuadratureConfig cfg = config(o);
  const L0Result r = leading_coefficient(a, amp, cfg);
  json j{{"record", "L0"}, {"action", o.action}, {"amplitude", amp.id}, {"re_L0", r.value.real()},
         {"im_L0", r.value.imag()}, {"rel_change", r.rel_change}, {"tol", cfg.l0_tol}, {"nodes", r.nodes},
         {"pass", r.rel_change <= cfg.l0_tol}};
  std::string text = o.action + "/" + amp.id + "  L0 = " + g17(r.value.real());
  try {
    const ReferenceValue ref = reference_L0(o.action, amp.id);
    j["reference"] = ref.value;
    j["provenance"] = ref.provenance;
    text += "  reference " + g17(ref.value);
  } catch (const UnknownName&) {
  }
  out.record(j, text);
  write_csv(o.csv, {{0.0, r.value.real(), r.value.imag(), std::abs(r.value - r.coarse)}});
  summary = text;
  return 0;
}

struct SweepOut {
  std::vector<double> mu;
  std::vector<cplx> I;
  cplx L0;
};

SweepOut sweep(const Options& o, Out& out) {
  const auto& a = load_action(o.action);
  const auto& amp = amplitude(o);
  const QuadratureConfig cfg = config(o);
  SweepOut s;
  s.L0 = leading_coefficient_L0(a, amp, cfg);
  s.mu = mu_grid(o.mu_max, o.mu_min, mu_points(o));
  std::vector<CsvRow> rows;
  for (double m : s.mu) {
    const OracleResult r = brute_force_I(a, amp, m, cfg);
    const double resid = std::abs(r.I - std::pow(2 * M_PI * m, a.kappa()) * s.L0);
    s.I.push_back(r.I);
    rows.push_back({m, r.I.real(), r.I.imag(), resid});
    out.record({{"record", "sample"}, {"mu", m}, {"re_I", r.I.real()}, {"im_I", r.I.imag()},
                {"abs_residual", resid}, {"reduction", r.reduction}, {"nodes", r.nodes},
                {"evaluations", r.evaluations}},
               "mu=" + g17(m) + "  I=" + g17(r.I.real()) + (r.I.imag() < 0 ? "" : "+") + g17(r.I.imag()) +
                   "i  residual=" + g17(resid));
  }
  write_csv(o.csv, rows);
  return s;
}

int cmd_sweep_mu(const Options& o, Out& out, std::string& summary) {
  const SweepOut s = sweep(o, out);
  summary = std::to_string(s.mu.size()) + " oracle evaluations, L0 = " + g17(s.L0.real());
  return 0;
}

int cmd_fit(const Options& o, Out& out, std::string& summary) {
  const auto& a = load_action(o.action);
  const SweepOut s = sweep(o, out);
  const AsymptoticFit f = fit_asymptotics(s.mu, s.I, a.kappa());
  const double kappa_tol = 0.1, l0_tol = 0.05;
  const double l0_err = std::abs(f.L0_hat - s.L0) / std::abs(s.L0);
  const bool pass = std::fabs(f.kappa_hat - a.kappa()) <= kappa_tol && l0_err <= l0_tol;
  out.record({{"record", "fit"}, {"kappa", a.kappa()}, {"kappa_hat", f.kappa_hat}, {"kappa_tol", kappa_tol},
              {"re_L0", s.L0.real()}, {"re_L0_hat", f.L0_hat.real()}, {"im_L0_hat", f.L0_hat.imag()},
              {"re_L0_intercept", f.L0_intercept.real()}, {"L0_rel_err", l0_err}, {"L0_tol", l0_tol},
              {"residual_slope", f.residual_slope}, {"pass", pass}},
             "kappa_hat=" + g17(f.kappa_hat) + "  L0_hat=" + g17(f.L0_hat.real()) + "  L0=" + g17(s.L0.real()) +
                 "  residual slope=" + g17(f.residual_slope) + (pass ? "  ok" : "  FAIL"));
  summary = "kappa_hat " + g17(f.kappa_hat) + ", L0 relative error " + g17(l0_err);
  return pass ? 0 : 1;
}

int cmd_cutoff(const Options& o, Out& out, std::string& summary) {
  const auto& a = load_action(o.action);
  const CutoffResult c = cutoff_convergence(a, amplitude(o), {0.2, 0.1, 0.05, 0.025}, config(o));
  if (!c.applicable) {
    out.record({{"record", "cutoff"}, {"applicable", false}, {"pass", true}}, o.action + ": no singular stratum");
    summary = "not applicable";
    return 0;
  }
  std::vector<CsvRow> rows;
  bool mono = true;
  double prev = INFINITY;
  for (std::size_t i = 0; i < c.eps.size(); ++i) {
    const double dev = std::abs(c.L0_eps[i] - c.L0);
    mono = mono && dev < prev;
    prev = dev;
    rows.push_back({c.eps[i], c.L0_eps[i].real(), c.L0_eps[i].imag(), dev});
    out.record({{"record", "cutoff"}, {"eps", c.eps[i]}, {"re_L0_eps", c.L0_eps[i].real()},
                {"im_L0_eps", c.L0_eps[i].imag()}, {"abs_deviation", dev}},
               "eps=" + g17(c.eps[i]) + "  L0_eps=" + g17(c.L0_eps[i].real()) + "  deviation=" + g17(dev));
  }
  out.record({{"record", "summary"}, {"re_L0", c.L0.real()}, {"monotone", mono}, {"pass", mono}},
             "L0=" + g17(c.L0.real()) + (mono ? "  monotone" : "  NOT monotone"));
  write_csv(o.csv, rows);
  summary = mono ? "deviation decreases with eps" : "deviation not monotone";
  return mono ? 0 : 1;
}

int cmd_all(const Options& o, Out& out, std::string& summary) {
  AcceptanceOptions opt;
  opt.budget = o.budget == "quick" ? Budget::kQuick : Budget::kFull;
  opt.seed = o.seed;
  opt.convention = config(o).convention;
  int failed = 0, total = 0;
  run_acceptance(opt, [&](const CriterionResult& r) {
    json metrics = json::array();
    for (const auto& m : r.metrics)
      metrics.push_back({{"name", m.name}, {"value", m.value}, {"bound", m.bound}, {"pass", m.pass}});
    // wall time stays on stderr so stdout is reproducible
    out.record({{"record", "criterion"}, {"id", r.id}, {"name", r.name}, {"metrics", metrics},
                {"note", r.note}, {"pass", r.pass}},
               format_criterion(r));
    std::fprintf(stderr, "criterion %d: %.1f s\n", r.id, r.seconds);
    failed += !r.pass;
    ++total;
  });
  summary = std::to_string(total - failed) + "/" + std::to_string(total) + " criteria passed";
  return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equivariant oscillatory integrals: critical sets, resolution checks and I(mu) asymptotics"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* c) {
    c->add_option("--action", o.action, "catalogue action");
    c->add_option("--amplitude", o.amplitude, "amplitude id (default per action)");
    c->add_option("--chain", o.chain, "isotropy chain index");
    c->add_option("--samples", o.samples, "sample count")->check(CLI::NonNegativeNumber);
    c->add_option("--seed", o.seed, "random seed");
    c->add_option("--mu-min", o.mu_min)->check(CLI::PositiveNumber);
    c->add_option("--mu-max", o.mu_max)->check(CLI::PositiveNumber);
    c->add_option("--mu-points", o.mu_points)->check(CLI::Range(2, 64));
    c->add_option("--signature-convention", o.convention)->check(CLI::IsMember({"quarter", "unit"}));
    c->add_flag("--json", o.json, "JSON lines on stdout");
    c->add_option("--csv", o.csv, "also write mu,re_I,im_I,abs_residual to PATH");
    c->add_option("--budget", o.budget)->check(CLI::IsMember({"quick", "full"}));
  };
  struct Cmd {
    const char* name;
    const char* help;
    int (*run)(const Options&, Out&, std::string&);
  };
  const Cmd cmds[] = {
      {"list-actions", "describe the catalogue", cmd_list_actions},
      {"verify-critical", "certify sampled points of Reg Crit", cmd_verify_critical},
      {"resolve-check", "weak transform and weak Hessian on a chain chart", cmd_resolve_check},
      {"compute-l0", "leading coefficient by quadrature over Reg Crit", cmd_compute_l0},
      {"sweep-mu", "brute-force I(mu) on a geometric grid", cmd_sweep_mu},
      {"fit", "sweep and power-law fit", cmd_fit},
      {"cutoff", "L0 with the singular set cut off at shrinking eps", cmd_cutoff},
      {"all", "run the acceptance suite", cmd_all},
  };
  std::vector<CLI::App*> subs;
  for (const auto& c : cmds) {
    subs.push_back(app.add_subcommand(c.name, c.help));
    common(subs.back());
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 2;
  }
  if (o.mu_min >= o.mu_max) {
    std::cerr << "--mu-min must be below --mu-max\n";
    return 2;
  }

  std::size_t which = 0;
  while (!subs[which]->parsed()) ++which;
  const Cmd& cmd = cmds[which];

  std::ostringstream cfg;
  cfg << cmd.name << '|' << o.action << '|' << o.amplitude << '|' << o.chain << '|' << o.samples << '|' << o.seed
      << '|' << g17(o.mu_min) << '|' << g17(o.mu_max) << '|' << mu_points(o) << '|' << o.convention << '|'
      << o.budget << '|' << o.json;

  Out out(o.json);
  std::string summary;
  int code = 0;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    code = cmd.run(o, out, summary);
  } catch (const UnknownName& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::fflush(stdout);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const json manifest{{"command", cmd.name}, {"action", o.action}, {"seed", o.seed},
                      {"config_hash", hex(fnv1a(cfg.str()))}, {"version", kVersion},
                      {"wall_time_s", wall}, {"output_checksum", hex(out.checksum())}};
  std::cerr << summary << (code ? "  [FAILED]" : "") << "\n" << "manifest " << manifest.dump() << "\n";
  return code;
}
