// Leading coefficient over Reg Crit, brute-force oscillatory integrals, power
// law fits, cut-off convergence and the resolved-chart splittings.
#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "equivar/quadrature.hpp"
#include "equivar/resolution.hpp"

namespace equivar {

enum class SignatureConvention { kQuarter, kUnit };
// Which linear block of psi = p . M(q) s is integrated in closed form.
enum class Reduction { kAuto, kFiber, kAlgebra };

struct QuadratureConfig {
  int base_nodes = 64;             // minimum nodes per oracle axis
  double points_per_period = 8.0;
  int l0_nodes = 40;               // nodes per Reg Crit axis (refined once by 3/2)
  double l0_tol = 1e-5;            // relative agreement of the two Reg Crit refinements
  SignatureConvention convention = SignatureConvention::kQuarter;
  Reduction reduction = Reduction::kAuto;
};

cplx signature_factor(int signature, SignatureConvention c);

// Box of a chart containing the support of the base amplitude (times an optional weight).
struct Box {
  std::vector<double> lo, hi;
  std::vector<bool> full_period;
  bool empty = false;
};
using PointWeight = std::function<double(const std::vector<double>& q)>;
Box support_box(const GroupActionSpec& a, const AmplitudeSpec& amp, int chart, const PointWeight& w = nullptr);

// Nodes and weights on Reg Crit: L0 = sum w_k f(z_k) for f = a (times cut-offs).
struct RegCritGrid {
  std::vector<PhasePoint> z;
  std::vector<cplx> w;
  int nodes_per_axis = 0;
};
RegCritGrid reg_crit_grid(const GroupActionSpec& a, const AmplitudeSpec& amp, int nodes, SignatureConvention c);
cplx integrate_on(const RegCritGrid& g, const std::function<double(const PhasePoint&)>& f);

struct L0Result {
  cplx value;
  cplx coarse;           // value at the coarser refinement
  double rel_change = 0.0;
  std::size_t nodes = 0;
};
// Throws QuadratureError if the two refinements differ by more than cfg.l0_tol.
L0Result leading_coefficient(const GroupActionSpec& a, const AmplitudeSpec& amp, const QuadratureConfig& cfg = {});
cplx leading_coefficient_L0(const GroupActionSpec& a, const AmplitudeSpec& amp, const QuadratureConfig& cfg = {});

struct OracleResult {
  cplx I;
  double mu = 0.0;
  std::string reduction;           // "fiber" or "algebra"
  std::vector<int> nodes;          // per axis: chart axes, then the remaining block
  double evaluations = 0.0;
};
// Integral of exp(i psi / mu) a over T*M x g (dX = sqrt det Gram ds), in the
// principal chart, which covers M up to a null set.
OracleResult brute_force_I(const GroupActionSpec& a, const AmplitudeSpec& amp, double mu,
                           const QuadratureConfig& cfg = {});
// Same integral restricted to one chart with the base weight w(q).
OracleResult brute_force_chart(const GroupActionSpec& a, const AmplitudeSpec& amp, double mu, int chart,
                               const PointWeight& w, const QuadratureConfig& cfg = {});

struct AsymptoticFit {
  std::vector<double> mu_values;
  std::vector<cplx> I_values;
  double kappa_hat = 0.0;
  int kappa_used = 0;
  cplx L0_hat;           // mean of I / (2 pi mu)^kappa
  cplx L0_intercept;     // mu -> 0 limit of a linear fit of I / (2 pi mu)^kappa in mu
  double residual_slope = 0.0;
};
// Residual slope is measured against L0_ref when given, else against L0_intercept.
AsymptoticFit fit_asymptotics(const std::vector<double>& mu, const std::vector<cplx>& I,
                              std::optional<int> kappa_known = std::nullopt,
                              std::optional<cplx> L0_ref = std::nullopt);

// Geometric grid from mu_max down to mu_min.
std::vector<double> mu_grid(double mu_max, double mu_min, int points);
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// u_eps = 1 within distance eps of Sing Omega, 0 beyond 3 eps.
double cutoff_weight(const GroupActionSpec& a, const PhasePoint& pt, double eps);

struct CutoffResult {
  bool applicable = false;
  cplx L0;
  std::vector<double> eps;
  std::vector<cplx> L0_eps;
};
CutoffResult cutoff_convergence(const GroupActionSpec& a, const AmplitudeSpec& amp, const std::vector<double>& eps,
                                const QuadratureConfig& cfg = {});

// Partition function of a chain: 1 within half the tube radius of the center, 0 beyond it.
double chain_partition(const IsotropyChain& ch, const std::vector<double>& ambient);
// Partition of the normal sphere S^{c-1} by the rho-charts, as a function of v~.
double sphere_chart_weight(const std::vector<double>& v, int rho);

struct EpsilonSplit {
  bool applicable = false;
  double mu = 0.0, eps = 0.0;
  cplx I1, I2;
  cplx direct;           // chart integral of a chi_chain, when requested
  bool has_direct = false;
};
// Depth-1 chains with d = 0: the chain integral in blow-up coordinates split at
// |tau| = eps = mu^{1/N}.
EpsilonSplit epsilon_split_diagnostic(const GroupActionSpec& a, int chain, const AmplitudeSpec& amp, double mu,
                                      bool with_direct, const QuadratureConfig& cfg = {});

struct ResolvedL0 {
  bool applicable = false;
  cplx regular;                    // Reg Crit integral weighted by 1 - sum chi_chain
  std::vector<cplx> chain_terms;   // leading coefficients of the chain charts
  cplx total;
};
ResolvedL0 resolved_leading_coefficient(const GroupActionSpec& a, const AmplitudeSpec& amp,
                                        const QuadratureConfig& cfg = {});

}  // namespace equivar
