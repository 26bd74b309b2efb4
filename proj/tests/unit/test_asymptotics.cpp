#include <cmath>
#include <cstdlib>

#include "doctest.h"
#include "equivar/asymptotics.hpp"
#include "equivar/errors.hpp"

using namespace equivar;

namespace {

std::vector<cplx> synthetic(const std::vector<double>& mu, int kappa, double L0, double c1) {
  std::vector<cplx> I;
  for (double m : mu) I.push_back(std::pow(2 * M_PI * m, kappa) * (L0 + c1 * m));
  return I;
}

AmplitudeSpec doubled(const AmplitudeSpec& a) {
  AmplitudeSpec b = a;
  b.scale = 2.0 * a.scale;
  return b;
}

struct ThreadsEnv {
  explicit ThreadsEnv(const char* v) { setenv("EQUIVAR_THREADS", v, 1); }
  ~ThreadsEnv() { unsetenv("EQUIVAR_THREADS"); }
};

}  // namespace

TEST_CASE("Gauss-Legendre rules are exact to degree 2n - 1") {
  for (int n : {1, 2, 5, 8, 13}) {
    const Rule r = gauss_legendre(n);
    for (int deg = 0; deg <= 2 * n - 1; ++deg) {
      double s = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) s += r.w[i] * std::pow(r.x[i], deg);
      CHECK(s == doctest::Approx(deg % 2 ? 0.0 : 2.0 / (deg + 1)).epsilon(1e-14).scale(1.0));
    }
  }
  const Rule c = composite_gl(0.0, 3.0, 5);
  double s = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) s += c.w[i] * std::exp(c.x[i]);
  CHECK(s == doctest::Approx(std::exp(3.0) - 1.0).epsilon(1e-14));
  CHECK_THROWS_AS(axis_rule(1.0, 1.0, false, 8), QuadratureError);
}

TEST_CASE("pairwise sums are order fixed") {
  std::vector<double> x;
  for (int i = 0; i < 1001; ++i) x.push_back(1.0 / (i + 1));
  const double a = pairwise_sum(x.data(), x.size()), b = pairwise_sum(x.data(), x.size());
  CHECK(a == b);
  double naive = 0.0;
  for (double v : x) naive += v;
  CHECK(a == doctest::Approx(naive).epsilon(1e-14));
}

TEST_CASE("bump transform table against the radial Bessel form") {
  for (int d = 1; d <= 4; ++d) {
    const double h0 = bump_fourier_direct(d, 0.0);
    CHECK(bump_fourier(d, 0.0) == doctest::Approx(h0).epsilon(1e-10));
    for (double k : {0.37, 2.0, 7.5, 17.3, 42.0, 99.9, 250.0}) {
      const double t = bump_fourier(d, k), r = bump_fourier_direct(d, k);
      CHECK_MESSAGE(std::fabs(t - r) <= 1e-8 * h0, "d=" << d << " k=" << k);
      CHECK(bump_fourier(d, -k) == t);
    }
  }
  // the d = 1 transform at 0 is the integral of the bump over [-1, 1]
  const Rule r = composite_gl(-1.0, 1.0, 64);
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += r.w[i] * bump(std::fabs(r.x[i]));
  CHECK(bump_fourier(1, 0.0) == doctest::Approx(s).epsilon(1e-12));
  CHECK(bump_fourier(2, 500.0) == 0.0);
}

TEST_CASE("signature factor conventions") {
  CHECK(signature_factor(0, SignatureConvention::kQuarter) == cplx(1.0, 0.0));
  CHECK(signature_factor(0, SignatureConvention::kUnit) == cplx(1.0, 0.0));
  CHECK(std::abs(signature_factor(2, SignatureConvention::kQuarter) - cplx(0.0, 1.0)) <= 1e-15);
  CHECK(std::abs(signature_factor(1, SignatureConvention::kUnit) - cplx(-1.0, 0.0)) <= 1e-15);
  CHECK(std::abs(signature_factor(-1, SignatureConvention::kQuarter) - std::polar(1.0, -M_PI / 4)) <= 1e-15);
}

TEST_CASE("zero amplitude") {
  for (const auto& n : list_actions()) {
    const auto& a = load_action(n);
    const auto& z = load_amplitude(n, "zero");
    CHECK(leading_coefficient_L0(a, z) == cplx(0.0));
    CHECK(brute_force_I(a, z, 0.05).I == cplx(0.0));
  }
  const auto& s2 = load_action("circle_on_sphere");
  const EpsilonSplit e = epsilon_split_diagnostic(s2, 0, load_amplitude(s2.name(), "zero"), 0.02, true);
  CHECK(e.I1 == cplx(0.0));
  CHECK(e.I2 == cplx(0.0));
}

TEST_CASE("leading coefficients match the frozen references") {
  const auto& c1 = load_action("circle_on_circle");
  const L0Result r1 = leading_coefficient(c1, load_amplitude(c1.name(), "bump_A"));
  CHECK(r1.value.real() == doctest::Approx(reference_L0(c1.name(), "bump_A").value).epsilon(1e-6));
  CHECK(std::fabs(r1.value.imag()) <= 1e-15);
  CHECK(r1.rel_change <= 1e-5);

  const auto& s2 = load_action("circle_on_sphere");
  const cplx L0 = leading_coefficient_L0(s2, load_amplitude(s2.name(), "bump_B"));
  CHECK(L0.real() == doctest::Approx(reference_L0(s2.name(), "bump_B").value).epsilon(1e-3));

  // the convention only enters through the signature, which is 0 on the catalogue
  QuadratureConfig unit;
  unit.convention = SignatureConvention::kUnit;
  CHECK(leading_coefficient_L0(s2, load_amplitude(s2.name(), "bump_B"), unit) == L0);
}

TEST_CASE("integrals are linear in the amplitude") {
  for (const char* n : {"circle_on_circle", "circle_on_sphere"}) {
    const auto& a = load_action(n);
    const auto& amp = load_amplitude(n, default_amplitude(n));
    const auto two = doubled(amp);
    const cplx L = leading_coefficient_L0(a, amp), L2 = leading_coefficient_L0(a, two);
    CHECK(std::abs(L2 - 2.0 * L) <= 1e-12 * std::abs(L));
    const cplx I = brute_force_I(a, amp, 0.05).I, I2 = brute_force_I(a, two, 0.05).I;
    CHECK(std::abs(I2 - 2.0 * I) <= 1e-12 * std::abs(I));
  }
}

TEST_CASE("free circle: I(mu) against 2 pi mu L0") {
  const auto& a = load_action("circle_on_circle");
  const auto& amp = load_amplitude(a.name(), "bump_A");
  const cplx L0 = leading_coefficient_L0(a, amp);
  const cplx I = brute_force_I(a, amp, 0.02).I;
  CHECK(std::abs(I - 2 * M_PI * 0.02 * L0) / std::abs(2 * M_PI * 0.02 * L0) <= 0.03);
  // halving mu roughly quarters the residual
  const double r1 = std::abs(brute_force_I(a, amp, 0.04).I - 2 * M_PI * 0.04 * L0);
  const double r2 = std::abs(brute_force_I(a, amp, 0.02).I - 2 * M_PI * 0.02 * L0);
  CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("oracle is independent of the thread count") {
  const auto& a = load_action("circle_on_sphere");
  const auto& amp = load_amplitude(a.name(), "bump_B");
  cplx one, three;
  {
    ThreadsEnv env("1");
    one = brute_force_I(a, amp, 0.05).I;
  }
  {
    ThreadsEnv env("3");
    three = brute_force_I(a, amp, 0.05).I;
  }
  CHECK(one.real() == three.real());
  CHECK(one.imag() == three.imag());
}

TEST_CASE("oracle reductions and refinement agree") {
  const auto& a = load_action("circle_on_sphere");
  const auto& amp = load_amplitude(a.name(), "bump_B");
  QuadratureConfig fiber, algebra, fine;
  fiber.reduction = Reduction::kFiber;
  algebra.reduction = Reduction::kAlgebra;
  fine.points_per_period = 12.0;
  const OracleResult f = brute_force_I(a, amp, 0.05, fiber), g = brute_force_I(a, amp, 0.05, algebra);
  CHECK(f.reduction == "fiber");
  CHECK(g.reduction == "algebra");
  CHECK(std::abs(f.I - g.I) <= 1e-5 * std::abs(f.I));
  const OracleResult base = brute_force_I(a, amp, 0.05), refined = brute_force_I(a, amp, 0.05, fine);
  CHECK(std::abs(base.I - refined.I) <= 1e-6 * std::abs(base.I));
}

TEST_CASE("oracle refuses grids beyond its budget") {
  const auto& a = load_action("so3_on_sphere");
  CHECK_THROWS_AS(brute_force_I(a, load_amplitude(a.name(), "bump_C"), 1e-4), QuadratureError);
  CHECK_THROWS_AS(brute_force_I(a, load_amplitude(a.name(), "bump_C"), 0.0), DomainError);
  QuadratureConfig coarse;
  coarse.points_per_period = 4.0;
  CHECK_THROWS_AS(brute_force_I(a, load_amplitude(a.name(), "bump_C"), 0.1, coarse), QuadratureError);
}

TEST_CASE("mu grids") {
  const auto g = mu_grid(0.05, 0.008, 6);
  REQUIRE(g.size() == 6);
  CHECK(g.front() == doctest::Approx(0.05));
  CHECK(g.back() == doctest::Approx(0.008));
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] / g[i - 1] == doctest::Approx(g[1] / g[0]));
  CHECK_THROWS_AS(mu_grid(0.01, 0.05, 4), DomainError);
}

TEST_CASE("fit of an exact power law") {
  const auto mu = mu_grid(0.1, 0.01, 6);
  const AsymptoticFit f = fit_asymptotics(mu, synthetic(mu, 1, 3.0, 0.0));
  CHECK(f.kappa_hat == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.kappa_used == 1);
  CHECK(f.L0_hat.real() == doctest::Approx(3.0).epsilon(1e-12));
  const AsymptoticFit f2 = fit_asymptotics(mu, synthetic(mu, 2, -1.5, 0.0), 2);
  CHECK(f2.L0_hat.real() == doctest::Approx(-1.5).epsilon(1e-12));
}

TEST_CASE("fit recovers the residual order") {
  const auto mu = mu_grid(0.1, 0.01, 6);
  const auto I = synthetic(mu, 1, 3.0, 0.5);
  const AsymptoticFit f = fit_asymptotics(mu, I, 1);
  CHECK(f.residual_slope == doctest::Approx(2.0).epsilon(0.05));
  CHECK(f.L0_intercept.real() == doctest::Approx(3.0).epsilon(1e-10));
  const AsymptoticFit g = fit_asymptotics(mu, I, 1, cplx(3.0));
  CHECK(g.residual_slope == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("degenerate fits are errors") {
  const auto mu = mu_grid(0.1, 0.01, 6);
  CHECK_THROWS_AS(fit_asymptotics({0.1, 0.05, 0.02}, synthetic({0.1, 0.05, 0.02}, 1, 1.0, 0.0)), FitError);
  CHECK_THROWS_AS(fit_asymptotics(mu, std::vector<cplx>(6, cplx(1e-16))), FitError);
  std::vector<double> up(mu.rbegin(), mu.rend());
  CHECK_THROWS_AS(fit_asymptotics(up, synthetic(up, 1, 1.0, 0.0)), FitError);
  CHECK_THROWS_AS(fit_asymptotics(mu, synthetic({0.1, 0.05, 0.02, 0.01}, 1, 1.0, 0.0)), FitError);
}

TEST_CASE("cut-off weights") {
  const auto& a = load_action("circle_on_sphere");
  const PhasePoint pole{CircleOnSphere::kNorth, {0.0, 0.0}, {0.0, 0.0}, {0.0}};
  const PhasePoint far{0, {1.5, 0.0}, {0.3, 0.0}, {0.0}};
  CHECK(cutoff_weight(a, pole, 0.1) == 1.0);
  CHECK(cutoff_weight(a, far, 0.1) == 0.0);
  CHECK_THROWS_AS(cutoff_weight(a, pole, 0.0), DomainError);
}

TEST_CASE("cut-off convergence") {
  CHECK_FALSE(cutoff_convergence(load_action("circle_on_circle"), load_amplitude("circle_on_circle", "bump_A"),
                                 {0.1, 0.05})
                  .applicable);
  const auto& a = load_action("circle_on_sphere");
  const std::vector<double> eps = {0.2, 0.1, 0.05, 0.025};
  const CutoffResult c = cutoff_convergence(a, load_amplitude(a.name(), "bump_B"), eps);
  REQUIRE(c.applicable);
  double prev = INFINITY;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double dev = std::abs(c.L0_eps[i] - c.L0);
    CHECK(dev < prev);
    prev = dev;
  }
  CHECK(std::abs(c.L0_eps[2] - c.L0) <= 0.05 * std::abs(c.L0));
  // successive halvings shrink
  for (std::size_t i = 2; i < eps.size(); ++i)
    CHECK(std::abs(c.L0_eps[i] - c.L0_eps[i - 1]) < std::abs(c.L0_eps[i - 1] - c.L0_eps[i - 2]));

  // an amplitude supported away from the poles does not see the cut-off (its
  // narrow support settles to 2e-5 at the default nodes, enough for an equality check)
  QuadratureConfig cfg;
  cfg.l0_tol = 1e-4;
  const CutoffResult e = cutoff_convergence(a, load_amplitude(a.name(), "bump_B_equator"), {0.1, 0.05}, cfg);
  for (const auto& v : e.L0_eps) CHECK(v == e.L0);
}

TEST_CASE("smooth partitions") {
  const auto& ch = load_action("circle_on_sphere").chains()[0];
  CHECK(chain_partition(ch, {0.0, 0.0, 1.0}) == 1.0);
  CHECK(chain_partition(ch, {1.0, 0.0, 0.0}) == 0.0);
  Rng rng(107);
  for (int i = 0; i < 100; ++i) {
    const double t = rng.uniform(0.0, 2 * M_PI);
    // the rho-chart weights are a partition of unity on the normal circle
    double s = 0.0;
    for (int rho = 0; rho < 2; ++rho) {
      const double w = sphere_chart_weight({std::cos(t), std::sin(t)}, rho);
      CHECK(w >= 0.0);
      s += w;
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
  }
}
