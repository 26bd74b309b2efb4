#include <cmath>

#include "doctest.h"
#include "equivar/errors.hpp"
#include "equivar/resolution.hpp"

using namespace equivar;

namespace {

struct ChainCase {
  const GroupActionSpec* a;
  int chain;
};

std::vector<ChainCase> chains() {
  std::vector<ChainCase> v;
  for (const auto& n : all_actions()) {
    const auto& a = load_action(n);
    for (int c = 0; c < int(a.chains().size()); ++c) v.push_back({&a, c});
  }
  return v;
}

std::string label(const ChainCase& c) { return c.a->name() + "/" + c.a->chains()[c.chain].info().label; }

BlowupPoint pole_point(double tau, double phi, double beta, std::vector<double> p) {
  BlowupPoint bp;
  bp.chain = 0;
  bp.sigma = {tau};
  bp.tau = {tau};
  bp.rho = 0;
  bp.qv = {std::tan(phi)};
  bp.alpha = {{}};
  bp.beta = {beta};
  bp.p = std::move(p);
  return bp;
}

}  // namespace

TEST_CASE("delta substitution") {
  CHECK(delta_substitution({0.3}) == std::vector<double>{0.3});
  const double s1 = 0.7, s2 = -0.4;
  const auto t = delta_substitution({s1, s2});
  CHECK(t[0] == doctest::Approx(s1 * s1 * s2).epsilon(1e-15));
  CHECK(t[1] == doctest::Approx(s1 * s2).epsilon(1e-15));
  CHECK(delta_monomial_exponents(1) == std::vector<int>{1});
  CHECK(delta_monomial_exponents(2) == std::vector<int>{3, 2});
  Rng rng(59);
  for (int i = 0; i < 50; ++i) {
    const std::vector<double> s = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const auto tt = delta_substitution(s);
    CHECK(std::fabs(tt[0] * tt[1]) ==
          doctest::Approx(std::pow(std::fabs(s[0]), 3) * std::pow(std::fabs(s[1]), 2)).epsilon(1e-13));
  }
  for (const auto& zeroed : {std::vector<double>{0.0, 0.5}, std::vector<double>{0.5, 0.0}}) {
    const auto tz = delta_substitution(zeroed);
    CHECK(tz[0] * tz[1] == 0.0);
  }
}

TEST_CASE("blow-up of the pole of S^2") {
  const auto& a = load_action("circle_on_sphere");
  // tau = 0: the center, X = B
  const ForwardImage c = blowup_forward(a, pole_point(0.0, 0.3, 0.8, {0.1, 0.2}));
  CHECK(c.pt.q[0] == 0.0);
  CHECK(c.pt.q[1] == 0.0);
  CHECK(c.pt.s[0] == 0.8);
  // tau = 0.5 along the phi = 0 meridian lands at polar angle 0.5
  const ForwardImage f = blowup_forward(a, pole_point(0.5, 0.0, 0.0, {0.0, 0.0}));
  const auto x = a.embed<double>(f.pt.chart, f.pt.q);
  CHECK(x[2] == doctest::Approx(std::cos(0.5)).epsilon(1e-14));
  CHECK(x[0] == doctest::Approx(std::sin(0.5)).epsilon(1e-14));
  CHECK(std::fabs(x[1]) <= 1e-15);
  CHECK(blowup_forward(a, pole_point(0.5, 0.4, 0.0, {0.3, 0.1})).pt.s[0] == 0.0);
}

TEST_CASE("total transform factors through the weak transform") {
  for (const auto& c : chains()) {
    Rng rng(61 + c.chain);
    double worst = 0.0;
    for (int i = 0; i < 2000; ++i)
      worst = std::max(worst, weak_transform_phase(*c.a, random_blowup_point(*c.a, c.chain, rng, 0)).factor_residual);
    CHECK_MESSAGE(worst <= 1e-10, label(c));
  }
}

TEST_CASE("weak transform vanishes with p") {
  for (const auto& c : chains()) {
    Rng rng(67);
    auto bp = random_blowup_point(*c.a, c.chain, rng, 0);
    std::fill(bp.p.begin(), bp.p.end(), 0.0);
    CHECK(weak_transform_phase(*c.a, bp).psi_wk == 0.0);
    for (auto& al : bp.alpha) std::fill(al.begin(), al.end(), 0.0);
    std::fill(bp.beta.begin(), bp.beta.end(), 0.0);
    CHECK(weak_critical_conditions(*c.a, bp).all());
  }
}

TEST_CASE("nonzero alpha breaks condition (I)") {
  const auto& a = load_action("torus_on_s3");
  Rng rng(71);
  for (int i = 0; i < 50; ++i) {
    auto bp = random_blowup_point(a, 0, rng, 1);
    if (std::fabs(bp.sigma[0]) < 1e-3) continue;
    bp.alpha[0][0] = 0.3;
    CHECK_FALSE(weak_critical_conditions(a, bp).I);
    CHECK(weak_gradient(a, bp).norm() > 1e-8);
  }
}

TEST_CASE("weak critical points: gradient, value and rank") {
  for (const auto& c : chains()) {
    Rng rng(73 + c.chain);
    for (int i = 0; i < 100; ++i) {
      const auto bp = random_blowup_point(*c.a, c.chain, rng, i % 2 == 0 ? 1 : 2);
      CHECK(weak_critical_conditions(*c.a, bp).all());
      CHECK(weak_gradient(*c.a, bp).cwiseAbs().maxCoeff() <= 1e-10);
      CHECK(std::fabs(weak_transform_phase(*c.a, bp).psi_wk) <= 1e-10);
      const WeakTransformReport h = certify_weak_hessian(*c.a, bp);
      CHECK(h.wk_hess_rank == 2 * c.a->kappa());
      CHECK(h.min_nonzero_eig > 0.0);
      CHECK(weak_span_rank(*c.a, bp) == c.a->kappa());
    }
  }
}

TEST_CASE("at sigma = 0 the pole Hessian has zero diagonal blocks") {
  const auto& a = load_action("circle_on_sphere");
  Rng rng(79);
  for (int i = 0; i < 20; ++i) {
    const auto bp = random_blowup_point(a, 0, rng, 2);
    CHECK(bp.sigma[0] == 0.0);
    CHECK(certify_weak_hessian(a, bp).block_residual <= 1e-12);
  }
}

TEST_CASE("weak Hessian is uniformly non-degenerate in sigma") {
  for (const auto& c : chains()) {
    Rng rng(83);
    for (int t = 0; t < 5; ++t) {
      auto bp = random_blowup_point(*c.a, c.chain, rng, 1);
      double lo = INFINITY;
      for (int k = -9; k <= 9; ++k) {
        std::fill(bp.sigma.begin(), bp.sigma.end(), 0.1 * k);
        bp.tau = delta_substitution(bp.sigma);
        project_to_weak_critical(*c.a, &bp, rng);
        lo = std::min(lo, certify_weak_hessian(*c.a, bp).min_nonzero_eig);
      }
      CHECK_MESSAGE(lo > 1e-3, label(c));
    }
  }
}

TEST_CASE("weak critical points with sigma != 0 map into Crit psi") {
  for (const auto& c : chains()) {
    Rng rng(89 + c.chain);
    for (int i = 0; i < 100; ++i) {
      const auto bp = random_blowup_point(*c.a, c.chain, rng, 1);
      if (std::fabs(bp.sigma[0]) < 1e-3) continue;
      CHECK(phase_gradient(*c.a, blowup_forward(*c.a, bp).pt).norm() <= 1e-8);
    }
  }
}

TEST_CASE("misclassification-free critical detection") {
  for (const auto& c : chains()) {
    Rng rng(97 + c.chain);
    for (int i = 0; i < 300; ++i) {
      auto bp = random_blowup_point(*c.a, c.chain, rng, i % 3);
      if (i % 6 == 5)
        for (auto& v : bp.p) v += 1e-6;
      const bool grad0 = weak_gradient(*c.a, bp).cwiseAbs().maxCoeff() <= 1e-8;
      CHECK(grad0 == weak_critical_conditions(*c.a, bp, 1e-8).all());
    }
  }
}

TEST_CASE("alpha charts have no critical points") {
  const auto r = alpha_chart_noncritical(load_action("torus_on_s3"), 0, 10000, 1);
  CHECK(r.applicable);
  CHECK(r.min_grad > 1e-4);
  CHECK_FALSE(alpha_chart_noncritical(load_action("circle_on_sphere"), 0, 100, 1).applicable);
  // larger sample boxes reach closer to the q-chart boundary; the bound stays positive
  for (double box : {1.0, 4.0, 16.0}) CHECK(alpha_chart_noncritical(load_action("torus_on_s3"), 1, 4000, 2, box).min_grad > 1e-4);
}

TEST_CASE("Jacobian of the blow-up is a tau monomial times a tau-free factor") {
  const auto& s2 = load_action("circle_on_sphere");
  CHECK(jacobian_exponents(s2.chains()[0]) == std::vector<int>{1});
  const auto& t3 = load_action("torus_on_s3");
  CHECK(jacobian_exponents(t3.chains()[0]) == std::vector<int>{2});
  for (const auto* a : {&s2, &t3}) {
    Rng rng(101);
    for (int i = 0; i < 30; ++i) {
      auto bp = random_blowup_point(*a, 0, rng, 0);
      bp.sigma = bp.tau = {0.0};
      CHECK(jacobian_power(*a, bp).tilde <= 1e-14);
      bp.sigma = bp.tau = {0.3};
      const double phi1 = jacobian_power(*a, bp).phi;
      bp.sigma = bp.tau = {-0.8};
      const double phi2 = jacobian_power(*a, bp).phi;
      CHECK(std::fabs(phi1 - phi2) <= 1e-9 * std::max(1.0, std::fabs(phi1)));
    }
  }
}

TEST_CASE("sphere charts agree on overlaps") {
  for (const auto& c : chains()) {
    Rng rng(103);
    for (int i = 0; i < 50; ++i) {
      const auto bp = random_blowup_point(*c.a, c.chain, rng, 0);
      const int cdim = c.a->chains()[c.chain].info().levels.back().c;
      for (int rho = 0; rho < cdim; ++rho) {
        if (rho == bp.rho) continue;
        double sign = 0.0;
        BlowupPoint other;
        try {
          other = change_sphere_chart(*c.a, bp, rho, &sign);
        } catch (const DomainError&) {
          continue;  // v~ on the boundary of the target chart
        }
        CHECK(weak_transform_phase(*c.a, other).psi_wk ==
              doctest::Approx(sign * weak_transform_phase(*c.a, bp).psi_wk).epsilon(1e-10).scale(1.0));
      }
    }
  }
}

TEST_CASE("malformed blow-up points are rejected") {
  const auto& a = load_action("circle_on_sphere");
  auto bp = pole_point(0.2, 0.1, 0.0, {0.1, 0.1});
  bp.beta.clear();
  CHECK_THROWS_AS(weak_transform_phase(a, bp), DomainError);
  bp = pole_point(0.2, 0.1, 0.0, {0.1, 0.1});
  bp.chain = 7;
  CHECK_THROWS_AS(weak_transform_phase(a, bp), DomainError);
}
