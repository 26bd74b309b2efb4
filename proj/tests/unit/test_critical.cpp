#include <cmath>

#include "doctest.h"
#include "equivar/critical.hpp"
#include "equivar/errors.hpp"

using namespace equivar;

TEST_CASE("sampling Reg Crit") {
  CHECK(sample_regular_critical(load_action("circle_on_sphere"), 0, 1).empty());

  const auto s2 = sample_regular_critical(load_action("circle_on_sphere"), 100, 1);
  REQUIRE(s2.size() == 100);
  for (const auto& s : s2) CHECK(s.rank == 2);

  const auto so3 = sample_regular_critical(load_action("so3_on_sphere"), 50, 1);
  REQUIRE(so3.size() == 50);
  for (const auto& s : so3) CHECK(s.rank == 4);
}

TEST_CASE("certified samples vanish to second order off a codimension 2 kappa kernel") {
  for (const auto& n : all_actions()) {
    const auto& a = load_action(n);
    for (const auto& s : sample_regular_critical(a, 60, 7)) {
      CHECK(std::fabs(s.psi) <= 1e-10);
      CHECK(s.grad_norm <= 1e-10);
      CHECK(s.rank == 2 * a.kappa());
      CHECK(s.kernel_dim == 2 * a.n() + a.d() - 2 * a.kappa());
      CHECK(s.signature == 0);
      CHECK(s.tangent_angle <= 1e-8);
      for (double r : omega_residual(a, s.pt.chart, s.pt.q, s.pt.p)) CHECK(std::fabs(r) <= 1e-12);
    }
  }
}

TEST_CASE("certification is chart independent") {
  for (const auto& n : all_actions()) {
    const auto& a = load_action(n);
    int rechecked = 0;
    for (const auto& s : sample_regular_critical(a, 60, 11))
      for (int target : a.info().overlap_charts) {
        const auto x = a.embed<double>(s.pt.chart, s.pt.q);
        if (!a.in_domain(target, a.chart_from_embed(target, x))) continue;
        const CriticalSample t = certify_regular_critical(a, change_chart(a, s.pt, target));
        CHECK(t.rank == s.rank);
        CHECK(t.signature == s.signature);
        ++rechecked;
      }
    if (!a.info().overlap_charts.empty()) CHECK(rechecked > 0);
  }
}

TEST_CASE("vanishing p and s derivatives force the q derivative to vanish") {
  for (const auto& n : all_actions()) {
    const auto& a = load_action(n);
    for (const auto& pt : regular_critical_points(a, 50, 13)) {
      const PhaseGradient g = phase_gradient(a, pt);
      if (g.dp.norm() > 1e-12 || g.ds.norm() > 1e-12) continue;
      CHECK(g.dq.norm() <= 1e-9);
    }
  }
}

TEST_CASE("sampling is reproducible") {
  const auto& a = load_action("so3_on_sphere");
  const auto x = regular_critical_points(a, 20, 99), y = regular_critical_points(a, 20, 99);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(x[i].q == y[i].q);
    CHECK(x[i].p == y[i].p);
    CHECK(x[i].s == y[i].s);
  }
  CHECK(regular_critical_points(a, 5, 100)[0].q != x[0].q);
}

TEST_CASE("non-critical and singular points are rejected") {
  const auto& a = load_action("circle_on_sphere");
  // p pairs with the rotation field
  CHECK_THROWS_AS(certify_regular_critical(a, {0, {1.0, 0.5}, {0.0, 0.7}, {0.0}}), NotCritical);
  // s != 0 with p generic
  CHECK_THROWS_AS(certify_regular_critical(a, {0, {1.0, 0.5}, {0.3, 0.0}, {0.4}}), NotCritical);
  // the pole: critical, but the transversal Hessian degenerates
  bool rejected = false;
  try {
    certify_regular_critical(a, {CircleOnSphere::kNorth, {0.0, 0.0}, {0.2, -0.1}, {0.0}});
  } catch (const DegenerateTransversal&) {
    rejected = true;
  } catch (const NotCritical&) {
    rejected = true;
  }
  CHECK(rejected);
}

TEST_CASE("isotropy algebra dimensions") {
  const auto& s2 = load_action("circle_on_sphere");
  CHECK(isotropy_algebra(s2, CircleOnSphere::kNorth, {0.0, 0.0}).cols() == 1);
  CHECK(isotropy_algebra(s2, 0, {1.0, 0.0}).cols() == 0);
  const auto& t3 = load_action("torus_on_s3");
  CHECK(isotropy_algebra(t3, TorusOnS3::kTube0, {0.5, 0.0, 0.0}).cols() == 1);
  CHECK(isotropy_algebra(t3, 0, {0.7, 0.2, 0.3}).cols() == 0);
}
