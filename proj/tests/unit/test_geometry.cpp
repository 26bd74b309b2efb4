#include <cmath>

#include "doctest.h"
#include "equivar/errors.hpp"
#include "equivar/geometry.hpp"

using namespace equivar;

namespace {

PhasePoint random_point(const GroupActionSpec& a, Rng& rng, int chart = -1) {
  PhasePoint pt;
  pt.chart = chart >= 0 ? chart : rng.index(int(a.info().charts.size()));
  pt.q = random_chart_point(a, pt.chart, rng, 0.2);
  for (int i = 0; i < a.n(); ++i) pt.p.push_back(rng.uniform(-2, 2));
  for (int i = 0; i < a.d(); ++i) pt.s.push_back(rng.uniform(-1, 1));
  return pt;
}

int rank_of(const Mat& m) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(m);
  const auto& sv = svd.singularValues();
  int r = 0;
  for (int i = 0; i < sv.size(); ++i) r += sv(i) > 1e-8 * std::max(sv(0), 1e-300);
  return sv(0) < 1e-300 ? 0 : r;
}

}  // namespace

TEST_CASE("fundamental field of the rotation of S^2 in the spherical chart") {
  const auto& a = load_action("circle_on_sphere");
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    const auto q = random_chart_point(a, 0, rng, 0.1);
    const auto v = fundamental_field(a, 0, q, {1.0});
    CHECK(v[0] == 0.0);
    CHECK(v[1] == 1.0);
    // finite difference of the flow phi -> phi + t in the embedding
    const double h = 1e-6;
    const auto e1 = a.embed<double>(0, {q[0], q[1] + h}), e0 = a.embed<double>(0, {q[0], q[1] - h});
    const Mat jac = embed_jacobian(a, 0, q);
    const Eigen::Vector3d push = jac * Eigen::Vector2d(v[0], v[1]);
    for (int k = 0; k < 3; ++k) CHECK((e1[k] - e0[k]) / (2 * h) == doctest::Approx(push(k)).epsilon(1e-6));
  }
}

TEST_CASE("zero Lie algebra element gives the zero field") {
  Rng rng(5);
  for (const auto& n : all_actions()) {
    const auto& a = load_action(n);
    const auto pt = random_point(a, rng);
    for (double x : fundamental_field(a, pt.chart, pt.q, std::vector<double>(a.d(), 0.0))) CHECK(x == 0.0);
  }
}

TEST_CASE("rotation field vanishes at the pole") {
  const auto& a = load_action("circle_on_sphere");
  double prev = INFINITY;
  for (double r : {0.5, 0.1, 0.01, 0.001}) {
    const auto v = fundamental_field(a, CircleOnSphere::kNorth, {r, 0.0}, {1.0});
    const double norm = std::hypot(v[0], v[1]);
    CHECK(norm < prev);
    prev = norm;
  }
  CHECK(prev < 2e-3);
  const auto v0 = fundamental_field(a, CircleOnSphere::kNorth, {0.0, 0.0}, {1.0});
  CHECK(std::hypot(v0[0], v0[1]) == 0.0);
}

TEST_CASE("phase of the free circle action is p s") {
  const auto& a = load_action("circle_on_circle");
  CHECK(phase(a, {0, {1.0}, {0.3}, {2.0}}) == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("phase vanishes on the zero covector") {
  Rng rng(7);
  for (const auto& n : all_actions()) {
    const auto& a = load_action(n);
    auto pt = random_point(a, rng);
    std::fill(pt.p.begin(), pt.p.end(), 0.0);
    CHECK(phase(a, pt) == 0.0);
  }
}

TEST_CASE("phase is bilinear in (p, s)") {
  Rng rng(11);
  for (const auto& n : all_actions()) {
    const auto& a = load_action(n);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const auto x = random_point(a, rng);
      auto y = random_point(a, rng, x.chart);
      y.q = x.q;
      const double al = rng.uniform(-2, 2), be = rng.uniform(-2, 2);
      PhasePoint mix = x;
      for (int k = 0; k < a.n(); ++k) mix.p[k] = al * x.p[k] + be * y.p[k];
      PhasePoint py = x;
      py.p = y.p;
      worst = std::max(worst, std::fabs(phase(a, mix) - al * phase(a, x) - be * phase(a, py)));
      mix = x;
      for (int k = 0; k < a.d(); ++k) mix.s[k] = al * x.s[k] + be * y.s[k];
      PhasePoint sy = x;
      sy.s = y.s;
      worst = std::max(worst, std::fabs(phase(a, mix) - al * phase(a, x) - be * phase(a, sy)));
    }
    CHECK_MESSAGE(worst <= 1e-12, n);
  }
}

TEST_CASE("phase is invariant under the group") {
  Rng rng(13);
  for (const auto& n : all_actions()) {
    const auto& a = load_action(n);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      const auto pt = random_point(a, rng);
      std::vector<double> t;
      for (int k = 0; k < a.info().group_params; ++k) t.push_back(rng.uniform(-3, 3));
      const GroupElement g = a.group_element(t);
      const auto x = a.embed<double>(pt.chart, pt.q);
      const auto xi = covector_to_ambient(a, pt.chart, pt.q, pt.p);
      const VecX gx = g.R * Eigen::Map<const VecX>(x.data(), long(x.size()));
      const VecX gxi = g.R * Eigen::Map<const VecX>(xi.data(), long(xi.size()));
      const VecX gs = g.Ad * Eigen::Map<const VecX>(pt.s.data(), long(pt.s.size()));
      const int target = a.info().principal_chart;
      const auto q2 = a.chart_from_embed(target, {gx.data(), gx.data() + gx.size()});
      if (!a.in_domain(target, q2)) continue;
      const PhasePoint moved = ambient_to_chart(a, target, {gx.data(), gx.data() + gx.size()},
                                                {gxi.data(), gxi.data() + gxi.size()}, {gs.data(), gs.data() + gs.size()});
      worst = std::max(worst, std::fabs(phase(a, moved) - phase(a, pt)));
    }
    CHECK_MESSAGE(worst <= 1e-9, n);
  }
}

TEST_CASE("rank of the field matrix is d minus the isotropy dimension") {
  Rng rng(17);
  for (const auto& n : all_actions()) {
    const auto& a = load_action(n);
    const int principal = a.info().principal_chart;
    for (int i = 0; i < 50; ++i)
      CHECK(rank_of(field_matrix(a, principal, random_chart_point(a, principal, rng, 0.2))) == a.kappa());
  }
  const auto& s2 = load_action("circle_on_sphere");
  CHECK(rank_of(field_matrix(s2, CircleOnSphere::kNorth, {0.0, 0.0})) == 0);
  CHECK(rank_of(field_matrix(s2, CircleOnSphere::kSouth, {0.0, 0.0})) == 0);
  const auto& t3 = load_action("torus_on_s3");
  for (int chart : {TorusOnS3::kTube0, TorusOnS3::kTube1})
    for (double phi : {0.0, 1.0, 4.0}) CHECK(rank_of(field_matrix(t3, chart, {phi, 0.0, 0.0})) == 1);
}

TEST_CASE("metrics are symmetric positive definite") {
  Rng rng(19);
  for (const auto& n : all_actions()) {
    const auto& a = load_action(n);
    for (int c = 0; c < int(a.info().charts.size()); ++c)
      for (int i = 0; i < 50; ++i) {
        const Mat g = metric_matrix(a, c, random_chart_point(a, c, rng, 0.1));
        CHECK((g - g.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK(Eigen::SelfAdjointEigenSolver<Mat>(g).eigenvalues().minCoeff() > 0.0);
      }
  }
}

TEST_CASE("Liouville densities") {
  const auto& a = load_action("circle_on_sphere");
  Rng rng(23);
  for (int i = 0; i < 20; ++i) {
    const auto q = random_chart_point(a, 0, rng, 0.1);
    CHECK(liouville_density(a, 0, q) == 1.0);
    CHECK(liouville_density(a, 0, q, DensityKind::kBase) == doctest::Approx(std::sin(q[0])).epsilon(1e-14));
  }
  CHECK_THROWS_AS(liouville_density(a, 0, {-0.5, 1.0}), DomainError);
}

TEST_CASE("base density transforms with the chart Jacobian") {
  const auto& a = load_action("circle_on_sphere");
  Rng rng(29);
  for (int i = 0; i < 50; ++i) {
    const std::vector<double> q = {rng.uniform(0.05, 0.6), rng.uniform(0.0, 6.28)};
    const auto x = a.embed<double>(0, q);
    const auto u = a.chart_from_embed(CircleOnSphere::kNorth, x);
    // Jacobian of the transition spherical -> north by central differences
    Mat jac(2, 2);
    const double h = 1e-6;
    for (int k = 0; k < 2; ++k) {
      auto qp = q, qm = q;
      qp[k] += h;
      qm[k] -= h;
      const auto up = a.chart_from_embed(CircleOnSphere::kNorth, a.embed<double>(0, qp));
      const auto um = a.chart_from_embed(CircleOnSphere::kNorth, a.embed<double>(0, qm));
      for (int r = 0; r < 2; ++r) jac(r, k) = (up[r] - um[r]) / (2 * h);
    }
    const double lhs = liouville_density(a, 0, q, DensityKind::kBase);
    const double rhs = liouville_density(a, CircleOnSphere::kNorth, u, DensityKind::kBase) * std::fabs(jac.determinant());
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
  }
}

TEST_CASE("dual Hessian of a bilinear form") {
  const auto r = dual_hessian([](const std::vector<Jet>& u) { return u[0] * u[1]; }, {3.0, 5.0});
  CHECK(r.value == 15.0);
  CHECK(r.grad(0) == 5.0);
  CHECK(r.grad(1) == 3.0);
  CHECK(r.hess(0, 0) == 0.0);
  CHECK(r.hess(0, 1) == 1.0);
  CHECK(r.hess(1, 0) == 1.0);
  CHECK(r.hess(1, 1) == 0.0);
}

TEST_CASE("Hessian of the free circle phase is the pairing matrix") {
  const auto& a = load_action("circle_on_circle");
  Rng rng(31);
  for (int i = 0; i < 20; ++i) {
    const auto h = phase_derivatives(a, random_point(a, rng)).hess;
    Mat expect = Mat::Zero(3, 3);
    expect(1, 2) = expect(2, 1) = 1.0;
    CHECK((h - expect).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("dual Hessians agree with finite differences on random smooth functions") {
  Rng rng(37);
  const double h = 1e-5;
  for (int t = 0; t < 100; ++t) {
    double c[8];
    for (double& x : c) x = rng.uniform(-1.5, 1.5);
    auto f = [&](const auto& u) {
      using std::cos, std::exp, std::sin, std::sqrt;
      return c[0] * sin(c[1] * u[0] + c[2] * u[1]) * exp(0.5 * c[3] * u[2]) + cos(c[4] * u[0] * u[1]) +
             sqrt(1.0 + (c[5] * u[1] + c[6] * u[2]) * (c[5] * u[1] + c[6] * u[2])) + c[7] * u[0] * u[2] * u[2];
    };
    const std::vector<double> u = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const GradHess d = dual_hessian([&](const std::vector<Jet>& x) { return f(x); }, u);
    const double scale = std::max(1.0, d.hess.cwiseAbs().maxCoeff());
    for (int i = 0; i < 3; ++i) {
      auto up = u, um = u;
      up[i] += h;
      um[i] -= h;
      CHECK(std::fabs((f(up) - f(um)) / (2 * h) - d.grad(i)) <= 1e-6 * std::max(1.0, std::fabs(d.grad(i))));
      const VecX gp = dual_hessian([&](const std::vector<Jet>& x) { return f(x); }, up).grad;
      const VecX gm = dual_hessian([&](const std::vector<Jet>& x) { return f(x); }, um).grad;
      CHECK(((gp - gm) / (2 * h) - d.hess.col(i)).cwiseAbs().maxCoeff() <= 1e-6 * scale);
    }
    CHECK((d.hess - d.hess.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("non-smooth jet arguments are domain errors") {
  CHECK_THROWS_AS(dual_hessian([](const std::vector<Jet>& u) { return sqrt(u[0]); }, {0.0}), DomainError);
  CHECK_THROWS_AS(dual_hessian([](const std::vector<Jet>& u) { return log(u[0]); }, {-1.0}), DomainError);
}

TEST_CASE("chart changes preserve the phase") {
  Rng rng(41);
  for (const auto& n : all_actions()) {
    const auto& a = load_action(n);
    if (a.info().overlap_charts.empty()) continue;
    int checked = 0;
    for (int i = 0; i < 200; ++i) {
      const auto pt = random_point(a, rng, a.info().principal_chart);
      for (int target : a.info().overlap_charts) {
        const auto x = a.embed<double>(pt.chart, pt.q);
        if (!a.in_domain(target, a.chart_from_embed(target, x))) continue;
        CHECK(phase(a, change_chart(a, pt, target)) == doctest::Approx(phase(a, pt)).epsilon(1e-10).scale(1.0));
        ++checked;
      }
    }
    CHECK(checked > 0);
  }
}
