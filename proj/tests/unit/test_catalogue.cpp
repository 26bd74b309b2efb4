#include <cmath>
#include <set>

#include "doctest.h"
#include "equivar/errors.hpp"
#include "equivar/geometry.hpp"
#include "equivar/quadrature.hpp"

using namespace equivar;

namespace {

const StratumInfo& stratum(const GroupActionSpec& a, const std::string& label) {
  for (const auto& s : a.info().strata)
    if (s.label == label) return s;
  FAIL("no stratum " << label);
  return a.info().strata.front();
}

// lambda(B) as a c x c matrix
Mat rep_matrix(const IsotropyChain& ch, int level, const std::vector<double>& x, const std::vector<double>& y, int c) {
  Mat m(c, c);
  for (int j = 0; j < c; ++j) {
    std::vector<double> w(c, 0.0);
    w[j] = 1.0;
    const auto col = ch.rep<double>(level, x, y, w);
    for (int i = 0; i < c; ++i) m(i, j) = col[i];
  }
  return m;
}

std::vector<double> level_x(const IsotropyChain& ch, int level, Rng& rng) {
  const auto& l = ch.info().levels[level];
  std::vector<double> x;
  for (int i = 0; i < l.xdim; ++i) x.push_back(rng.uniform(l.xlo[i], l.xhi[i]));
  return x;
}

}  // namespace

TEST_CASE("catalogue listing") {
  const auto names = list_actions();
  CHECK(names == std::vector<std::string>{"circle_on_circle", "circle_on_sphere", "so3_on_sphere", "torus_on_s3"});
  CHECK_THROWS_AS(load_action("klein_bottle"), UnknownName);
  for (const auto& n : all_actions()) CHECK(load_action(n).name() == n);
}

TEST_CASE("catalogue dimensions and strata") {
  const auto& c1 = load_action("circle_on_circle");
  CHECK(c1.info().strata.size() == 1);
  CHECK(c1.info().strata[0].principal);
  CHECK(c1.kappa() == 1);
  CHECK(c1.chains().empty());

  const auto& s2 = load_action("circle_on_sphere");
  CHECK(s2.kappa() == 1);
  const auto& pole = stratum(s2, "S1");
  CHECK(pole.e == 1);
  CHECK(pole.c == 2);
  CHECK(pole.d == 0);
  CHECK(pole.components == 2);
  CHECK(s2.chains().size() == 2);
  for (const auto& ch : s2.chains()) CHECK(ch.depth() == 1);

  const auto& so3 = load_action("so3_on_sphere");
  CHECK(so3.kappa() == 2);
  CHECK(so3.d() == 3);
  CHECK(so3.info().strata.size() == 1);
  CHECK(so3.chains().empty());

  const auto& t3 = load_action("torus_on_s3");
  CHECK(t3.kappa() == 2);
  CHECK(t3.info().extended);
  CHECK(t3.chains().size() == 2);
  CHECK(stratum(t3, "S1").components == 2);

  CHECK(load_action("torus_on_sphere_pair").chains()[0].depth() == 2);
}

TEST_CASE("stratum and chain level dimensions are consistent") {
  for (const auto& n : all_actions()) {
    const auto& a = load_action(n);
    for (const auto& s : a.info().strata) CHECK(s.d + s.e == a.d());
    for (const auto& ch : a.chains()) {
      int dsum = 0;
      for (const auto& l : ch.info().levels) {
        CHECK(l.d + l.e == a.d());
        dsum += l.d;
        // c + sum of d over the chain so far, minus one, is at least kappa
        CHECK(l.c + dsum - 1 >= a.kappa());
      }
    }
  }
}

TEST_CASE("chain frames are orthonormal and exp(x, 0) is the center") {
  Rng rng(43);
  for (const auto& n : all_actions()) {
    const auto& a = load_action(n);
    for (const auto& ch : a.chains())
      for (int lev = 0; lev < ch.depth(); ++lev)
        for (int t = 0; t < 20; ++t) {
          const auto x = level_x(ch, lev, rng);
          const auto fr = ch.frame<double>(lev, x);
          CHECK(int(fr.size()) == ch.info().levels[lev].c);
          for (std::size_t i = 0; i < fr.size(); ++i)
            for (std::size_t j = 0; j < fr.size(); ++j) {
              double dot = 0.0;
              for (std::size_t k = 0; k < fr[i].size(); ++k) dot += fr[i][k] * fr[j][k];
              CHECK(std::fabs(dot - (i == j ? 1.0 : 0.0)) <= 1e-12);
            }
          const auto e = ch.exp<double>(lev, x, std::vector<double>(fr.size(), 0.0));
          const auto c = ch.center<double>(lev, x);
          REQUIRE(e.size() == c.size());
          for (std::size_t k = 0; k < e.size(); ++k) CHECK(std::fabs(e[k] - c[k]) <= 1e-14);
        }
  }
}

TEST_CASE("normal representations are Lie algebra representations") {
  Rng rng(47);
  for (const auto& n : all_actions()) {
    const auto& a = load_action(n);
    const auto& sc = a.info().structure;
    for (const auto& ch : a.chains())
      for (int lev = 0; lev < ch.depth(); ++lev) {
        const int c = ch.info().levels[lev].c;
        for (int t = 0; t < 20; ++t) {
          const auto x = level_x(ch, lev, rng);
          std::vector<double> y1(a.d()), y2(a.d()), br(a.d(), 0.0), sum(a.d());
          for (int i = 0; i < a.d(); ++i) {
            y1[i] = rng.uniform(-1, 1);
            y2[i] = rng.uniform(-1, 1);
            sum[i] = 2.0 * y1[i] - 0.5 * y2[i];
          }
          for (int i = 0; i < a.d(); ++i)
            for (int j = 0; j < a.d(); ++j)
              for (int k = 0; k < a.d(); ++k) br[k] += y1[i] * y2[j] * sc[(i * a.d() + j) * a.d() + k];
          const Mat l1 = rep_matrix(ch, lev, x, y1, c), l2 = rep_matrix(ch, lev, x, y2, c);
          CHECK((rep_matrix(ch, lev, x, sum, c) - (2.0 * l1 - 0.5 * l2)).cwiseAbs().maxCoeff() <= 1e-12);
          CHECK((l1 * l2 - l2 * l1 - rep_matrix(ch, lev, x, br, c)).cwiseAbs().maxCoeff() <= 1e-10);
        }
      }
  }
}

TEST_CASE("the bump and the smooth step") {
  CHECK(bump(0.0) == 1.0);
  CHECK(bump(1.0) == 0.0);
  CHECK(bump(-1.5) == 0.0);
  CHECK(bump(0.5) == doctest::Approx(std::exp(1.0 - 1.0 / 0.75)));
  CHECK(smooth_step(-0.1) == 1.0);
  CHECK(smooth_step(1.0) == 0.0);
  CHECK(smooth_step(0.5) == doctest::Approx(0.5));
  double prev = 1.0;
  for (int i = 1; i <= 100; ++i) {
    const double v = smooth_step(i / 100.0);
    CHECK(v <= prev);
    prev = v;
  }
}

TEST_CASE("amplitudes") {
  for (const auto& n : all_actions()) {
    const auto ids = list_amplitudes(n);
    CHECK(std::set<std::string>(ids.begin(), ids.end()).count(default_amplitude(n)) == 1);
    CHECK(std::set<std::string>(ids.begin(), ids.end()).count("zero") == 1);
  }
  CHECK_THROWS_AS(load_amplitude("circle_on_sphere", "bump_A"), UnknownName);

  Rng rng(53);
  for (const auto& n : all_actions()) {
    const auto& a = load_action(n);
    const auto& amp = load_amplitude(n, default_amplitude(n));
    AmplitudeSpec twice = amp;
    twice.scale = 2.0;
    const auto& zero = load_amplitude(n, "zero");
    for (int i = 0; i < 50; ++i) {
      PhasePoint pt;
      pt.chart = a.info().principal_chart;
      pt.q = random_chart_point(a, pt.chart, rng, 0.1);
      for (int k = 0; k < a.n(); ++k) pt.p.push_back(rng.uniform(-1, 1));
      for (int k = 0; k < a.d(); ++k) pt.s.push_back(rng.uniform(-0.5, 0.5));
      const double v = amplitude(amp, a, pt);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      CHECK(amplitude(twice, a, pt) == 2.0 * v);
      CHECK(amplitude(zero, a, pt) == 0.0);
    }
  }
}

TEST_CASE("frozen leading coefficients") {
  // free circle: L0 is the integral of a(theta, 0, 0) over the critical circle
  const auto& a = load_action("circle_on_circle");
  const auto& amp = load_amplitude(a.name(), "bump_A");
  const Rule r = periodic_trapezoid(0.0, 2 * M_PI, 4000);
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += r.w[i] * amplitude(amp, a, {0, {r.x[i]}, {0.0}, {0.0}});
  CHECK(reference_L0("circle_on_circle", "bump_A").value == doctest::Approx(s).epsilon(1e-12));

  for (const auto& n : all_actions()) CHECK(reference_L0(n, "zero").value == 0.0);
  CHECK(reference_L0("circle_on_sphere", "bump_B").value == doctest::Approx(10.761151749500354).epsilon(1e-15));
  CHECK_THROWS_AS(reference_L0("so3_on_sphere", "bump_C"), UnknownName);
  CHECK_THROWS_AS(reference_L0("circle_on_sphere", "bump_Z"), UnknownName);
}
