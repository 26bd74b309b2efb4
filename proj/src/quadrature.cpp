#include "equivar/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "equivar/catalogue.hpp"
#include "equivar/errors.hpp"

namespace equivar {

Rule gauss_legendre(int n) {
  Rule r;
  r.x.assign(n, 0.0);
  r.w.assign(n, 2.0);
  if (n == 1) return r;
  // Newton on P_n from the Chebyshev-like initial guess
  auto legendre = [n](double x, double* dp) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    *dp = n * (x * p1 - p0) / (x * x - 1.0);
    return p1;
  };
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5)), dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      const double dx = legendre(x, &dp) / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    legendre(x, &dp);
    r.x[i] = -x;
    r.x[n - 1 - i] = x;
    r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

Rule composite_gl(double a, double b, int panels, int order) {
  static const Rule g8 = gauss_legendre(8);
  const Rule g = order == 8 ? g8 : gauss_legendre(order);
  Rule r;
  const double h = (b - a) / panels;
  for (int k = 0; k < panels; ++k) {
    const double c = a + (k + 0.5) * h;
    for (int i = 0; i < order; ++i) {
      r.x.push_back(c + 0.5 * h * g.x[i]);
      r.w.push_back(0.5 * h * g.w[i]);
    }
  }
  return r;
}

Rule periodic_trapezoid(double a, double b, int n) {
  Rule r;
  const double h = (b - a) / n;
  for (int i = 0; i < n; ++i) {
    r.x.push_back(a + i * h);
    r.w.push_back(h);
  }
  return r;
}

Rule axis_rule(double a, double b, bool full_period, int nodes) {
  if (!(b > a)) throw QuadratureError("empty integration interval");
  if (full_period) return periodic_trapezoid(a, b, std::max(nodes, 2));
  return composite_gl(a, b, std::max(1, (nodes + 7) / 8));
}

// ------------------------------------------------------------ bump transform

namespace {

constexpr double kTableMax = 400.0;
constexpr double kTableStep = 0.02;
constexpr int kMaxDim = 6;

// (2 pi)^{d/2} J_nu(z) / z^nu with nu = d/2 - 1
double radial_kernel(int d, double z) {
  switch (d) {
    case 1:
      return 2.0 * std::cos(z);
    case 3:
      return 4.0 * M_PI * (std::fabs(z) < 1e-8 ? 1.0 - z * z / 6.0 : std::sin(z) / z);
    case 5: {
      // (2 pi)^{5/2} J_{3/2}(z)/z^{3/2} = 8 pi^2 (sin z - z cos z) / z^3
      if (std::fabs(z) < 1e-3) return 8.0 * M_PI * M_PI * (1.0 / 3.0 - z * z / 30.0);
      return 8.0 * M_PI * M_PI * (std::sin(z) - z * std::cos(z)) / (z * z * z);
    }
    default: {
      const double nu = 0.5 * d - 1.0;
      const double pre = std::pow(2.0 * M_PI, 0.5 * d);
      if (std::fabs(z) < 1e-6) return pre / (std::pow(2.0, nu) * std::tgamma(nu + 1.0));
      return pre * std::cyl_bessel_j(nu, z) / std::pow(z, nu);
    }
  }
}

struct Table {
  std::once_flag once;
  std::vector<double> v;
};
Table g_tables[kMaxDim + 1];

}  // namespace

double bump_fourier_direct(int d, double k) {
  if (d < 1 || d > kMaxDim) throw DomainError("bump transform dimension out of range");
  k = std::fabs(k);
  const int panels = std::max(24, int(std::ceil(k / M_PI * 2.0)));
  const Rule r = composite_gl(0.0, 1.0, panels);
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double t = r.x[i];
    s += r.w[i] * radial_kernel(d, k * t) * std::pow(t, d - 1) * bump(t);
  }
  // d = 1 integrates over [-1, 1]; the kernel already carries the factor 2
  return s;
}

// Projection of the bump onto one axis: P_d(u) = integral over R^{d-1} of chi(sqrt(u^2 + |y|^2)) dy,
// so that h_d(k) = 2 integral_0^1 cos(k u) P_d(u) du.
static std::vector<double> bump_projection(int d, const Rule& u) {
  std::vector<double> p(u.size());
  if (d == 1) {
    for (std::size_t i = 0; i < u.size(); ++i) p[i] = bump(u.x[i]);
    return p;
  }
  // area of the unit sphere in R^{d-1}
  const double area = 2.0 * std::pow(M_PI, 0.5 * (d - 1)) / std::tgamma(0.5 * (d - 1));
  const Rule g = composite_gl(0.0, 1.0, 48);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double rmax = std::sqrt(std::max(0.0, 1.0 - u.x[i] * u.x[i]));
    double s = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double r = rmax * g.x[j];
      s += g.w[j] * bump(std::sqrt(u.x[i] * u.x[i] + r * r)) * std::pow(r, d - 2);
    }
    p[i] = area * rmax * s;
  }
  return p;
}

double bump_fourier(int d, double k) {
  if (d < 1 || d > kMaxDim) throw DomainError("bump transform dimension out of range");
  k = std::fabs(k);
  if (k >= kTableMax - 2 * kTableStep) return 0.0;
  Table& t = g_tables[d];
  std::call_once(t.once, [&] {
    const Rule u = composite_gl(0.0, 1.0, 256);
    const std::vector<double> p = bump_projection(d, u);
    const int n = int(kTableMax / kTableStep) + 1;
    t.v.resize(n);
    for (int i = 0; i < n; ++i) {
      const double ki = i * kTableStep;
      double s = 0.0;
      for (std::size_t j = 0; j < u.size(); ++j) s += u.w[j] * std::cos(ki * u.x[j]) * p[j];
      t.v[i] = 2.0 * s;
    }
  });
  // 4-point Lagrange on a uniform grid; reflect at 0 (h_d is even)
  const double x = k / kTableStep;
  const int i = int(x);
  const double f = x - i;
  auto at = [&](int j) { return t.v[std::abs(j)]; };
  const double y0 = at(i - 1), y1 = at(i), y2 = at(i + 1), y3 = at(i + 2);
  return y1 + 0.5 * f * (y2 - y0 + f * (2.0 * y0 - 5.0 * y1 + 4.0 * y2 - y3 + f * (3.0 * (y1 - y2) + y3 - y0)));
}

// ------------------------------------------------------------ reductions

template <class T> static T pairwise(const T* x, std::size_t n) {
  if (n == 0) return T(0.0);
  if (n <= 8) {
    T s(0.0);
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise(x, h) + pairwise(x + h, n - h);
}

double pairwise_sum(const double* x, std::size_t n) { return pairwise(x, n); }
cplx pairwise_sum(const cplx* x, std::size_t n) { return pairwise(x, n); }

int worker_count() {
  if (const char* e = std::getenv("EQUIVAR_THREADS")) {
    const int v = std::atoi(e);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace equivar
