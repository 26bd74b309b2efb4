// Forward-mode differentiation types.
//
// Jet carries a value, a gradient and a packed lower-triangular Hessian with
// respect to up to kMaxJetVars independent variables.  Dual<S> is a single
// directional derivative over any scalar S, so Dual<Jet> gives the second
// derivatives of a pushforward.
#pragma once

#include <array>
#include <cmath>
#include <type_traits>

#include "equivar/errors.hpp"

namespace equivar {

inline constexpr int kMaxJetVars = 16;
inline constexpr int kJetPacked = kMaxJetVars * (kMaxJetVars + 1) / 2;

constexpr int hidx(int i, int j) { return i >= j ? i * (i + 1) / 2 + j : j * (j + 1) / 2 + i; }

struct Jet {
  double v = 0.0;
  int n = 0;
  std::array<double, kMaxJetVars> g{};
  std::array<double, kJetPacked> h{};

  Jet() = default;
  Jet(double c) : v(c) {}  // NOLINT: constants convert implicitly

  static Jet variable(double value, int index, int nvars) {
    if (index < 0 || index >= nvars || nvars > kMaxJetVars)
      throw DomainError("jet variable index out of range");
    Jet r(value);
    r.n = nvars;
    r.g[index] = 1.0;
    return r;
  }
  double grad(int i) const { return g[i]; }
  double hess(int i, int j) const { return h[hidx(i, j)]; }
};

// u -> f(u) given f(u.v), f'(u.v), f''(u.v)
inline Jet chain(const Jet& u, double f0, double f1, double f2) {
  Jet r;
  r.v = f0;
  r.n = u.n;
  for (int i = 0; i < u.n; ++i) r.g[i] = f1 * u.g[i];
  for (int i = 0; i < u.n; ++i)
    for (int j = 0; j <= i; ++j) r.h[hidx(i, j)] = f1 * u.h[hidx(i, j)] + f2 * u.g[i] * u.g[j];
  return r;
}

inline Jet operator+(const Jet& a, const Jet& b) {
  Jet r;
  r.v = a.v + b.v;
  r.n = a.n > b.n ? a.n : b.n;
  for (int i = 0; i < r.n; ++i) r.g[i] = a.g[i] + b.g[i];
  const int m = r.n * (r.n + 1) / 2;
  for (int k = 0; k < m; ++k) r.h[k] = a.h[k] + b.h[k];
  return r;
}
inline Jet operator-(const Jet& a) {
  Jet r;
  r.v = -a.v;
  r.n = a.n;
  for (int i = 0; i < r.n; ++i) r.g[i] = -a.g[i];
  const int m = r.n * (r.n + 1) / 2;
  for (int k = 0; k < m; ++k) r.h[k] = -a.h[k];
  return r;
}
inline Jet operator-(const Jet& a, const Jet& b) {
  Jet r;
  r.v = a.v - b.v;
  r.n = a.n > b.n ? a.n : b.n;
  for (int i = 0; i < r.n; ++i) r.g[i] = a.g[i] - b.g[i];
  const int m = r.n * (r.n + 1) / 2;
  for (int k = 0; k < m; ++k) r.h[k] = a.h[k] - b.h[k];
  return r;
}
inline Jet operator*(const Jet& a, const Jet& b) {
  Jet r;
  r.v = a.v * b.v;
  r.n = a.n > b.n ? a.n : b.n;
  for (int i = 0; i < r.n; ++i) r.g[i] = a.v * b.g[i] + b.v * a.g[i];
  for (int i = 0; i < r.n; ++i)
    for (int j = 0; j <= i; ++j) {
      const int k = hidx(i, j);
      r.h[k] = a.v * b.h[k] + b.v * a.h[k] + a.g[i] * b.g[j] + b.g[i] * a.g[j];
    }
  return r;
}
inline Jet operator*(double c, const Jet& a) {
  Jet r;
  r.v = c * a.v;
  r.n = a.n;
  for (int i = 0; i < r.n; ++i) r.g[i] = c * a.g[i];
  const int m = r.n * (r.n + 1) / 2;
  for (int k = 0; k < m; ++k) r.h[k] = c * a.h[k];
  return r;
}
inline Jet operator*(const Jet& a, double c) { return c * a; }
inline Jet operator+(const Jet& a, double c) { Jet r = a; r.v += c; return r; }
inline Jet operator+(double c, const Jet& a) { return a + c; }
inline Jet operator-(const Jet& a, double c) { Jet r = a; r.v -= c; return r; }
inline Jet operator-(double c, const Jet& a) { return (-a) + c; }
inline Jet reciprocal(const Jet& a) {
  if (a.v == 0.0) throw DomainError("division by zero in jet arithmetic");
  const double r = 1.0 / a.v;
  return chain(a, r, -r * r, 2.0 * r * r * r);
}
inline Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
inline Jet operator/(const Jet& a, double c) { return (1.0 / c) * a; }
inline Jet operator/(double c, const Jet& a) { return c * reciprocal(a); }
inline Jet& operator+=(Jet& a, const Jet& b) { return a = a + b; }
inline Jet& operator-=(Jet& a, const Jet& b) { return a = a - b; }
inline Jet& operator*=(Jet& a, const Jet& b) { return a = a * b; }

inline Jet sin(const Jet& a) { const double s = std::sin(a.v), c = std::cos(a.v); return chain(a, s, c, -s); }
inline Jet cos(const Jet& a) { const double s = std::sin(a.v), c = std::cos(a.v); return chain(a, c, -s, -c); }
inline Jet exp(const Jet& a) { const double e = std::exp(a.v); return chain(a, e, e, e); }
inline Jet log(const Jet& a) {
  if (a.v <= 0.0) throw DomainError("log of non-positive jet");
  return chain(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v));
}
inline Jet sqrt(const Jet& a) {
  if (a.v < 0.0) throw DomainError("sqrt of negative jet");
  if (a.v == 0.0) {
    for (int i = 0; i < a.n; ++i)
      if (a.g[i] != 0.0) throw DomainError("sqrt is not differentiable at 0");
    return Jet(0.0);
  }
  const double s = std::sqrt(a.v);
  return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}

inline Jet atan2(const Jet& y, const Jet& x) {
  const double r2 = x.v * x.v + y.v * y.v;
  if (r2 == 0.0) throw DomainError("atan2 at the origin");
  const double fy = x.v / r2, fx = -y.v / r2;
  const double r4 = r2 * r2;
  const double fyy = -2.0 * x.v * y.v / r4, fxx = 2.0 * x.v * y.v / r4;
  const double fxy = (y.v * y.v - x.v * x.v) / r4;
  Jet r;
  r.v = std::atan2(y.v, x.v);
  r.n = x.n > y.n ? x.n : y.n;
  for (int i = 0; i < r.n; ++i) r.g[i] = fx * x.g[i] + fy * y.g[i];
  for (int i = 0; i < r.n; ++i)
    for (int j = 0; j <= i; ++j) {
      const int k = hidx(i, j);
      r.h[k] = fx * x.h[k] + fy * y.h[k] + fxx * x.g[i] * x.g[j] + fyy * y.g[i] * y.g[j] +
               fxy * (x.g[i] * y.g[j] + y.g[i] * x.g[j]);
    }
  return r;
}

// Dual<S>: a + b·eps with eps² = 0.
template <class S>
struct Dual {
  S a{}, b{};
  Dual() = default;
  Dual(double c) : a(c), b(0.0) {}  // NOLINT
  Dual(const S& x, const S& y) : a(x), b(y) {}
  template <class U = S, class = std::enable_if_t<!std::is_same_v<U, double>>>
  Dual(const S& x) : a(x), b(0.0) {}  // NOLINT
};

template <class S> Dual<S> operator+(const Dual<S>& x, const Dual<S>& y) { return {x.a + y.a, x.b + y.b}; }
template <class S> Dual<S> operator-(const Dual<S>& x, const Dual<S>& y) { return {x.a - y.a, x.b - y.b}; }
template <class S> Dual<S> operator-(const Dual<S>& x) { return {-x.a, -x.b}; }
template <class S> Dual<S> operator*(const Dual<S>& x, const Dual<S>& y) { return {x.a * y.a, x.a * y.b + x.b * y.a}; }
template <class S> Dual<S> operator/(const Dual<S>& x, const Dual<S>& y) {
  const S inv = 1.0 / y.a;
  return {x.a * inv, (x.b - x.a * inv * y.b) * inv};
}
template <class S> Dual<S> operator*(double c, const Dual<S>& x) { return {c * x.a, c * x.b}; }
template <class S> Dual<S> operator*(const Dual<S>& x, double c) { return {c * x.a, c * x.b}; }
template <class S> Dual<S> operator/(const Dual<S>& x, double c) { return {x.a / c, x.b / c}; }
template <class S> Dual<S> operator/(double c, const Dual<S>& x) { return Dual<S>(c) / x; }
template <class S> Dual<S> operator+(const Dual<S>& x, double c) { return {x.a + c, x.b}; }
template <class S> Dual<S> operator+(double c, const Dual<S>& x) { return {x.a + c, x.b}; }
template <class S> Dual<S> operator-(const Dual<S>& x, double c) { return {x.a - c, x.b}; }
template <class S> Dual<S> operator-(double c, const Dual<S>& x) { return {c - x.a, -x.b}; }
template <class S> Dual<S>& operator+=(Dual<S>& x, const Dual<S>& y) { return x = x + y; }
template <class S> Dual<S>& operator-=(Dual<S>& x, const Dual<S>& y) { return x = x - y; }
template <class S> Dual<S>& operator*=(Dual<S>& x, const Dual<S>& y) { return x = x * y; }

using std::sin; using std::cos; using std::exp; using std::sqrt; using std::atan2; using std::log;

template <class S> Dual<S> sin(const Dual<S>& x) { return {sin(x.a), cos(x.a) * x.b}; }
template <class S> Dual<S> cos(const Dual<S>& x) { return {cos(x.a), -(sin(x.a) * x.b)}; }
template <class S> Dual<S> exp(const Dual<S>& x) { const S e = exp(x.a); return {e, e * x.b}; }
template <class S> Dual<S> log(const Dual<S>& x) { return {log(x.a), x.b / x.a}; }
template <class S> Dual<S> sqrt(const Dual<S>& x) { const S s = sqrt(x.a); return {s, x.b / (2.0 * s)}; }
template <class S> Dual<S> atan2(const Dual<S>& y, const Dual<S>& x) {
  const S r2 = x.a * x.a + y.a * y.a;
  return {atan2(y.a, x.a), (x.a * y.b - y.a * x.b) / r2};
}

inline double value_of(double x) { return x; }
inline double value_of(const Jet& x) { return x.v; }
template <class S> double value_of(const Dual<S>& x) { return value_of(x.a); }

// sin(sqrt w)/sqrt w and cos(sqrt w) as entire functions of w, with the first
// three derivatives from the power series.  Valid for |w| <= kSeriesMaxW.
inline constexpr double kSeriesMaxW = 40.0;
void sinc_sq_derivs(double w, double out[4]);
void cos_sq_derivs(double w, double out[4]);

inline double sinc_sq(double w) { double d[4]; sinc_sq_derivs(w, d); return d[0]; }
inline double sinc_sq_d1(double w) { double d[4]; sinc_sq_derivs(w, d); return d[1]; }
inline double cos_sq(double w) { double d[4]; cos_sq_derivs(w, d); return d[0]; }
inline Jet sinc_sq(const Jet& w) { double d[4]; sinc_sq_derivs(w.v, d); return chain(w, d[0], d[1], d[2]); }
inline Jet sinc_sq_d1(const Jet& w) { double d[4]; sinc_sq_derivs(w.v, d); return chain(w, d[1], d[2], d[3]); }
inline Jet cos_sq(const Jet& w) { double d[4]; cos_sq_derivs(w.v, d); return chain(w, d[0], d[1], d[2]); }
template <class S> Dual<S> sinc_sq(const Dual<S>& w) { return {sinc_sq(w.a), sinc_sq_d1(w.a) * w.b}; }
// cos_sq' = -sinc_sq / 2
template <class S> Dual<S> cos_sq(const Dual<S>& w) { return {cos_sq(w.a), -0.5 * (sinc_sq(w.a) * w.b)}; }

}  // namespace equivar
