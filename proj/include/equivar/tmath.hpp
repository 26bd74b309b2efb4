// Small dense helpers over any scalar type (double, Jet, Dual).  Matrices are
// row-major std::vectors.
#pragma once

#include <cmath>
#include <vector>

#include "equivar/errors.hpp"
#include "equivar/jet.hpp"

namespace equivar::tmath {

template <class T> using Vec = std::vector<T>;

template <class T> T dot(const Vec<T>& a, const Vec<T>& b) {
  T r(0.0);
  for (std::size_t i = 0; i < a.size(); ++i) r += a[i] * b[i];
  return r;
}

// x^T G y with G n x n row-major
template <class T> T form(const Vec<T>& g, const Vec<T>& x, const Vec<T>& y) {
  const std::size_t n = x.size();
  T r(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    T row(0.0);
    for (std::size_t j = 0; j < n; ++j) row += g[i * n + j] * y[j];
    r += x[i] * row;
  }
  return r;
}

// Gauss-Jordan with partial pivoting chosen on values.
template <class T> Vec<T> inverse(const Vec<T>& a, int n) {
  Vec<T> m = a, inv(static_cast<std::size_t>(n * n), T(0.0));
  for (int i = 0; i < n; ++i) inv[i * n + i] = T(1.0);
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::fabs(value_of(m[r * n + c])) > std::fabs(value_of(m[piv * n + c]))) piv = r;
    if (value_of(m[piv * n + c]) == 0.0) throw DomainError("singular matrix");
    if (piv != c)
      for (int k = 0; k < n; ++k) {
        std::swap(m[c * n + k], m[piv * n + k]);
        std::swap(inv[c * n + k], inv[piv * n + k]);
      }
    const T d = T(1.0) / m[c * n + c];
    for (int k = 0; k < n; ++k) {
      m[c * n + k] = m[c * n + k] * d;
      inv[c * n + k] = inv[c * n + k] * d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      const T f = m[r * n + c];
      if (value_of(f) == 0.0) continue;
      for (int k = 0; k < n; ++k) {
        m[r * n + k] = m[r * n + k] - f * m[c * n + k];
        inv[r * n + k] = inv[r * n + k] - f * inv[c * n + k];
      }
    }
  }
  return inv;
}

template <class T> T determinant(Vec<T> m, int n) {
  T det(1.0);
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::fabs(value_of(m[r * n + c])) > std::fabs(value_of(m[piv * n + c]))) piv = r;
    if (value_of(m[piv * n + c]) == 0.0) return T(0.0);
    if (piv != c) {
      for (int k = 0; k < n; ++k) std::swap(m[c * n + k], m[piv * n + k]);
      det = -det;
    }
    det = det * m[c * n + c];
    const T inv = T(1.0) / m[c * n + c];
    for (int r = c + 1; r < n; ++r) {
      const T f = m[r * n + c] * inv;
      for (int k = c; k < n; ++k) m[r * n + k] = m[r * n + k] - f * m[c * n + k];
    }
  }
  return det;
}

// Modified Gram-Schmidt in the inner product given by g.
template <class T> Vec<Vec<T>> mgs(Vec<Vec<T>> v, const Vec<T>& g) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const T c = form(g, v[j], v[i]);
      for (std::size_t k = 0; k < v[i].size(); ++k) v[i][k] = v[i][k] - c * v[j][k];
    }
    const T nrm = sqrt(form(g, v[i], v[i]));
    for (auto& x : v[i]) x = x / nrm;
  }
  return v;
}

template <class T> Vec<T> identity(int n) {
  Vec<T> m(static_cast<std::size_t>(n * n), T(0.0));
  for (int i = 0; i < n; ++i) m[i * n + i] = T(1.0);
  return m;
}

}  // namespace equivar::tmath
