// Tensor quadrature pieces, the Fourier transform of the radial bump and a
// deterministic parallel block reduction.
#pragma once

#include <atomic>
#include <complex>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <algorithm>
#include <vector>

namespace equivar {

using cplx = std::complex<double>;

struct Rule {
  std::vector<double> x, w;
  std::size_t size() const { return x.size(); }
};

// n-point Gauss-Legendre on [-1, 1].
Rule gauss_legendre(int n);
// Composite Gauss-Legendre with the given number of panels.
Rule composite_gl(double a, double b, int panels, int order = 8);
// Trapezoid rule on a full period [a, b).
Rule periodic_trapezoid(double a, double b, int n);
// At least `nodes` points: composite GL (8-point panels), or trapezoid when
// the interval is a full period of a periodic coordinate.
Rule axis_rule(double a, double b, bool full_period, int nodes);

// h_d(k) = integral over R^d of exp(i k u_1) chi(|u|) du, chi the standard bump.
// Tabulated on first use per dimension, cubic interpolation, 0 beyond k = 400.
double bump_fourier(int d, double k);
// Radial Bessel form by quadrature, independent of the table.
double bump_fourier_direct(int d, double k);

double pairwise_sum(const double* x, std::size_t n);
cplx pairwise_sum(const cplx* x, std::size_t n);

// Worker count: EQUIVAR_THREADS if set and positive, otherwise the hardware count.
int worker_count();

// Evaluates f(0..n-1) on worker threads; results come back in index order.
template <class R, class F> std::vector<R> parallel_map(int n, F&& f) {
  std::vector<R> out(static_cast<std::size_t>(n > 0 ? n : 0));
  const int workers = std::min(worker_count(), n > 1 ? n : 1);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex mu;
  auto run = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        out[i] = f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(mu);
        if (!err) err = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
  return out;
}

inline std::vector<cplx> parallel_blocks(int n, const std::function<cplx(int)>& f) {
  return parallel_map<cplx>(n, f);
}

}  // namespace equivar
