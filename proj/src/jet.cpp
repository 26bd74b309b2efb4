#include "equivar/jet.hpp"

#include <cmath>

namespace equivar {

namespace {

constexpr int kTerms = 48;

// f(w) = sum c_k w^k; out[j] = f^{(j)}(w), j = 0..3
void series_derivs(const double* c, double w, double out[4]) {
  if (!(std::fabs(w) <= kSeriesMaxW)) throw DomainError("series argument out of range");
  for (int j = 0; j < 4; ++j) out[j] = 0.0;
  // Horner per derivative order, highest terms first.
  for (int j = 0; j < 4; ++j) {
    double acc = 0.0;
    for (int k = kTerms - 1; k >= j; --k) {
      double fall = 1.0;
      for (int r = 0; r < j; ++r) fall *= double(k - r);
      acc = acc * w + c[k] * fall;
    }
    out[j] = acc;
  }
}

struct Coeffs {
  double sinc[kTerms];
  double cosine[kTerms];
  Coeffs() {
    double f = 1.0;  // (2k)!
    for (int k = 0; k < kTerms; ++k) {
      if (k > 0) f *= double(2 * k) * double(2 * k - 1);
      const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
      cosine[k] = sgn / f;
      sinc[k] = sgn / (f * double(2 * k + 1));
    }
  }
};

const Coeffs& coeffs() {
  static const Coeffs c;
  return c;
}

}  // namespace

void sinc_sq_derivs(double w, double out[4]) { series_derivs(coeffs().sinc, w, out); }
void cos_sq_derivs(double w, double out[4]) { series_derivs(coeffs().cosine, w, out); }

}  // namespace equivar
