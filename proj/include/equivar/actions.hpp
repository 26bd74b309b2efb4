// Concrete catalogue actions and their isotropy chains.
//
// Every map is a template over the scalar type so the same closed form is
// evaluated on doubles, jets and duals.  Fundamental fields follow the flow
// convention X~_m = d/dt exp(tX)·m at t = 0; the normal representations
// lambda are the linearizations of the same flows, so that
// B~ at exp_x(v) equals (exp_x)_* lambda(B) v.
#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "equivar/jet.hpp"
#include "equivar/linalg.hpp"

namespace equivar {

template <class T> using Vec = std::vector<T>;

struct ChartInfo {
  std::string id;
  int dim = 0;
  std::vector<double> lo, hi;
  std::vector<bool> periodic;
  // optional constraint |q[disk_first .. disk_first+1]| < disk_radius, for up to two disks
  std::vector<int> disk_first;
  double disk_radius = 0.0;
};

struct StratumInfo {
  std::string label;
  std::string locus;
  int e = 0;           // dim of the isotropy algebra
  int c = 0;           // normal dimension of the center
  int d = 0;           // dim of the complement of the isotropy algebra
  int components = 1;
  bool principal = false;
};

struct ChainLevelInfo {
  std::string label;
  int c = 0, d = 0, e = 0, xdim = 0;
  std::vector<double> xlo, xhi;
  std::vector<bool> xperiodic;
};

struct ChainInfo {
  std::string label;
  std::vector<std::string> branch;
  int chart = 0;
  std::vector<ChainLevelInfo> levels;
  double tube_radius = 0.6;  // chordal radius of the partition function support
};

struct ActionInfo {
  std::string name;
  int n = 0, d = 0, kappa = 0;
  int ambient = 0;
  int principal_iso_dim = 0;
  Mat gram;                        // Gram matrix of the Lie algebra basis
  std::vector<double> structure;   // [X_i, X_j] = sum_k c[(i*d+j)*d+k] X_k
  std::vector<ChartInfo> charts;
  std::vector<StratumInfo> strata;
  int principal_chart = 0;
  std::vector<int> overlap_charts;  // charts also used for re-certification
  int group_params = 0;
  bool has_fiber_form = false;     // a global invariant 1-form used for fiber shifts
  bool extended = false;
  bool listed = true;
  std::string measure_zero;        // description of the part the principal chart misses
};

namespace detail {

template <class T> inline Vec<T> zeros(int n) { return Vec<T>(static_cast<std::size_t>(n), T(0.0)); }

// normal coordinates at a pole of the unit sphere: u -> (f u, sign cos|u|)
template <class T> Vec<T> sphere_normal_embed(const T& u0, const T& u1, double sign) {
  const T w = u0 * u0 + u1 * u1;
  const T f = sinc_sq(w);
  return {f * u0, f * u1, sign * cos_sq(w)};
}

// Round metric in normal coordinates: f^2 I + (4 f f' + 4 f'^2 w + f^2) u u^T.
template <class T> void sphere_normal_metric(const T& u0, const T& u1, T* g00, T* g01, T* g11) {
  const T w = u0 * u0 + u1 * u1;
  const T f = sinc_sq(w);
  const T f1 = sinc_sq_d1(w);
  const T k = 4.0 * f * f1 + 4.0 * f1 * f1 * w + f * f;
  *g00 = f * f + k * u0 * u0;
  *g01 = k * u0 * u1;
  *g11 = f * f + k * u1 * u1;
}

inline double wrap_angle(double a) {
  double r = std::fmod(a, 2.0 * M_PI);
  if (r < 0) r += 2.0 * M_PI;
  return r;
}

inline Mat rot2(double t) {
  Mat r(2, 2);
  r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return r;
}

inline Mat rodrigues(double a, double b, double c) {
  const double th = std::sqrt(a * a + b * b + c * c);
  Mat k(3, 3);
  k << 0, -c, b, c, 0, -a, -b, a, 0;
  Mat r = Mat::Identity(3, 3);
  if (th > 0) r += std::sin(th) / th * k + (1 - std::cos(th)) / (th * th) * k * k;
  return r;
}

inline std::vector<double> normal_from_embed(double x, double y, double z) {
  const double rho = std::hypot(x, y);
  if (rho == 0.0) return {0.0, 0.0};
  const double r = std::atan2(rho, z);
  return {r * x / rho, r * y / rho};
}

}  // namespace detail

// Group element in ambient form: x -> R x, tangent xi -> R xi, s -> Ad s.
struct GroupElement {
  Mat R;
  Mat Ad;
};

// ---------------------------------------------------------------- actions

class CircleOnCircle {
 public:
  static ActionInfo make_info();
  template <class T> Vec<T> embed(int, const Vec<T>& q) const { return {cos(q[0]), sin(q[0])}; }
  template <class T> Vec<T> metric(int, const Vec<T>&) const { return {T(1.0)}; }
  template <class T> Vec<T> field(int, const Vec<T>&, int) const { return {T(1.0)}; }
  template <class T> Vec<Vec<T>> annihilator(int, const Vec<T>&) const { return {}; }
  template <class T> Vec<Vec<T>> isotropy(int, const Vec<T>&) const { return {}; }
  template <class T> Vec<T> fiber_form(int, const Vec<T>&) const { return {T(1.0)}; }
  std::vector<double> chart_from_embed(int, const std::vector<double>& x) const {
    return {detail::wrap_angle(std::atan2(x[1], x[0]))};
  }
  double sing_omega_distance(const std::vector<double>&, const std::vector<double>&) const {
    return std::numeric_limits<double>::infinity();
  }
  GroupElement group_element(const std::vector<double>& t) const { return {detail::rot2(t[0]), Mat::Identity(1, 1)}; }
};

class CircleOnSphere {
 public:
  enum Chart { kSpherical = 0, kNorth = 1, kSouth = 2 };
  static ActionInfo make_info();
  template <class T> Vec<T> embed(int chart, const Vec<T>& q) const {
    if (chart == kSpherical) return {sin(q[0]) * cos(q[1]), sin(q[0]) * sin(q[1]), cos(q[0])};
    return detail::sphere_normal_embed(q[0], q[1], chart == kNorth ? 1.0 : -1.0);
  }
  template <class T> Vec<T> metric(int chart, const Vec<T>& q) const {
    if (chart == kSpherical) { const T s = sin(q[0]); return {T(1.0), T(0.0), T(0.0), s * s}; }
    T a, b, c;
    detail::sphere_normal_metric(q[0], q[1], &a, &b, &c);
    return {a, b, b, c};
  }
  template <class T> Vec<T> field(int chart, const Vec<T>& q, int) const {
    if (chart == kSpherical) return {T(0.0), T(1.0)};
    return {-q[1], q[0]};
  }
  template <class T> Vec<Vec<T>> annihilator(int chart, const Vec<T>& q) const {
    if (chart == kSpherical) return {{T(1.0), T(0.0)}};
    return {{q[0], q[1]}};
  }
  template <class T> Vec<Vec<T>> isotropy(int, const Vec<T>&) const { return {}; }
  template <class T> Vec<T> fiber_form(int, const Vec<T>&) const { throw DomainError("no global fiber form"); }
  std::vector<double> chart_from_embed(int chart, const std::vector<double>& x) const {
    if (chart == kSpherical)
      return {std::atan2(std::hypot(x[0], x[1]), x[2]), detail::wrap_angle(std::atan2(x[1], x[0]))};
    return detail::normal_from_embed(x[0], x[1], chart == kNorth ? x[2] : -x[2]);
  }
  double sing_omega_distance(const std::vector<double>& x, const std::vector<double>& xi) const {
    const double dn = x[0] * x[0] + x[1] * x[1] + (x[2] - 1) * (x[2] - 1);
    const double ds = x[0] * x[0] + x[1] * x[1] + (x[2] + 1) * (x[2] + 1);
    return std::sqrt(std::min(dn, ds) + xi[2] * xi[2]);
  }
  GroupElement group_element(const std::vector<double>& t) const {
    Mat r = Mat::Identity(3, 3);
    r.topLeftCorner(2, 2) = detail::rot2(t[0]);
    return {r, Mat::Identity(1, 1)};
  }
};

class So3OnSphere {
 public:
  enum Chart { kSpherical = 0, kSphericalX = 1 };
  static ActionInfo make_info();
  // kSphericalX is the spherical chart about the x-axis: m = P sph(q), P(a,b,c) = (c,a,b).
  template <class T> Vec<T> embed(int chart, const Vec<T>& q) const {
    Vec<T> m = {sin(q[0]) * cos(q[1]), sin(q[0]) * sin(q[1]), cos(q[0])};
    if (chart == kSphericalX) return {m[2], m[0], m[1]};
    return m;
  }
  template <class T> Vec<T> metric(int, const Vec<T>& q) const {
    const T s = sin(q[0]);
    return {T(1.0), T(0.0), T(0.0), s * s};
  }
  template <class T> Vec<T> field(int chart, const Vec<T>& q, int i) const {
    // e_i x m in the chart; for kSphericalX, P^{-1} e_x = e_z, P^{-1} e_y = e_x, P^{-1} e_z = e_y
    int k = i;
    if (chart == kSphericalX) k = (i + 2) % 3;
    const T st = sin(q[0]), ct = cos(q[0]), sp = sin(q[1]), cp = cos(q[1]);
    if (k == 0) return {-sp, -(ct / st) * cp};
    if (k == 1) return {cp, -(ct / st) * sp};
    return {T(0.0), T(1.0)};
  }
  template <class T> Vec<Vec<T>> annihilator(int, const Vec<T>&) const { return {}; }
  template <class T> Vec<Vec<T>> isotropy(int chart, const Vec<T>& q) const { return {embed(chart, q)}; }
  template <class T> Vec<T> fiber_form(int, const Vec<T>&) const { throw DomainError("no global fiber form"); }
  std::vector<double> chart_from_embed(int chart, const std::vector<double>& x) const {
    double a = x[0], b = x[1], c = x[2];
    if (chart == kSphericalX) { a = x[1]; b = x[2]; c = x[0]; }
    return {std::atan2(std::hypot(a, b), c), detail::wrap_angle(std::atan2(b, a))};
  }
  double sing_omega_distance(const std::vector<double>&, const std::vector<double>&) const {
    return std::numeric_limits<double>::infinity();
  }
  GroupElement group_element(const std::vector<double>& t) const {
    Mat r = detail::rodrigues(t[0], t[1], t[2]);
    return {r, r};
  }
};

class TorusOnS3 {
 public:
  enum Chart { kToroidal = 0, kTube0 = 1, kTube1 = 2 };
  static ActionInfo make_info();
  template <class T> Vec<T> embed(int chart, const Vec<T>& q) const {
    if (chart == kToroidal)
      return {cos(q[0]) * cos(q[1]), cos(q[0]) * sin(q[1]), sin(q[0]) * cos(q[2]), sin(q[0]) * sin(q[2])};
    const T w = q[1] * q[1] + q[2] * q[2];
    const T c = cos_sq(w), f = sinc_sq(w);
    if (chart == kTube0) return {c * cos(q[0]), c * sin(q[0]), f * q[1], f * q[2]};
    return {f * q[1], f * q[2], c * cos(q[0]), c * sin(q[0])};
  }
  template <class T> Vec<T> metric(int chart, const Vec<T>& q) const {
    if (chart == kToroidal) {
      const T c = cos(q[0]), s = sin(q[0]);
      return {T(1.0), T(0.0), T(0.0), T(0.0), c * c, T(0.0), T(0.0), T(0.0), s * s};
    }
    const T c = cos_sq(q[1] * q[1] + q[2] * q[2]);
    T a, b, e;
    detail::sphere_normal_metric(q[1], q[2], &a, &b, &e);
    return {c * c, T(0.0), T(0.0), T(0.0), a, b, T(0.0), b, e};
  }
  template <class T> Vec<T> field(int chart, const Vec<T>& q, int i) const {
    if (chart == kToroidal) return i == 0 ? Vec<T>{T(0.0), T(1.0), T(0.0)} : Vec<T>{T(0.0), T(0.0), T(1.0)};
    const int along = chart == kTube0 ? 0 : 1;  // generator moving the center circle
    if (i == along) return {T(1.0), T(0.0), T(0.0)};
    return {T(0.0), -q[2], q[1]};
  }
  template <class T> Vec<Vec<T>> annihilator(int chart, const Vec<T>& q) const {
    if (chart == kToroidal) return {{T(1.0), T(0.0), T(0.0)}};
    return {{T(0.0), q[1], q[2]}};
  }
  template <class T> Vec<Vec<T>> isotropy(int, const Vec<T>&) const { return {}; }
  template <class T> Vec<T> fiber_form(int, const Vec<T>&) const { throw DomainError("no global fiber form"); }
  std::vector<double> chart_from_embed(int chart, const std::vector<double>& x) const {
    const double r1 = std::hypot(x[0], x[1]), r2 = std::hypot(x[2], x[3]);
    if (chart == kToroidal)
      return {std::atan2(r2, r1), detail::wrap_angle(std::atan2(x[1], x[0])), detail::wrap_angle(std::atan2(x[3], x[2]))};
    if (chart == kTube0) {
      const double r = std::atan2(r2, r1);
      if (r2 == 0) return {detail::wrap_angle(std::atan2(x[1], x[0])), 0.0, 0.0};
      return {detail::wrap_angle(std::atan2(x[1], x[0])), r * x[2] / r2, r * x[3] / r2};
    }
    const double r = std::atan2(r1, r2);
    if (r1 == 0) return {detail::wrap_angle(std::atan2(x[3], x[2])), 0.0, 0.0};
    return {detail::wrap_angle(std::atan2(x[3], x[2])), r * x[0] / r1, r * x[1] / r1};
  }
  double sing_omega_distance(const std::vector<double>& x, const std::vector<double>& xi) const {
    const double r1 = std::hypot(x[0], x[1]), r2 = std::hypot(x[2], x[3]);
    const double d0 = (1 - r1) * (1 - r1) + r2 * r2 + xi[0] * xi[0] + xi[1] * xi[1];
    const double d1 = (1 - r2) * (1 - r2) + r1 * r1 + xi[2] * xi[2] + xi[3] * xi[3];
    return std::sqrt(std::min(d0, d1));
  }
  GroupElement group_element(const std::vector<double>& t) const {
    Mat r = Mat::Zero(4, 4);
    r.topLeftCorner(2, 2) = detail::rot2(t[0]);
    r.bottomRightCorner(2, 2) = detail::rot2(t[1]);
    return {r, Mat::Identity(2, 2)};
  }
};

// T^2 acting on S^2 x S^2 by independent rotations; carries the depth-2 chain.
class TorusOnSpherePair {
 public:
  enum Chart { kProductSpherical = 0, kProductNormal = 1 };
  static ActionInfo make_info();
  template <class T> Vec<T> embed(int chart, const Vec<T>& q) const {
    if (chart == kProductSpherical)
      return {sin(q[0]) * cos(q[1]), sin(q[0]) * sin(q[1]), cos(q[0]),
              sin(q[2]) * cos(q[3]), sin(q[2]) * sin(q[3]), cos(q[2])};
    Vec<T> a = detail::sphere_normal_embed(q[0], q[1], 1.0), b = detail::sphere_normal_embed(q[2], q[3], 1.0);
    return {a[0], a[1], a[2], b[0], b[1], b[2]};
  }
  template <class T> Vec<T> metric(int chart, const Vec<T>& q) const {
    Vec<T> g = detail::zeros<T>(16);
    if (chart == kProductSpherical) {
      const T s1 = sin(q[0]), s2 = sin(q[2]);
      g[0] = T(1.0); g[5] = s1 * s1; g[10] = T(1.0); g[15] = s2 * s2;
      return g;
    }
    T a, b, c;
    detail::sphere_normal_metric(q[0], q[1], &a, &b, &c);
    g[0] = a; g[1] = b; g[4] = b; g[5] = c;
    detail::sphere_normal_metric(q[2], q[3], &a, &b, &c);
    g[10] = a; g[11] = b; g[14] = b; g[15] = c;
    return g;
  }
  template <class T> Vec<T> field(int chart, const Vec<T>& q, int i) const {
    Vec<T> v = detail::zeros<T>(4);
    if (chart == kProductSpherical) { v[i == 0 ? 1 : 3] = T(1.0); return v; }
    const int o = i == 0 ? 0 : 2;
    v[o] = -q[o + 1];
    v[o + 1] = q[o];
    return v;
  }
  template <class T> Vec<Vec<T>> annihilator(int chart, const Vec<T>& q) const {
    if (chart == kProductSpherical)
      return {{T(1.0), T(0.0), T(0.0), T(0.0)}, {T(0.0), T(0.0), T(1.0), T(0.0)}};
    return {{q[0], q[1], T(0.0), T(0.0)}, {T(0.0), T(0.0), q[2], q[3]}};
  }
  template <class T> Vec<Vec<T>> isotropy(int, const Vec<T>&) const { return {}; }
  template <class T> Vec<T> fiber_form(int, const Vec<T>&) const { throw DomainError("no global fiber form"); }
  std::vector<double> chart_from_embed(int chart, const std::vector<double>& x) const {
    if (chart == kProductSpherical)
      return {std::atan2(std::hypot(x[0], x[1]), x[2]), detail::wrap_angle(std::atan2(x[1], x[0])),
              std::atan2(std::hypot(x[3], x[4]), x[5]), detail::wrap_angle(std::atan2(x[4], x[3]))};
    auto a = detail::normal_from_embed(x[0], x[1], x[2]);
    auto b = detail::normal_from_embed(x[3], x[4], x[5]);
    return {a[0], a[1], b[0], b[1]};
  }
  double sing_omega_distance(const std::vector<double>& x, const std::vector<double>& xi) const {
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 2; ++k) {
      const double* m = &x[3 * k];
      const double pz = std::min((m[2] - 1) * (m[2] - 1), (m[2] + 1) * (m[2] + 1));
      best = std::min(best, m[0] * m[0] + m[1] * m[1] + pz + xi[3 * k + 2] * xi[3 * k + 2]);
    }
    return std::sqrt(best);
  }
  GroupElement group_element(const std::vector<double>& t) const {
    Mat r = Mat::Identity(6, 6);
    r.block(0, 0, 2, 2) = detail::rot2(t[0]);
    r.block(3, 3, 2, 2) = detail::rot2(t[1]);
    return {r, Mat::Identity(2, 2)};
  }
};

// ---------------------------------------------------------------- chains
//
// Level j has normal coefficients w in R^{c_j}.  exp maps (x, w) into the parent
// space: chart coordinates for level 0, normal coefficients of level j-1 otherwise.
// x holds the center parameters of all levels concatenated.

// Fixed point of the circle action on S^2, in pole normal coordinates.
class PoleChain {
 public:
  explicit PoleChain(int chart) : chart_(chart) {}
  ChainInfo make_info(const std::string& label) const;
  template <class T> Vec<T> exp(int, const Vec<T>&, const Vec<T>& w) const { return w; }
  template <class T> Vec<T> rep(int, const Vec<T>&, const Vec<T>& y, const Vec<T>& w) const {
    return {-(y[0] * w[1]), y[0] * w[0]};
  }
  template <class T> Vec<Vec<T>> a_basis(int, const Vec<T>&) const { return {}; }
  template <class T> Vec<Vec<T>> b_basis(int, const Vec<T>&) const { return {{T(1.0)}}; }
  template <class T> Vec<T> center(int, const Vec<T>&) const { return {T(0.0), T(0.0)}; }
  template <class T> Vec<Vec<T>> frame(int, const Vec<T>&) const { return {{T(1.0), T(0.0)}, {T(0.0), T(1.0)}}; }
  double center_distance(const std::vector<double>& x) const {
    const double z = chart_ == CircleOnSphere::kNorth ? 1.0 : -1.0;
    return std::sqrt(x[0] * x[0] + x[1] * x[1] + (x[2] - z) * (x[2] - z));
  }
  int chart() const { return chart_; }

 private:
  int chart_;
};

// Exceptional circle of the torus action on S^3, in tube normal coordinates (phi, v).
class TubeChain {
 public:
  explicit TubeChain(int which) : which_(which) {}
  ChainInfo make_info(const std::string& label) const;
  template <class T> Vec<T> exp(int, const Vec<T>& x, const Vec<T>& w) const { return {x[0], w[0], w[1]}; }
  template <class T> Vec<T> rep(int, const Vec<T>&, const Vec<T>& y, const Vec<T>& w) const {
    const T& b = y[iso()];
    return {-(b * w[1]), b * w[0]};
  }
  template <class T> Vec<Vec<T>> a_basis(int, const Vec<T>&) const {
    Vec<T> a = detail::zeros<T>(2);
    a[1 - iso()] = T(1.0);
    return {a};
  }
  template <class T> Vec<Vec<T>> b_basis(int, const Vec<T>&) const {
    Vec<T> b = detail::zeros<T>(2);
    b[iso()] = T(1.0);
    return {b};
  }
  template <class T> Vec<T> center(int, const Vec<T>& x) const { return {x[0], T(0.0), T(0.0)}; }
  template <class T> Vec<Vec<T>> frame(int, const Vec<T>&) const {
    return {{T(0.0), T(1.0), T(0.0)}, {T(0.0), T(0.0), T(1.0)}};
  }
  double center_distance(const std::vector<double>& x) const {
    const double r1 = std::hypot(x[0], x[1]), r2 = std::hypot(x[2], x[3]);
    return which_ == 0 ? std::hypot(1 - r1, r2) : std::hypot(1 - r2, r1);
  }
  int chart() const { return which_ == 0 ? TorusOnS3::kTube0 : TorusOnS3::kTube1; }

 private:
  int iso() const { return which_ == 0 ? 1 : 0; }
  int which_;
};

// Depth-2 chain of T^2 on S^2 x S^2: the fixed point (N, N), then the circle
// {(e(t), 0)} of the unit sphere in its normal space, on which X_2 is isotropic.
class PairChain {
 public:
  ChainInfo make_info(const std::string& label) const;
  template <class T> Vec<T> exp(int level, const Vec<T>& x, const Vec<T>& w) const {
    if (level == 0) return w;
    const T r2 = w[0] * w[0] + w[1] * w[1];
    const T c = cos_sq(r2), f = sinc_sq(r2);
    return {c * cos(x[0]), c * sin(x[0]), f * w[0], f * w[1]};
  }
  template <class T> Vec<T> rep(int level, const Vec<T>&, const Vec<T>& y, const Vec<T>& w) const {
    if (level == 0) return {-(y[0] * w[1]), y[0] * w[0], -(y[1] * w[3]), y[1] * w[2]};
    return {-(y[1] * w[1]), y[1] * w[0]};
  }
  template <class T> Vec<Vec<T>> a_basis(int level, const Vec<T>&) const {
    if (level == 0) return {};
    return {{T(1.0), T(0.0)}};
  }
  template <class T> Vec<Vec<T>> b_basis(int level, const Vec<T>&) const {
    if (level == 0) return {{T(1.0), T(0.0)}, {T(0.0), T(1.0)}};
    return {{T(0.0), T(1.0)}};
  }
  template <class T> Vec<T> center(int level, const Vec<T>& x) const {
    if (level == 0) return detail::zeros<T>(4);
    return {cos(x[0]), sin(x[0]), T(0.0), T(0.0)};
  }
  template <class T> Vec<Vec<T>> frame(int level, const Vec<T>&) const {
    if (level == 0) {
      Vec<Vec<T>> f(4, detail::zeros<T>(4));
      for (int i = 0; i < 4; ++i) f[i][i] = T(1.0);
      return f;
    }
    return {{T(0.0), T(0.0), T(1.0), T(0.0)}, {T(0.0), T(0.0), T(0.0), T(1.0)}};
  }
  double center_distance(const std::vector<double>& x) const {
    return std::sqrt(x[0] * x[0] + x[1] * x[1] + (x[2] - 1) * (x[2] - 1) + x[3] * x[3] + x[4] * x[4] +
                     (x[5] - 1) * (x[5] - 1));
  }
  int chart() const { return TorusOnSpherePair::kProductNormal; }
};

}  // namespace equivar
