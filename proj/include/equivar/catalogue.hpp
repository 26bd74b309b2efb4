// Action catalogue: type-erased access to the concrete actions, chains and
// amplitudes.
#pragma once

#include <string>
#include <variant>
#include <vector>

#include "equivar/actions.hpp"

namespace equivar {

using ActionImpl = std::variant<CircleOnCircle, CircleOnSphere, So3OnSphere, TorusOnS3, TorusOnSpherePair>;
using ChainImpl = std::variant<PoleChain, TubeChain, PairChain>;

class IsotropyChain {
 public:
  IsotropyChain(ChainImpl impl, ChainInfo info) : impl_(std::move(impl)), info_(std::move(info)) {}
  const ChainInfo& info() const { return info_; }
  int depth() const { return int(info_.levels.size()); }
  int chart() const { return info_.chart; }

  template <class T> Vec<T> exp(int level, const Vec<T>& x, const Vec<T>& w) const {
    return std::visit([&](const auto& c) { return c.template exp<T>(level, x, w); }, impl_);
  }
  template <class T> Vec<T> rep(int level, const Vec<T>& x, const Vec<T>& y, const Vec<T>& w) const {
    return std::visit([&](const auto& c) { return c.template rep<T>(level, x, y, w); }, impl_);
  }
  template <class T> Vec<Vec<T>> a_basis(int level, const Vec<T>& x) const {
    return std::visit([&](const auto& c) { return c.template a_basis<T>(level, x); }, impl_);
  }
  template <class T> Vec<Vec<T>> b_basis(int level, const Vec<T>& x) const {
    return std::visit([&](const auto& c) { return c.template b_basis<T>(level, x); }, impl_);
  }
  template <class T> Vec<T> center(int level, const Vec<T>& x) const {
    return std::visit([&](const auto& c) { return c.template center<T>(level, x); }, impl_);
  }
  template <class T> Vec<Vec<T>> frame(int level, const Vec<T>& x) const {
    return std::visit([&](const auto& c) { return c.template frame<T>(level, x); }, impl_);
  }
  // Chordal distance of an ambient point to the level-0 center.
  double center_distance(const std::vector<double>& x) const {
    return std::visit([&](const auto& c) { return c.center_distance(x); }, impl_);
  }
  // Offset of level j's center parameters inside the concatenated x vector.
  int x_offset(int level) const;
  int x_total() const { return x_offset(depth()); }

 private:
  ChainImpl impl_;
  ChainInfo info_;
};

class GroupActionSpec {
 public:
  GroupActionSpec(ActionImpl impl, ActionInfo info, std::vector<IsotropyChain> chains)
      : impl_(std::move(impl)), info_(std::move(info)), chains_(std::move(chains)) {}

  const ActionInfo& info() const { return info_; }
  const std::string& name() const { return info_.name; }
  int n() const { return info_.n; }
  int d() const { return info_.d; }
  int kappa() const { return info_.kappa; }
  const std::vector<IsotropyChain>& chains() const { return chains_; }
  const ChartInfo& chart(int c) const;
  int chart_index(const std::string& id) const;  // throws UnknownName
  bool in_domain(int chart, const std::vector<double>& q) const;
  void check_domain(int chart, const std::vector<double>& q) const;  // throws DomainError

  template <class T> Vec<T> embed(int chart, const Vec<T>& q) const {
    return std::visit([&](const auto& a) { return a.template embed<T>(chart, q); }, impl_);
  }
  template <class T> Vec<T> metric(int chart, const Vec<T>& q) const {
    return std::visit([&](const auto& a) { return a.template metric<T>(chart, q); }, impl_);
  }
  // X~_i in chart coordinates
  template <class T> Vec<T> basis_field(int chart, const Vec<T>& q, int i) const {
    return std::visit([&](const auto& a) { return a.template field<T>(chart, q, i); }, impl_);
  }
  template <class T> Vec<Vec<T>> annihilator(int chart, const Vec<T>& q) const {
    return std::visit([&](const auto& a) { return a.template annihilator<T>(chart, q); }, impl_);
  }
  template <class T> Vec<Vec<T>> isotropy(int chart, const Vec<T>& q) const {
    return std::visit([&](const auto& a) { return a.template isotropy<T>(chart, q); }, impl_);
  }
  template <class T> Vec<T> fiber_form(int chart, const Vec<T>& q) const {
    return std::visit([&](const auto& a) { return a.template fiber_form<T>(chart, q); }, impl_);
  }
  std::vector<double> chart_from_embed(int chart, const std::vector<double>& x) const {
    return std::visit([&](const auto& a) { return a.chart_from_embed(chart, x); }, impl_);
  }
  double sing_omega_distance(const std::vector<double>& x, const std::vector<double>& xi) const {
    return std::visit([&](const auto& a) { return a.sing_omega_distance(x, xi); }, impl_);
  }
  GroupElement group_element(const std::vector<double>& t) const {
    return std::visit([&](const auto& a) { return a.group_element(t); }, impl_);
  }

 private:
  ActionImpl impl_;
  ActionInfo info_;
  std::vector<IsotropyChain> chains_;
};

// Names accepted by load_action; list_actions() gives the listed ones.
const GroupActionSpec& load_action(const std::string& name);
std::vector<std::string> list_actions();
std::vector<std::string> all_actions();

// a(eta, X) = chi(|m - q0| / r_q) chi(|p - p0 theta|_g / R) chi(|s - s0| / R_s),
// chi(t) = exp(1 - 1/(1 - t^2)) for |t| < 1.  theta is the action's global
// fiber form and p0 must be 0 when it has none.
struct AmplitudeSpec {
  std::string id;
  std::string action;
  bool zero = false;
  std::vector<double> q0;  // ambient center
  double r_q = 1.0;
  double p0 = 0.0;
  double R = 2.0;
  std::vector<double> s0;  // Lie algebra coefficients
  double R_s = 1.0;
  double scale = 1.0;
};

double bump(double t);
// smooth step: 1 for t <= 0, 0 for t >= 1
double smooth_step(double t);

const AmplitudeSpec& load_amplitude(const std::string& action, const std::string& id);
std::string default_amplitude(const std::string& action);
std::vector<std::string> list_amplitudes(const std::string& action);

// Frozen leading coefficients, with provenance.
struct ReferenceValue {
  double value;
  const char* provenance;
};
ReferenceValue reference_L0(const std::string& action, const std::string& amplitude_id);

}  // namespace equivar
