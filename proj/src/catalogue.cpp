#include "equivar/catalogue.hpp"

#include <cmath>
#include <map>

namespace equivar {

namespace {

ChartInfo box_chart(std::string id, std::vector<double> lo, std::vector<double> hi, std::vector<bool> per) {
  ChartInfo c;
  c.id = std::move(id);
  c.dim = int(lo.size());
  c.lo = std::move(lo);
  c.hi = std::move(hi);
  c.periodic = std::move(per);
  return c;
}

ChartInfo disk_chart(std::string id, int dim, std::vector<int> disks, double r, std::vector<bool> per,
                     std::vector<double> lo, std::vector<double> hi) {
  ChartInfo c = box_chart(std::move(id), std::move(lo), std::move(hi), std::move(per));
  c.dim = dim;
  c.disk_first = std::move(disks);
  c.disk_radius = r;
  return c;
}

constexpr double kTwoPi = 2.0 * M_PI;

}  // namespace

ActionInfo CircleOnCircle::make_info() {
  ActionInfo a;
  a.name = "circle_on_circle";
  a.n = 1; a.d = 1; a.kappa = 1; a.ambient = 2;
  a.gram = Mat::Identity(1, 1);
  a.structure = {0.0};
  a.charts = {box_chart("angle", {0.0}, {kTwoPi}, {true})};
  a.strata = {{"trivial", "all of M", 0, 0, 1, 1, true}};
  a.group_params = 1;
  a.has_fiber_form = true;
  a.measure_zero = "none";
  return a;
}

ActionInfo CircleOnSphere::make_info() {
  ActionInfo a;
  a.name = "circle_on_sphere";
  a.n = 2; a.d = 1; a.kappa = 1; a.ambient = 3;
  a.gram = Mat::Identity(1, 1);
  a.structure = {0.0};
  a.charts = {box_chart("spherical", {0.0, 0.0}, {M_PI, kTwoPi}, {false, true}),
              disk_chart("pole_north", 2, {0}, 1.4, {false, false}, {-1.4, -1.4}, {1.4, 1.4}),
              disk_chart("pole_south", 2, {0}, 1.4, {false, false}, {-1.4, -1.4}, {1.4, 1.4})};
  a.strata = {{"S1", "poles (0,0,+-1)", 1, 2, 0, 2, false}, {"trivial", "complement of the poles", 0, 0, 1, 1, true}};
  a.overlap_charts = {kNorth, kSouth};
  a.group_params = 1;
  a.measure_zero = "poles";
  return a;
}

ActionInfo So3OnSphere::make_info() {
  ActionInfo a;
  a.name = "so3_on_sphere";
  a.n = 2; a.d = 3; a.kappa = 2; a.ambient = 3;
  a.principal_iso_dim = 1;
  a.gram = 2.0 * Mat::Identity(3, 3);  // tr(A^T B) on so(3)
  a.structure.assign(27, 0.0);
  auto eps = [](int i, int j, int k) { return double((i - j) * (j - k) * (k - i)) / 2.0; };
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) a.structure[(i * 3 + j) * 3 + k] = eps(i, j, k);
  a.charts = {box_chart("spherical", {0.0, 0.0}, {M_PI, kTwoPi}, {false, true}),
              box_chart("spherical_x", {0.0, 0.0}, {M_PI, kTwoPi}, {false, true})};
  a.strata = {{"SO2", "all of M (transitive)", 1, 0, 2, 1, true}};
  a.overlap_charts = {kSphericalX};
  a.group_params = 3;
  a.measure_zero = "poles of the chart";
  return a;
}

ActionInfo TorusOnS3::make_info() {
  ActionInfo a;
  a.name = "torus_on_s3";
  a.n = 3; a.d = 2; a.kappa = 2; a.ambient = 4;
  a.gram = Mat::Identity(2, 2);
  a.structure.assign(8, 0.0);
  a.charts = {box_chart("toroidal", {0.0, 0.0, 0.0}, {M_PI / 2, kTwoPi, kTwoPi}, {false, true, true}),
              disk_chart("tube_0", 3, {1}, 1.2, {true, false, false}, {0.0, -1.2, -1.2}, {kTwoPi, 1.2, 1.2}),
              disk_chart("tube_1", 3, {1}, 1.2, {true, false, false}, {0.0, -1.2, -1.2}, {kTwoPi, 1.2, 1.2})};
  a.strata = {{"S1", "circles |z1| = 1 and |z2| = 1", 1, 2, 1, 2, false},
              {"trivial", "|z1| |z2| > 0", 0, 0, 2, 1, true}};
  a.overlap_charts = {kTube0, kTube1};
  a.group_params = 2;
  a.extended = true;
  a.measure_zero = "exceptional circles";
  return a;
}

ActionInfo TorusOnSpherePair::make_info() {
  ActionInfo a;
  a.name = "torus_on_sphere_pair";
  a.n = 4; a.d = 2; a.kappa = 2; a.ambient = 6;
  a.gram = Mat::Identity(2, 2);
  a.structure.assign(8, 0.0);
  a.charts = {box_chart("product_spherical", {0.0, 0.0, 0.0, 0.0}, {M_PI, kTwoPi, M_PI, kTwoPi},
                        {false, true, false, true}),
              disk_chart("product_normal", 4, {0, 2}, 1.4, {false, false, false, false}, {-1.4, -1.4, -1.4, -1.4},
                         {1.4, 1.4, 1.4, 1.4})};
  a.strata = {{"T2", "pairs of poles", 2, 4, 0, 4, false},
              {"S1", "one factor at a pole", 1, 2, 1, 4, false},
              {"trivial", "no factor at a pole", 0, 0, 2, 1, true}};
  a.overlap_charts = {kProductNormal};
  a.group_params = 2;
  a.extended = true;
  a.listed = false;
  a.measure_zero = "points with a factor at a pole";
  return a;
}

ChainInfo PoleChain::make_info(const std::string& label) const {
  ChainInfo c;
  c.label = label;
  c.branch = {"S1", "trivial"};
  c.chart = chart_;
  ChainLevelInfo l;
  l.label = label;
  l.c = 2; l.d = 0; l.e = 1; l.xdim = 0;
  c.levels = {l};
  return c;
}

ChainInfo TubeChain::make_info(const std::string& label) const {
  ChainInfo c;
  c.label = label;
  c.branch = {"S1", "trivial"};
  c.chart = chart();
  ChainLevelInfo l;
  l.label = label;
  l.c = 2; l.d = 1; l.e = 1; l.xdim = 1;
  l.xlo = {0.0}; l.xhi = {kTwoPi}; l.xperiodic = {true};
  c.levels = {l};
  return c;
}

ChainInfo PairChain::make_info(const std::string& label) const {
  ChainInfo c;
  c.label = label;
  c.branch = {"T2", "S1", "trivial"};
  c.chart = chart();
  ChainLevelInfo l1, l2;
  l1.label = "fixed point (N,N)";
  l1.c = 4; l1.d = 0; l1.e = 2; l1.xdim = 0;
  l2.label = "circle fixed by X2 in the normal sphere";
  l2.c = 2; l2.d = 1; l2.e = 1; l2.xdim = 1;
  l2.xlo = {0.0}; l2.xhi = {kTwoPi}; l2.xperiodic = {true};
  c.levels = {l1, l2};
  return c;
}

int IsotropyChain::x_offset(int level) const {
  int o = 0;
  for (int j = 0; j < level; ++j) o += info_.levels[j].xdim;
  return o;
}

const ChartInfo& GroupActionSpec::chart(int c) const {
  if (c < 0 || c >= int(info_.charts.size())) throw UnknownName("unknown chart index " + std::to_string(c));
  return info_.charts[c];
}

int GroupActionSpec::chart_index(const std::string& id) const {
  for (std::size_t i = 0; i < info_.charts.size(); ++i)
    if (info_.charts[i].id == id) return int(i);
  throw UnknownName("unknown chart '" + id + "' for action " + info_.name);
}

bool GroupActionSpec::in_domain(int c, const std::vector<double>& q) const {
  const ChartInfo& ch = chart(c);
  if (int(q.size()) != ch.dim) return false;
  for (int i = 0; i < ch.dim; ++i) {
    if (!std::isfinite(q[i])) return false;
    if (!ch.periodic[i] && !(q[i] > ch.lo[i] && q[i] < ch.hi[i])) return false;
  }
  for (int f : ch.disk_first)
    if (std::hypot(q[f], q[f + 1]) >= ch.disk_radius) return false;
  return true;
}

void GroupActionSpec::check_domain(int c, const std::vector<double>& q) const {
  if (!in_domain(c, q)) throw DomainError("point outside the domain of chart " + chart(c).id);
}

namespace {

GroupActionSpec build(const std::string& name) {
  if (name == "circle_on_circle") return GroupActionSpec(CircleOnCircle{}, CircleOnCircle::make_info(), {});
  if (name == "circle_on_sphere") {
    PoleChain n(CircleOnSphere::kNorth), s(CircleOnSphere::kSouth);
    return GroupActionSpec(CircleOnSphere{}, CircleOnSphere::make_info(),
                           {IsotropyChain(n, n.make_info("north")), IsotropyChain(s, s.make_info("south"))});
  }
  if (name == "so3_on_sphere") return GroupActionSpec(So3OnSphere{}, So3OnSphere::make_info(), {});
  if (name == "torus_on_s3") {
    TubeChain a(0), b(1);
    return GroupActionSpec(TorusOnS3{}, TorusOnS3::make_info(),
                           {IsotropyChain(a, a.make_info("circle_0")), IsotropyChain(b, b.make_info("circle_1"))});
  }
  if (name == "torus_on_sphere_pair") {
    PairChain c;
    return GroupActionSpec(TorusOnSpherePair{}, TorusOnSpherePair::make_info(),
                           {IsotropyChain(c, c.make_info("pair_NN"))});
  }
  throw UnknownName("unknown action '" + name + "'");
}

}  // namespace

std::vector<std::string> all_actions() {
  return {"circle_on_circle", "circle_on_sphere", "so3_on_sphere", "torus_on_s3", "torus_on_sphere_pair"};
}

std::vector<std::string> list_actions() {
  std::vector<std::string> out;
  for (const auto& n : all_actions())
    if (load_action(n).info().listed) out.push_back(n);
  return out;
}

const GroupActionSpec& load_action(const std::string& name) {
  static const std::map<std::string, GroupActionSpec> registry = [] {
    std::map<std::string, GroupActionSpec> m;
    for (const auto& n : all_actions()) m.emplace(n, build(n));
    return m;
  }();
  auto it = registry.find(name);
  if (it == registry.end()) throw UnknownName("unknown action '" + name + "'");
  return it->second;
}

// ---------------------------------------------------------------- amplitudes

namespace {

std::vector<AmplitudeSpec> make_amplitudes() {
  std::vector<AmplitudeSpec> v;
  auto add = [&](AmplitudeSpec a) { v.push_back(std::move(a)); };
  {
    AmplitudeSpec a;
    a.id = "bump_A"; a.action = "circle_on_circle";
    a.q0 = {std::cos(1.0), std::sin(1.0)}; a.r_q = 1.0;
    a.p0 = 0.5; a.R = 2.0; a.s0 = {0.3}; a.R_s = 1.0;
    add(a);
  }
  {
    AmplitudeSpec a;
    a.id = "bump_B"; a.action = "circle_on_sphere";
    a.q0 = {std::sin(1.3), 0.0, std::cos(1.3)}; a.r_q = 1.6;
    a.R = 2.0; a.s0 = {0.0}; a.R_s = 1.0;
    add(a);
    a.id = "bump_B_equator"; a.q0 = {1.0, 0.0, 0.0}; a.r_q = 0.5;
    add(a);
  }
  {
    AmplitudeSpec a;
    a.id = "bump_C"; a.action = "so3_on_sphere";
    a.q0 = {1.0, 0.0, 0.0}; a.r_q = 0.9;
    a.R = 1.0; a.s0 = {0.0, 0.0, 0.0}; a.R_s = 1.0;
    add(a);
  }
  {
    AmplitudeSpec a;
    a.id = "bump_D"; a.action = "torus_on_s3";
    a.q0 = {std::sqrt(0.5), 0.0, std::sqrt(0.5), 0.0}; a.r_q = 1.2;
    a.R = 2.0; a.s0 = {0.0, 0.0}; a.R_s = 1.0;
    add(a);
  }
  {
    AmplitudeSpec a;
    a.id = "bump_E"; a.action = "torus_on_sphere_pair";
    a.q0 = {std::sin(1.3), 0.0, std::cos(1.3), std::sin(1.3), 0.0, std::cos(1.3)}; a.r_q = 1.6;
    a.R = 2.0; a.s0 = {0.0, 0.0}; a.R_s = 1.0;
    add(a);
  }
  for (const auto& n : all_actions()) {
    AmplitudeSpec z;
    z.id = "zero"; z.action = n; z.zero = true;
    const auto& act = load_action(n);
    z.q0.assign(static_cast<std::size_t>(act.info().ambient), 0.0);
    z.s0.assign(static_cast<std::size_t>(act.d()), 0.0);
    add(z);
  }
  return v;
}

const std::vector<AmplitudeSpec>& amplitudes() {
  static const std::vector<AmplitudeSpec> v = make_amplitudes();
  return v;
}

}  // namespace

const AmplitudeSpec& load_amplitude(const std::string& action, const std::string& id) {
  for (const auto& a : amplitudes())
    if (a.action == action && a.id == id) return a;
  throw UnknownName("unknown amplitude '" + id + "' for action " + action);
}

std::string default_amplitude(const std::string& action) {
  if (action == "circle_on_circle") return "bump_A";
  if (action == "circle_on_sphere") return "bump_B";
  if (action == "so3_on_sphere") return "bump_C";
  if (action == "torus_on_s3") return "bump_D";
  if (action == "torus_on_sphere_pair") return "bump_E";
  throw UnknownName("unknown action '" + action + "'");
}

std::vector<std::string> list_amplitudes(const std::string& action) {
  std::vector<std::string> out;
  for (const auto& a : amplitudes())
    if (a.action == action) out.push_back(a.id);
  return out;
}

ReferenceValue reference_L0(const std::string& action, const std::string& id) {
  load_amplitude(action, id);
  if (id == "zero") return {0.0, "zero amplitude"};
  if (action == "circle_on_circle" && id == "bump_A")
    return {1.0443556480546929, "tests/oracles/reference_values.py: 1-dim integral of a over the critical circle"};
  if (action == "circle_on_sphere" && id == "bump_B")
    return {10.761151749500354, "tests/oracles/reference_values.py: separable integral over Reg C"};
  throw UnknownName("no frozen reference for (" + action + ", " + id + ")");
}

}  // namespace equivar
