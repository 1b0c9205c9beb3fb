#include "config.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <fstream>
#include <set>

namespace larche::cli {
using nlohmann::json;

namespace {

// Typed access to one JSON object; rejects keys that were never read.
class Obj {
 public:
  Obj(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw SchemaError(where_ + ": expected an object");
  }

  bool has(const std::string& k) const { return j_.contains(k); }

  double num(const std::string& k, double def) {
    if (!take(k)) return def;
    return num_at(k);
  }
  double num(const std::string& k) {
    require(k);
    return num_at(k);
  }
  int integer(const std::string& k, int def) {
    if (!take(k)) return def;
    const json& v = j_.at(k);
    if (!v.is_number_integer()) throw SchemaError(path(k) + ": expected an integer");
    return v.get<int>();
  }
  bool flag(const std::string& k, bool def) {
    if (!take(k)) return def;
    const json& v = j_.at(k);
    if (!v.is_boolean()) throw SchemaError(path(k) + ": expected a boolean");
    return v.get<bool>();
  }
  std::string str(const std::string& k, const std::string& def) {
    if (!take(k)) return def;
    const json& v = j_.at(k);
    if (!v.is_string()) throw SchemaError(path(k) + ": expected a string");
    return v.get<std::string>();
  }
  std::vector<double> numbers(const std::string& k) {
    require(k);
    const json& v = j_.at(k);
    if (!v.is_array()) throw SchemaError(path(k) + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) throw SchemaError(path(k) + ": expected an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }
  Vec2 point(const std::string& k, Vec2 def) {
    if (!take(k)) return def;
    return as_point(j_.at(k), path(k));
  }
  const json* sub(const std::string& k) { return take(k) ? &j_.at(k) : nullptr; }
  const json& sub_required(const std::string& k) {
    require(k);
    return j_.at(k);
  }
  std::string path(const std::string& k) const { return where_ + "." + k; }

  void done() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw SchemaError(path(k) + ": unknown key");
  }

  static Vec2 as_point(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      throw SchemaError(where + ": expected [x, y]");
    return {v[0].get<double>(), v[1].get<double>()};
  }

 private:
  bool take(const std::string& k) {
    seen_.insert(k);
    return j_.contains(k);
  }
  void require(const std::string& k) {
    if (!take(k)) throw SchemaError(path(k) + ": required key missing");
  }
  double num_at(const std::string& k) const {
    const json& v = j_.at(k);
    if (!v.is_number()) throw SchemaError(path(k) + ": expected a number");
    return v.get<double>();
  }

  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

std::optional<RadialElasticParams> parse_elasticity(const json& j) {
  Obj o(j, "elasticity");
  const bool enabled = o.flag("enabled", true);
  RadialElasticParams p;
  p.lambda = o.num("lambda", p.lambda);
  p.mu = o.num("mu", p.mu);
  p.estar = o.num("estar", p.estar);
  o.done();
  if (!enabled) return std::nullopt;
  return p;
}

LaplacianKind parse_laplacian(const std::string& s) {
  if (s == "five_point") return LaplacianKind::five_point;
  if (s == "spectral") return LaplacianKind::spectral;
  throw SchemaError("laplacian: expected \"five_point\" or \"spectral\", got \"" + s + "\"");
}

// Reads the shared keys; the caller handles the rest of the object.
Common parse_common(Obj& o, const char* subcommand, LaplacianKind default_laplacian) {
  const std::string sc = o.str("subcommand", subcommand);
  if (sc != subcommand) throw SchemaError("subcommand: config is for \"" + sc + "\", not \"" + subcommand + "\"");
  Common c;
  c.output_dir = o.str("output_dir", c.output_dir.string());
  const int seed = o.integer("seed", 1);
  if (seed < 0) throw SchemaError("seed: must be >= 0");
  c.seed = static_cast<std::uint64_t>(seed);
  c.thread_count = o.integer("thread_count", 1);
  if (c.thread_count < 1) throw SchemaError("thread_count: must be >= 1");
  if (const json* p = o.sub("potential")) c.potential = parse_potential(*p);
  if (const json* e = o.sub("elasticity")) c.elasticity = parse_elasticity(*e);
  c.laplacian = o.has("laplacian") ? parse_laplacian(o.str("laplacian", "")) : default_laplacian;
  return c;
}

Shape parse_shape(const json& j, Vec2 default_center) {
  Obj o(j, "shape");
  const std::string kind = o.str("kind", "circle");
  Shape s;
  if (kind == "circle") {
    s = Shape::circle(o.point("center", default_center), o.num("R"));
  } else if (kind == "ellipse") {
    const Vec2 c = o.point("center", default_center);
    const double a = o.num("a");
    s = Shape::ellipse(c, a, o.num("b"));
  } else if (kind == "polyline") {
    const json& pts = o.sub_required("points");
    if (!pts.is_array()) throw SchemaError("shape.points: expected an array of [x, y]");
    std::vector<Vec2> v;
    for (const auto& p : pts) v.push_back(Obj::as_point(p, "shape.points"));
    s = Shape::from_polyline(std::move(v));
  } else {
    throw SchemaError("shape.kind: expected circle, ellipse or polyline");
  }
  o.done();
  return s;
}

std::vector<double> parse_epsilons(Obj& o) {
  auto e = o.numbers("epsilons");
  if (e.empty()) throw SchemaError("epsilons: must not be empty");
  for (double x : e)
    if (!(x > 0.0)) throw SchemaError("epsilons: entries must be positive");
  std::sort(e.begin(), e.end(), std::greater<>());
  if (std::adjacent_find(e.begin(), e.end()) != e.end()) throw SchemaError("epsilons: duplicate entry");
  return e;
}

}  // namespace

json load_json(const std::filesystem::path& p) {
  std::ifstream f(p);
  if (!f) throw SchemaError("cannot open config " + p.string());
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw SchemaError("config " + p.string() + " is not valid JSON: " + e.what());
  }
}

DoubleWell parse_potential(const json& j) {
  Obj o(j, "potential");
  const std::string kind = o.str("kind", "quartic");
  const double C0 = o.num("C0", 0.0);
  if (kind == "quartic") {
    o.done();
    return DoubleWell::quartic(C0);
  }
  if (kind != "polynomial") throw SchemaError("potential.kind: expected quartic or polynomial");
  auto coeffs = o.numbers("coefficients");
  Interval range;
  if (const json* r = o.sub("range")) {
    const Vec2 v = Obj::as_point(*r, "potential.range");
    range = {v.x, v.y};
  }
  o.done();
  return DoubleWell::polynomial(std::move(coeffs), C0, range);
}

SimulateConfig parse_simulate(const json& j) {
  Obj o(j, "config");
  SimulateConfig c;
  c.common = parse_common(o, "simulate", LaplacianKind::five_point);
  {
    Obj g(o.sub_required("grid"), "grid");
    const int n = g.integer("n", 0);
    const double L = g.num("L", 0.0);
    const int nx = g.integer("nx", n), ny = g.integer("ny", n);
    const double Lx = g.num("Lx", L), Ly = g.num("Ly", L);
    g.done();
    if (nx <= 0 || ny <= 0 || !(Lx > 0.0) || !(Ly > 0.0))
      throw SchemaError("grid: give n and L, or nx, ny, Lx and Ly, all positive");
    c.grid = Grid2D(nx, ny, Lx, Ly);
  }
  c.pf.epsilon = o.num("epsilon");
  c.pf.tau = o.num("tau", 0.0);
  c.pf.tau_factor = o.num("tau_factor", 1.0);
  c.pf.stabilization = o.num("stabilization", c.pf.stabilization);
  c.pf.cg_tol = o.num("cg_tol", c.pf.cg_tol);
  c.pf.end_time = o.num("end_time");
  c.pf.laplacian = c.common.laplacian;
  if (c.common.elasticity) {
    const auto& e = *c.common.elasticity;
    c.pf.elasticity = ElasticSetup{ElasticityTensor::isotropic(e.lambda, e.mu), Eigenstrain::dilatational(e.estar)};
  }
  c.samples = o.integer("samples", c.samples);
  if (c.samples < 1) throw SchemaError("samples: must be >= 1");
  c.contours = o.flag("contours", c.contours);
  {
    Obj init(o.sub_required("init"), "init");
    c.order = init.integer("order", 1);
    if (c.order != 0 && c.order != 1) throw SchemaError("init.order: expected 0 or 1");
    c.delta = init.num("delta", 0.0);
    c.shape = parse_shape(init.sub_required("shape"), {0.5 * c.grid.Lx(), 0.5 * c.grid.Ly()});
    init.done();
  }
  o.done();
  return c;
}

ResidualConfig parse_residual(const json& j) {
  Obj o(j, "config");
  ResidualConfig c;
  c.common = parse_common(o, "residual", LaplacianKind::spectral);
  c.epsilons = parse_epsilons(o);
  c.L = o.num("L", c.L);
  c.R = o.num("R", c.R);
  c.nodes_per_eps = o.num("nodes_per_eps", c.nodes_per_eps);
  c.C_star = o.num("C_star", c.C_star);
  o.done();
  return c;
}

RatesConfig parse_rates(const json& j) {
  Obj o(j, "config");
  RatesConfig c;
  c.common = parse_common(o, "rates", LaplacianKind::spectral);
  c.epsilons = parse_epsilons(o);
  CircleSetup& s = c.circle;
  s.L = o.num("L", s.L);
  s.R = o.num("R", s.R);
  s.nodes_per_eps = o.num("nodes_per_eps", s.nodes_per_eps);
  s.tau_factor = o.num("tau_factor", s.tau_factor);
  s.end_time = o.num("end_time", s.end_time);
  s.order = o.integer("order", s.order);
  if (s.order != 0 && s.order != 1) throw SchemaError("order: expected 0 or 1");
  s.samples = o.integer("samples", s.samples);
  if (s.samples < 2) throw SchemaError("samples: must be >= 2");
  s.laplacian = c.common.laplacian;
  s.elasticity = c.common.elasticity;
  o.done();
  return c;
}

SpectralConfig parse_spectral(const json& j) {
  Obj o(j, "config");
  SpectralConfig c;
  c.common = parse_common(o, "spectral", LaplacianKind::spectral);
  c.epsilons = parse_epsilons(o);
  c.n = o.integer("n", c.n);
  c.L = o.num("L", c.L);
  c.gamma1 = o.num("gamma1", c.gamma1);
  c.max_ratio = o.num("max_ratio", c.max_ratio);
  c.cross_check_starts = o.integer("cross_check_starts", 0);
  if (c.cross_check_starts < 0) throw SchemaError("cross_check_starts: must be >= 0");
  if (const json* p = o.sub("profile")) {
    Obj po(*p, "profile");
    c.profile = po.str("kind", c.profile);
    if (c.profile != "planar" && c.profile != "circle") throw SchemaError("profile.kind: expected planar or circle");
    c.radius = po.num("R", c.radius);
    c.amplitude = po.num("amplitude", c.amplitude);
    po.done();
  }
  o.done();
  return c;
}

int resolve_threads(int configured) {
  const char* env = std::getenv("LARCHE_THREADS");
  if (!env || !*env) return configured;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1 || v > 1024) throw SchemaError("LARCHE_THREADS: expected a positive integer");
  return static_cast<int>(v);
}

}  // namespace larche::cli
