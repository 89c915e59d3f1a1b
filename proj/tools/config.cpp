#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace gspt::cli {

using nlohmann::json;

namespace {

// Object view that remembers which keys were read, so leftovers can be rejected.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where(), "expected an object");
  }

  std::string where() const { return path_.empty() ? "/" : path_; }
  std::string child(const std::string& key) const { return path_ + "/" + key; }
  bool has(const std::string& key) const { return j_.contains(key); }

  const json* get(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::optional<double> number(const std::string& key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_number()) throw ConfigError(child(key), "expected a number");
    const double d = v->get<double>();
    if (!std::isfinite(d)) throw ConfigError(child(key), "expected a finite number");
    return d;
  }
  std::optional<bool> boolean(const std::string& key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_boolean()) throw ConfigError(child(key), "expected true or false");
    return v->get<bool>();
  }
  std::optional<std::string> string(const std::string& key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) throw ConfigError(child(key), "expected a string");
    return v->get<std::string>();
  }
  std::optional<int> integer(const std::string& key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_number_integer()) throw ConfigError(child(key), "expected an integer");
    return v->get<int>();
  }
  std::optional<Vec2> point(const std::string& key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number())
      throw ConfigError(child(key), "expected [x, y]");
    return Vec2{(*v)[0].get<double>(), (*v)[1].get<double>()};
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(child(it.key()), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Params parse_params(const json& j, const std::string& path) {
  Node n(j, path);
  Params p;
  for (auto it = j.begin(); it != j.end(); ++it) p[it.key()] = *n.number(it.key());
  return p;
}

// number | [numbers] | {min, max, count, log}
std::vector<double> parse_values(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>()};
  if (j.is_array()) {
    std::vector<double> v;
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (!j[i].is_number()) throw ConfigError(path + "/" + std::to_string(i), "expected a number");
      v.push_back(j[i].get<double>());
    }
    if (v.empty()) throw ConfigError(path, "empty list");
    return v;
  }
  if (j.is_object()) {
    Node n(j, path);
    const auto lo = n.number("min"), hi = n.number("max");
    const auto count = n.integer("count");
    const bool log = n.boolean("log").value_or(true);
    n.finish();
    if (!lo || !hi || !count) throw ConfigError(path, "ladder needs min, max and count");
    if (*count < 1) throw ConfigError(path + "/count", "must be at least 1");
    if (!(*hi >= *lo)) throw ConfigError(path, "max must be >= min");
    if (log && !(*lo > 0.0)) throw ConfigError(path + "/min", "log ladder needs min > 0");
    std::vector<double> v;
    for (int i = 0; i < *count; ++i) {
      const double s = *count == 1 ? 0.0 : static_cast<double>(i) / (*count - 1);
      double x = log ? *lo * std::pow(*hi / *lo, s) : *lo + s * (*hi - *lo);
      if (i == 0) x = *lo;
      if (i == *count - 1) x = *hi;
      v.push_back(x);
    }
    return v;
  }
  throw ConfigError(path, "expected a number, a list, or {min, max, count, log}");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // nlohmann reports "... at line L, column C: ..."
    std::string msg = e.what();
    const auto at = msg.find("at line");
    std::string where = "byte " + std::to_string(e.byte);
    if (at != std::string::npos) {
      const auto colon = msg.find(':', at);
      where = msg.substr(at + 3, colon == std::string::npos ? std::string::npos : colon - at - 3);
    }
    throw ConfigError(where, "invalid JSON");
  }
  RunConfig c;
  Node root(j, "");

  if (const json* m = root.get("model")) {
    Node n(*m, "/model");
    ModelConfig mc;
    const auto name = n.string("name");
    if (!name) throw ConfigError("/model/name", "missing");
    mc.name = *name;
    if (const json* p = n.get("params")) mc.params = parse_params(*p, "/model/params");
    n.finish();
    bool known = false;
    for (const auto& info : model_catalog()) known = known || info.name == mc.name;
    if (!known) throw ConfigError("/model/name", "unknown model '" + mc.name + "'");
    c.model = mc;
  }
  if (const json* e = root.get("eps")) {
    c.eps = parse_values(*e, "/eps");
    for (double v : c.eps)
      if (!(v > 0.0)) throw ConfigError("/eps", "eps values must be positive");
  }
  if (const json* w = root.get("window")) {
    Node n(*w, "/window");
    Window win;
    const auto a = n.number("x_min"), b = n.number("x_max"), cc = n.number("y_min"), d = n.number("y_max");
    n.finish();
    if (!a || !b || !cc || !d) throw ConfigError("/window", "needs x_min, x_max, y_min, y_max");
    win = {*a, *b, *cc, *d};
    if (!win.valid()) throw ConfigError("/window", "empty window");
    c.window = win;
  }
  if (auto t = root.number("tolerance")) {
    if (!(*t >= 1e-13 && *t <= 1e-5)) throw ConfigError("/tolerance", "must lie in [1e-13, 1e-5]");
    c.tolerance = *t;
  }
  if (auto r = root.integer("resolution")) {
    if (*r < 16) throw ConfigError("/resolution", "must be at least 16");
    c.resolution = *r;
  }
  if (auto o = root.string("output")) c.output = *o;
  if (const json* s = root.get("section")) {
    Node n(*s, "/section");
    SectionConfig sc;
    const auto base = n.point("base");
    if (!base) throw ConfigError("/section/base", "missing");
    sc.base = *base;
    if (auto d = n.point("direction")) sc.direction = *d;
    if (auto h = n.number("half_width")) sc.half_width = *h;
    if (auto o = n.integer("orientation")) sc.orientation = *o;
    n.finish();
    const double len = norm(sc.direction);
    if (!(len > 0.0)) throw ConfigError("/section/direction", "must be nonzero");
    sc.direction = sc.direction / len;
    if (!(sc.half_width > 0.0)) throw ConfigError("/section/half_width", "must be positive");
    if (sc.orientation != 1 && sc.orientation != -1) throw ConfigError("/section/orientation", "must be 1 or -1");
    c.section = sc;
  }
  if (const json* s = root.get("simulate")) {
    Node n(*s, "/simulate");
    c.z0 = n.point("z0");
    if (auto t = n.number("t_end")) {
      if (!(*t > 0.0)) throw ConfigError("/simulate/t_end", "must be positive");
      c.t_end = *t;
    }
    if (auto sd = n.string("seed")) {
      if (*sd != "automatic" && *sd != "singular_cycle" && *sd != "equilibrium")
        throw ConfigError("/simulate/seed", "expected automatic, singular_cycle or equilibrium");
      c.seed = *sd;
    }
    n.finish();
  }
  if (const json* s = root.get("scale")) {
    Node n(*s, "/scale");
    c.rho = n.number("rho");
    if (c.rho && !(*c.rho > 0.0)) throw ConfigError("/scale/rho", "must be positive");
    c.cycles = n.boolean("cycles").value_or(true);
    n.finish();
  }
  if (const json* s = root.get("regimes")) {
    Node n(*s, "/regimes");
    if (const json* v = n.get("v0")) c.v0_values = parse_values(*v, "/regimes/v0");
    if (auto d = n.number("delta")) c.regime_delta = *d;
    if (const json* p = n.get("params")) c.regime_params = parse_params(*p, "/regimes/params");
    c.refine = n.boolean("refine").value_or(true);
    n.finish();
  }
  if (const json* s = root.get("strokes")) {
    Node n(*s, "/strokes");
    if (const json* v = n.get("eps")) c.stroke_eps = parse_values(*v, "/strokes/eps");
    if (const json* v = n.get("delta")) c.stroke_delta = parse_values(*v, "/strokes/delta");
    if (const json* p = n.get("params")) c.stroke_params = parse_params(*p, "/strokes/params");
    n.finish();
  }
  if (const json* s = root.get("riccati")) {
    Node n(*s, "/riccati");
    c.a0 = n.number("a0");
    c.b1 = n.number("b1");
    c.d0 = n.number("d0");
    c.riccati_from_model = n.boolean("from_model").value_or(false);
    c.x_min = n.number("x_min");
    c.x_max = n.number("x_max");
    if (auto k = n.integer("count")) {
      if (*k < 2) throw ConfigError("/riccati/count", "must be at least 2");
      c.riccati_count = *k;
    }
    n.finish();
  }
  root.finish();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError(path, "cannot open config file");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

}  // namespace gspt::cli
