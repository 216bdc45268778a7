#include "ctcert/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace ctcert {

namespace {

using nlohmann::json;

struct Locator {
  const std::string& text;

  std::string at_offset(std::size_t offset) const {
    offset = std::min(offset, text.size());
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < offset; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    return "line " + std::to_string(line) + ":" + std::to_string(col);
  }

  // Position of "key" after the position of "section", best effort.
  std::string of_key(const std::string& section, const std::string& key) const {
    std::size_t from = 0;
    if (!section.empty()) {
      std::size_t s = text.find("\"" + section + "\"");
      if (s != std::string::npos) from = s;
    }
    std::size_t k = text.find("\"" + key + "\"", from);
    if (k == std::string::npos) return "config";
    return at_offset(k);
  }
};

[[noreturn]] void fail(const std::string& where, const std::string& message) {
  throw Error(ErrorKind::kConfig, where + ": " + message);
}

class Reader {
 public:
  Reader(const json& node, std::string section, const Locator& loc, std::set<std::string> allowed)
      : node_(node), section_(std::move(section)), loc_(loc) {
    if (!node_.is_object()) fail(loc_.of_key("", section_), "'" + section_ + "' must be an object");
    for (const auto& item : node_.items())
      if (!allowed.count(item.key()))
        fail(loc_.of_key(section_, item.key()), "unknown key '" + item.key() + "' in '" + section_ + "'");
  }

  bool has(const std::string& key) const { return node_.contains(key); }
  const json& raw(const std::string& key) const { return node_.at(key); }

  std::string where(const std::string& key) const { return loc_.of_key(section_, key); }
  std::string name(const std::string& key) const { return section_ + "." + key; }

  void number(const std::string& key, double& out) const {
    if (!has(key)) return;
    const json& v = node_.at(key);
    if (!v.is_number()) fail(where(key), name(key) + " must be a number");
    out = v.get<double>();
  }
  void number(const std::string& key, std::optional<double>& out) const {
    if (!has(key)) return;
    double v = 0.0;
    number(key, v);
    out = v;
  }
  void integer(const std::string& key, int& out) const {
    if (!has(key)) return;
    const json& v = node_.at(key);
    if (!v.is_number_integer()) fail(where(key), name(key) + " must be an integer");
    out = v.get<int>();
  }
  void unsigned_integer(const std::string& key, std::uint64_t& out) const {
    if (!has(key)) return;
    const json& v = node_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      fail(where(key), name(key) + " must be a non-negative integer");
    out = v.get<std::uint64_t>();
  }
  void string(const std::string& key, std::string& out) const {
    if (!has(key)) return;
    const json& v = node_.at(key);
    if (!v.is_string()) fail(where(key), name(key) + " must be a string");
    out = v.get<std::string>();
  }
  void numbers(const std::string& key, std::vector<double>& out) const {
    if (!has(key)) return;
    const json& v = node_.at(key);
    if (!v.is_array()) fail(where(key), name(key) + " must be an array of numbers");
    out.clear();
    for (const json& e : v) {
      if (!e.is_number()) fail(where(key), name(key) + " must be an array of numbers");
      out.push_back(e.get<double>());
    }
  }

 private:
  const json& node_;
  std::string section_;
  const Locator& loc_;
};

void read_field(const Reader& parent, const std::string& key, const Locator& loc, FieldSpec& out) {
  if (!parent.has(key)) return;
  Reader r(parent.raw(key), key, loc, {"expr", "amplitude"});
  r.string("expr", out.expr);
  r.number("amplitude", out.amplitude);
}

void require(bool ok, const std::string& where, const std::string& message) {
  if (!ok) fail(where, message);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  Locator loc{text};
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::string msg = e.what();
    std::size_t colon = msg.rfind(": ");
    throw Error(ErrorKind::kConfig, loc.at_offset(e.byte > 0 ? e.byte - 1 : 0) + ": malformed JSON (" +
                                        (colon == std::string::npos ? msg : msg.substr(colon + 2)) + ")");
  }
  Reader root(doc, "config", loc,
              {"manifold", "system", "field", "grid", "flow", "certify", "verification", "output"});
  RunConfig cfg;

  if (!root.has("manifold")) fail("config", "missing required key 'manifold'");
  {
    Reader m(root.raw("manifold"), "manifold", loc, {"kind", "periods", "radius", "scale"});
    if (!m.has("kind")) fail(loc.of_key("", "manifold"), "missing required key 'manifold.kind'");
    m.string("kind", cfg.manifold);
    require(cfg.manifold == "flat_torus" || cfg.manifold == "sphere" || cfg.manifold == "hyperbolic",
            m.where("kind"), "manifold.kind must be flat_torus, sphere or hyperbolic");
    m.numbers("periods", cfg.periods);
    m.number("radius", cfg.radius);
    m.number("scale", cfg.scale);
    require(!cfg.periods.empty() && cfg.periods.size() <= 3, m.where("periods"),
            "manifold.periods needs 1 to 3 entries");
    for (double p : cfg.periods) require(p > 0.0, m.where("periods"), "periods must be positive");
    require(cfg.radius > 0.0, m.where("radius"), "manifold.radius must be positive");
    require(cfg.scale > 0.0, m.where("scale"), "manifold.scale must be positive");
  }
  if (root.has("system")) {
    Reader s(root.raw("system"), "system", loc, {"potential", "hess_bound"});
    read_field(s, "potential", loc, cfg.potential);
    s.number("hess_bound", cfg.hess_bound);
  }
  if (root.has("field")) {
    Reader f(root.raw("field"), "field", loc, {"expr", "amplitude"});
    f.string("expr", cfg.field.expr);
    f.number("amplitude", cfg.field.amplitude);
  }
  if (root.has("grid")) {
    Reader g(root.raw("grid"), "grid", loc, {"resolution"});
    g.integer("resolution", cfg.grid_resolution);
    require(cfg.grid_resolution >= 2 && cfg.grid_resolution <= 4096, g.where("resolution"),
            "grid.resolution must lie in [2, 4096]");
  }
  if (root.has("flow")) {
    Reader f(root.raw("flow"), "flow", loc, {"step", "t_end", "x0", "p0", "chart"});
    f.number("step", cfg.flow_step);
    f.number("t_end", cfg.flow_t_end);
    f.numbers("x0", cfg.flow_x0);
    f.numbers("p0", cfg.flow_p0);
    f.integer("chart", cfg.flow_chart);
    require(cfg.flow_step > 0.0, f.where("step"), "flow.step must be positive");
    require(cfg.flow_t_end > 0.0 && cfg.flow_t_end <= 10.0, f.where("t_end"), "flow.t_end must lie in (0, 10]");
  }
  if (root.has("certify")) {
    Reader c(root.raw("certify"), "certify", loc, {"theorem", "k", "delta"});
    c.string("theorem", cfg.theorem);
    c.number("k", cfg.k);
    c.number("delta", cfg.delta);
    static const std::set<std::string> theorems{"auto", "natural", "riemannian", "2d", "general"};
    require(theorems.count(cfg.theorem) > 0, c.where("theorem"),
            "certify.theorem must be auto, natural, riemannian, 2d or general");
    require(cfg.delta > 0.0, c.where("delta"), "certify.delta must be positive");
  }
  if (root.has("verification")) {
    Reader v(root.raw("verification"), "verification", loc, {"samples", "seed", "duality_tol", "ctransform_grid"});
    v.integer("samples", cfg.samples);
    v.unsigned_integer("seed", cfg.seed);
    v.number("duality_tol", cfg.duality_tol);
    v.integer("ctransform_grid", cfg.ctransform_grid);
    require(cfg.samples >= 1, v.where("samples"), "verification.samples must be positive");
    require(cfg.duality_tol > 0.0, v.where("duality_tol"), "verification.duality_tol must be positive");
    require(cfg.ctransform_grid >= 16, v.where("ctransform_grid"), "verification.ctransform_grid must be >= 16");
  }
  if (root.has("output")) {
    Reader o(root.raw("output"), "output", loc, {"dir"});
    o.string("dir", cfg.output_dir);
  }

  Manifold model = build_manifold(cfg);
  std::vector<std::string> ids = ScalarField::expressions_for(model);
  auto known = [&](const std::string& id) { return std::find(ids.begin(), ids.end(), id) != ids.end(); };
  if (!known(cfg.field.expr))
    fail(loc.of_key("field", "expr"), "unknown field expression '" + cfg.field.expr + "' for " + cfg.manifold);
  if (!known(cfg.potential.expr))
    fail(loc.of_key("potential", "expr"),
         "unknown potential expression '" + cfg.potential.expr + "' for " + cfg.manifold);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kConfig, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

Manifold build_manifold(const RunConfig& cfg) {
  if (cfg.manifold == "flat_torus") return Manifold::flat_torus(cfg.periods);
  if (cfg.manifold == "sphere") return Manifold::sphere(cfg.radius);
  if (cfg.manifold == "hyperbolic") return Manifold::hyperbolic(cfg.scale);
  throw Error(ErrorKind::kConfig, "unknown manifold kind '" + cfg.manifold + "'");
}

MechanicalSystem build_system(const RunConfig& cfg) {
  Manifold model = build_manifold(cfg);
  ScalarField u = ScalarField::from_expression(model, cfg.potential.expr, cfg.potential.amplitude);
  return make_system(model, u, cfg.hess_bound);
}

ScalarField build_field(const RunConfig& cfg, const Manifold& model) {
  return ScalarField::from_expression(model, cfg.field.expr, cfg.field.amplitude);
}

}  // namespace ctcert
