#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "incl/cli.hpp"

namespace incl::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorKind::config, msg); }

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(where + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) fail(where + ": unknown key '" + key + "'");
  }
}

double number(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) fail(where + "." + key + ": missing");
  const json& v = obj.at(key);
  if (!v.is_number()) fail(where + "." + key + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(where + "." + key + ": not finite");
  return x;
}

double number_or(const json& obj, const std::string& where, const char* key, double dflt) {
  return obj.contains(key) ? number(obj, where, key) : dflt;
}

int integer(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) fail(where + "." + key + ": missing");
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail(where + "." + key + ": expected an integer");
  return v.get<int>();
}

int integer_or(const json& obj, const std::string& where, const char* key, int dflt) {
  return obj.contains(key) ? integer(obj, where, key) : dflt;
}

bool boolean_or(const json& obj, const std::string& where, const char* key, bool dflt) {
  if (!obj.contains(key)) return dflt;
  if (!obj.at(key).is_boolean()) fail(where + "." + key + ": expected true or false");
  return obj.at(key).get<bool>();
}

std::string string_or(const json& obj, const std::string& where, const char* key,
                      const std::string& dflt) {
  if (!obj.contains(key)) return dflt;
  if (!obj.at(key).is_string()) fail(where + "." + key + ": expected a string");
  const std::string s = obj.at(key).get<std::string>();
  if (s.empty()) fail(where + "." + key + ": empty");
  return s;
}

// Complex values are {"re": x, "im": y}; both parts are required.
std::vector<cplx> complex_list(const json& obj, const std::string& where, const char* key) {
  std::vector<cplx> out;
  if (!obj.contains(key)) return out;
  const json& arr = obj.at(key);
  const std::string path = where + "." + key;
  if (!arr.is_array()) fail(path + ": expected a list of {re, im} pairs");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string item = path + "[" + std::to_string(i) + "]";
    check_keys(arr[i], item, {"re", "im"});
    out.emplace_back(number(arr[i], item, "re"), number(arr[i], item, "im"));
  }
  return out;
}

json complex_json(const std::vector<cplx>& v) {
  json arr = json::array();
  for (const cplx& c : v) arr.push_back({{"re", c.real()}, {"im", c.imag()}});
  return arr;
}

void validate(RunConfig& cfg) {
  if (cfg.truncation < 1 || cfg.truncation > 400)
    fail("truncation: must lie in [1, 400], got " + std::to_string(cfg.truncation));
  if (cfg.grid) {
    const GridSpec& g = *cfg.grid;
    for (double x : {g.x0, g.x1, g.y0, g.y1})
      if (!std::isfinite(x)) fail("grid: non-finite bound");
    if (g.nx < 0 || g.ny < 0) fail("grid: negative point count");
    if (g.x1 < g.x0 || g.y1 < g.y0) fail("grid: reversed bounds");
    if (double(g.nx) * double(g.ny) > 4e6) fail("grid: more than 4e6 points");
  }
  if (cfg.oracle.q < 8 || cfg.oracle.q % 2 != 0 || cfg.oracle.q > 2048)
    fail("oracle.q: must be even and in [8, 2048]");
  if (cfg.oracle.offset_points < 1) fail("oracle.offset_points: must be positive");
  if (!(cfg.oracle.offset_radius > 1.0)) fail("oracle.offset_radius: must exceed 1");
  if (!(cfg.tolerances.residual > 0.0)) fail("tolerances.residual: must be positive");
  if (!(cfg.tolerances.oracle > 0.0)) fail("tolerances.oracle: must be positive");
  if (!(cfg.field.far_radius > 1.0)) fail("field.far_radius: must exceed 1");
  if (!(cfg.field.band > 0.0) || !(cfg.field.epsilon > 0.0) || cfg.field.epsilon >= 0.5)
    fail("field: band and epsilon must be positive, epsilon below 0.5");
  if (cfg.field.boundary_samples < 16) fail("field.boundary_samples: at least 16");

  // Cross-module checks: every constructor that assembly would call.
  try {
    const ConformalMap m = cfg.map();
    (void)cfg.material();
    cfg.loading.validate(cfg.truncation);
    if (cfg.delta && *cfg.delta < cfg.field.epsilon * m.gamma())
      fail("map.delta: smaller than the boundary approach offset");
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::config) throw;
    fail(std::string(to_string(e.kind())) + ": " + e.what());
  }
}

}  // namespace

ConformalMap RunConfig::map() const { return ConformalMap(gamma, a, delta); }

MaterialPair RunConfig::material() const {
  return cavity ? MaterialPair::cavity(lambda, mu)
                : MaterialPair::transmission(lambda, mu, lambda_t, mu_t);
}

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("not valid JSON: ") + e.what());
  }
  check_keys(root, "config", {"schema_version", "map", "material", "loading", "truncation",
                              "grid", "oracle", "tolerances", "field", "output"});
  RunConfig cfg;
  cfg.schema = integer(root, "config", "schema_version");
  if (cfg.schema != schema_version)
    fail("schema_version: expected " + std::to_string(schema_version) + ", got " +
         std::to_string(cfg.schema));

  if (!root.contains("map")) fail("map: missing");
  const json& m = root.at("map");
  check_keys(m, "map", {"gamma", "a", "delta"});
  cfg.gamma = number(m, "map", "gamma");
  cfg.a = complex_list(m, "map", "a");
  if (m.contains("delta")) cfg.delta = number(m, "map", "delta");

  if (!root.contains("material")) fail("material: missing");
  const json& mat = root.at("material");
  check_keys(mat, "material", {"lambda", "mu", "lambda_t", "mu_t", "cavity"});
  cfg.lambda = number(mat, "material", "lambda");
  cfg.mu = number(mat, "material", "mu");
  cfg.cavity = boolean_or(mat, "material", "cavity", false);
  if (cfg.cavity) {
    if (mat.contains("lambda_t") || mat.contains("mu_t"))
      fail("material: lambda_t/mu_t given together with cavity = true");
  } else {
    cfg.lambda_t = number(mat, "material", "lambda_t");
    cfg.mu_t = number(mat, "material", "mu_t");
  }

  if (!root.contains("loading")) fail("loading: missing");
  const json& ld = root.at("loading");
  check_keys(ld, "loading", {"A", "B"});
  cfg.loading.A = complex_list(ld, "loading", "A");
  cfg.loading.B = complex_list(ld, "loading", "B");

  cfg.truncation = integer_or(root, "config", "truncation", cfg.truncation);

  if (root.contains("grid")) {
    const json& g = root.at("grid");
    check_keys(g, "grid", {"x0", "x1", "y0", "y1", "nx", "ny"});
    GridSpec spec;
    spec.x0 = number(g, "grid", "x0");
    spec.x1 = number(g, "grid", "x1");
    spec.y0 = number(g, "grid", "y0");
    spec.y1 = number(g, "grid", "y1");
    spec.nx = integer(g, "grid", "nx");
    spec.ny = integer(g, "grid", "ny");
    cfg.grid = spec;
  }
  if (root.contains("oracle")) {
    const json& o = root.at("oracle");
    check_keys(o, "oracle", {"enabled", "q", "offset_points", "offset_radius"});
    cfg.oracle.enabled = boolean_or(o, "oracle", "enabled", false);
    cfg.oracle.q = integer_or(o, "oracle", "q", cfg.oracle.q);
    cfg.oracle.offset_points = integer_or(o, "oracle", "offset_points", cfg.oracle.offset_points);
    cfg.oracle.offset_radius = number_or(o, "oracle", "offset_radius", cfg.oracle.offset_radius);
  }
  if (root.contains("tolerances")) {
    const json& t = root.at("tolerances");
    check_keys(t, "tolerances", {"residual", "oracle"});
    cfg.tolerances.residual = number_or(t, "tolerances", "residual", cfg.tolerances.residual);
    cfg.tolerances.oracle = number_or(t, "tolerances", "oracle", cfg.tolerances.oracle);
  }
  if (root.contains("field")) {
    const json& f = root.at("field");
    check_keys(f, "field", {"far_radius", "band", "epsilon", "boundary_samples"});
    cfg.field.far_radius = number_or(f, "field", "far_radius", cfg.field.far_radius);
    cfg.field.band = number_or(f, "field", "band", cfg.field.band);
    cfg.field.epsilon = number_or(f, "field", "epsilon", cfg.field.epsilon);
    cfg.field.boundary_samples =
        integer_or(f, "field", "boundary_samples", cfg.field.boundary_samples);
  }
  if (root.contains("output")) {
    const json& o = root.at("output");
    check_keys(o, "output", {"dir", "solution", "field", "summary", "manifest", "oracle"});
    cfg.out.dir = string_or(o, "output", "dir", cfg.out.dir);
    cfg.out.solution = string_or(o, "output", "solution", cfg.out.solution);
    cfg.out.field = string_or(o, "output", "field", cfg.out.field);
    cfg.out.summary = string_or(o, "output", "summary", cfg.out.summary);
    cfg.out.manifest = string_or(o, "output", "manifest", cfg.out.manifest);
    cfg.out.oracle = string_or(o, "output", "oracle", cfg.out.oracle);
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const Error& e) {
    fail(path + ": " + e.what());
  }
}

GridSpec parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(item);
  if (parts.size() != 6) fail("--grid: expected x0,x1,y0,y1,nx,ny");
  auto real = [&](const std::string& s) {
    std::istringstream is(s);
    is.imbue(std::locale::classic());
    double x;
    if (!(is >> x) || !(is >> std::ws).eof()) fail("--grid: bad number '" + s + "'");
    return x;
  };
  auto count = [&](const std::string& s) {
    std::istringstream is(s);
    long n;
    if (!(is >> n) || !(is >> std::ws).eof() || n < 0 || n > 100000)
      fail("--grid: bad point count '" + s + "'");
    return int(n);
  };
  GridSpec g;
  g.x0 = real(parts[0]);
  g.x1 = real(parts[1]);
  g.y0 = real(parts[2]);
  g.y1 = real(parts[3]);
  g.nx = count(parts[4]);
  g.ny = count(parts[5]);
  return g;
}

const char* to_string(Command c) {
  switch (c) {
    case Command::solve: return "solve";
    case Command::field: return "field";
    case Command::oracle_check: return "oracle-check";
  }
  return "?";
}

void apply_overrides(RunConfig& cfg, const Overrides& o, Command cmd) {
  if (o.truncation) cfg.truncation = *o.truncation;
  if (o.grid) cfg.grid = *o.grid;
  if (o.oracle) cfg.oracle.enabled = true;
  if (o.out_dir) {
    if (o.out_dir->empty()) fail("--out-dir: empty");
    cfg.out.dir = *o.out_dir;
  }
  if (o.tolerance) {
    if (cmd == Command::oracle_check)
      cfg.tolerances.oracle = *o.tolerance;
    else
      cfg.tolerances.residual = *o.tolerance;
  }
  validate(cfg);
}

std::string config_to_json(const RunConfig& cfg) {
  json j;
  j["schema_version"] = cfg.schema;
  j["map"] = {{"gamma", cfg.gamma}, {"a", complex_json(cfg.a)}};
  if (cfg.delta) j["map"]["delta"] = *cfg.delta;
  if (cfg.cavity)
    j["material"] = {{"lambda", cfg.lambda}, {"mu", cfg.mu}, {"cavity", true}};
  else
    j["material"] = {{"lambda", cfg.lambda}, {"mu", cfg.mu},
                     {"lambda_t", cfg.lambda_t}, {"mu_t", cfg.mu_t}};
  j["loading"] = {{"A", complex_json(cfg.loading.A)}, {"B", complex_json(cfg.loading.B)}};
  j["truncation"] = cfg.truncation;
  if (cfg.grid) {
    const GridSpec& g = *cfg.grid;
    j["grid"] = {{"x0", g.x0}, {"x1", g.x1}, {"y0", g.y0}, {"y1", g.y1},
                 {"nx", g.nx}, {"ny", g.ny}};
  }
  j["oracle"] = {{"enabled", cfg.oracle.enabled}, {"q", cfg.oracle.q},
                 {"offset_points", cfg.oracle.offset_points},
                 {"offset_radius", cfg.oracle.offset_radius}};
  j["tolerances"] = {{"residual", cfg.tolerances.residual}, {"oracle", cfg.tolerances.oracle}};
  j["field"] = {{"far_radius", cfg.field.far_radius}, {"band", cfg.field.band},
                {"epsilon", cfg.field.epsilon},
                {"boundary_samples", cfg.field.boundary_samples}};
  j["output"] = {{"dir", cfg.out.dir}, {"solution", cfg.out.solution},
                 {"field", cfg.out.field}, {"summary", cfg.out.summary},
                 {"manifest", cfg.out.manifest}, {"oracle", cfg.out.oracle}};
  return j.dump(2);
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config:
    case ErrorKind::validation:
      return exit_config;
    case ErrorKind::assembly:
    case ErrorKind::order_mismatch:
    case ErrorKind::window:
    case ErrorKind::mode:
      return exit_assembly;
    case ErrorKind::solve:
    case ErrorKind::singular:
    case ErrorKind::domain:
      return exit_solve;
    case ErrorKind::oracle:
      return exit_oracle;
    case ErrorKind::io:
      return exit_other;
  }
  return exit_other;
}

}  // namespace incl::cli
