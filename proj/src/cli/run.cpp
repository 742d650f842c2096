#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "incl/cli.hpp"
#include "incl/oracle.hpp"
#include "incl/system.hpp"

namespace incl::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string sci(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

json coeffs(const CVector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    arr.push_back({{"re", v(i).real()}, {"im", v(i).imag()}});
  return arr;
}

std::vector<double> residual_angles(int count) {
  std::vector<double> a(count);
  for (int j = 0; j < count; ++j) a[j] = 2.0 * pi * j / count;
  return a;
}

std::string utc_timestamp() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Results {
  DensitySolution sol;
  std::optional<ResidualReport> transmission;
  std::vector<FieldSample> samples;
  bool have_field = false;
  std::optional<oracle::ComparisonReport> comparison;
  std::vector<double> rigid;
  bool oracle_ok = true;
};

std::string solution_json(const RunConfig& cfg, const Results& r) {
  json j;
  j["schema_version"] = schema_version;
  j["mode"] = cfg.cavity ? "cavity" : "transmission";
  j["truncation"] = cfg.truncation;
  j["xe_plus"] = coeffs(r.sol.xe_plus);
  j["xe_minus"] = coeffs(r.sol.xe_minus);
  if (!cfg.cavity) {
    j["xi_plus"] = coeffs(r.sol.xi_plus);
    j["xi_minus"] = coeffs(r.sol.xi_minus);
  }
  json d;
  d["residual"] = r.sol.residual;
  d["relative_residual"] = r.sol.relative_residual;
  d["converged"] = r.sol.converged;
  d["unknowns"] = r.sol.unknowns;
  d["rank"] = r.sol.rank;
  d["sigma_max"] = r.sol.sigma_max;
  d["sigma_min"] = r.sol.sigma_min;
  d["rotation_projection"] = r.sol.rotation_projection;
  if (r.transmission) {
    d["transmission_displacement"] = r.transmission->displacement;
    d["transmission_traction"] = r.transmission->traction;
  }
  j["diagnostics"] = d;
  return j.dump(2) + "\n";
}

std::string field_csv(const Results& r) {
  std::string out = "re_w,im_w,re_z,im_z,region,re_u,im_u\n";
  for (const FieldSample& s : r.samples) {
    out += fmt(s.w.real()) + "," + fmt(s.w.imag()) + "," + fmt(s.z.real()) + "," +
           fmt(s.z.imag()) + "," + to_string(s.region) + "," + fmt(s.u.real()) + "," +
           fmt(s.u.imag()) + "\n";
  }
  return out;
}

std::string oracle_json(const RunConfig& cfg, const Results& r) {
  const auto& c = *r.comparison;
  json j;
  j["schema_version"] = schema_version;
  j["q"] = c.q;
  j["boundary_max"] = c.boundary_max;
  j["boundary_l2"] = c.boundary_l2;
  j["offset_radius"] = c.offset_radius;
  j["offset_points"] = c.offset_points;
  j["offset_max"] = c.offset_max;
  j["offset_l2"] = c.offset_l2;
  j["oracle_condition"] = c.oracle_condition;
  j["rigid_moments"] = r.rigid;
  j["tolerance"] = cfg.tolerances.oracle;
  j["within_tolerance"] = r.oracle_ok;
  return j.dump(2) + "\n";
}

std::string summary_text(const RunConfig& cfg, Command cmd, const Results& r, int code) {
  std::ostringstream s;
  s << "command            " << to_string(cmd) << "\n";
  s << "mode               " << (cfg.cavity ? "cavity" : "transmission") << "\n";
  s << "truncation         " << cfg.truncation << "\n";
  s << "unknowns / rank    " << r.sol.unknowns << " / " << r.sol.rank << "\n";
  s << "residual           " << sci(r.sol.residual) << " (relative " << sci(r.sol.relative_residual)
    << ", tolerance " << sci(cfg.tolerances.residual) << ") "
    << (r.sol.converged ? "ok" : "NOT CONVERGED") << "\n";
  s << "singular values    " << sci(r.sol.sigma_max) << " .. " << sci(r.sol.sigma_min) << "\n";
  s << "rotation moment    " << sci(r.sol.rotation_projection) << "\n";
  if (r.transmission) {
    s << "interface jump     displacement " << sci(r.transmission->displacement)
      << ", traction potential " << sci(r.transmission->traction) << "\n";
  }
  if (r.have_field) {
    std::size_t counts[4] = {0, 0, 0, 0};
    for (const auto& smp : r.samples) ++counts[int(smp.region)];
    s << "grid samples       " << r.samples.size() << " (exterior " << counts[0] << ", interior "
      << counts[1] << ", boundary " << counts[2] << ", cavity " << counts[3] << ")\n";
  }
  if (r.comparison) {
    const auto& c = *r.comparison;
    s << "oracle q           " << c.q << " (condition " << sci(c.oracle_condition) << ")\n";
    s << "oracle boundary    max " << sci(c.boundary_max) << ", l2 " << sci(c.boundary_l2) << "\n";
    s << "oracle offset      max " << sci(c.offset_max) << ", l2 " << sci(c.offset_l2)
      << " at |w| = " << c.offset_radius << " gamma, tolerance " << sci(cfg.tolerances.oracle)
      << (r.oracle_ok ? " ok" : " MISMATCH") << "\n";
  }
  s << "exit code          " << code << "\n";
  return s.str();
}

void write_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw Error(ErrorKind::io, "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::io, "cannot move output into '" + path.string() + "': " + ec.message());
}

}  // namespace

int run(const RunConfig& cfg, Command cmd, std::ostream& log) {
  if (cmd == Command::field && !cfg.grid)
    throw Error(ErrorKind::config, "field: no grid in the config and no --grid given");

  const ConformalMap map = cfg.map();
  const MaterialPair material = cfg.material();
  const GeometryBundle geo(map, cfg.truncation);

  Results r;
  BlockSystem sys;
  try {
    sys = assemble_E(material, geo, cfg.loading);
  } catch (const Error& e) {
    throw Error(ErrorKind::assembly, std::string("assembly failed: ") + e.what());
  }
  SolveOptions so;
  so.residual_tol = cfg.tolerances.residual;
  r.sol = solve(sys, so);
  log << "solved n=" << cfg.truncation << " relative residual " << sci(r.sol.relative_residual)
      << "\n";

  const FieldEvaluator fe(geo, material, cfg.loading, r.sol, cfg.field);
  if (!cfg.cavity) r.transmission = fe.transmission_residual(residual_angles(64));

  if (cmd == Command::field) {
    r.samples = fe.grid_field(*cfg.grid);
    r.have_field = true;
    log << "evaluated " << r.samples.size() << " grid points\n";
  }

  if (cmd == Command::oracle_check || cfg.oracle.enabled) {
    const BackgroundField bg(geo, material, cfg.loading);
    const oracle::OracleSolution os = oracle::solve_oracle(map, material, bg, cfg.oracle.q);
    r.comparison = oracle::compare(os, fe, bg, map, cfg.oracle.offset_points,
                                   cfg.oracle.offset_radius);
    r.rigid = {os.rigid_moments(0), os.rigid_moments(1), os.rigid_moments(2)};
    r.oracle_ok = r.comparison->offset_max <= cfg.tolerances.oracle &&
                  r.comparison->boundary_max <= cfg.tolerances.oracle;
    log << "oracle offset discrepancy " << sci(r.comparison->offset_max) << "\n";
  }

  int code = exit_ok;
  if (!r.sol.converged)
    code = exit_solve;
  else if (!r.oracle_ok)
    code = exit_oracle;

  // Everything is in memory; only now touch the output directory.
  const fs::path dir(cfg.out.dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create '" + dir.string() + "': " + ec.message());

  json outputs = json::array();
  auto emit = [&](const std::string& name, const std::string& content) {
    write_atomic(dir / name, content);
    outputs.push_back(name);
  };
  emit(cfg.out.solution, solution_json(cfg, r));
  if (r.have_field) emit(cfg.out.field, field_csv(r));
  if (r.comparison) emit(cfg.out.oracle, oracle_json(cfg, r));
  emit(cfg.out.summary, summary_text(cfg, cmd, r, code));

  json manifest;
  manifest["tool"] = "inclusion";
  manifest["version"] = tool_version;
  manifest["schema_version"] = schema_version;
  manifest["command"] = to_string(cmd);
  manifest["timestamp"] = utc_timestamp();
  manifest["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
                              std::to_string(EIGEN_MAJOR_VERSION) + "." +
                              std::to_string(EIGEN_MINOR_VERSION);
  manifest["config"] = json::parse(config_to_json(cfg));
  manifest["outputs"] = outputs;
  manifest["exit_code"] = code;
  write_atomic(dir / cfg.out.manifest, manifest.dump(2) + "\n");

  return code;
}

}  // namespace incl::cli
