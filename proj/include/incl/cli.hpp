#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "incl/common.hpp"
#include "incl/field.hpp"
#include "incl/geometry.hpp"
#include "incl/loading.hpp"
#include "incl/material.hpp"

namespace incl::cli {

inline constexpr int schema_version = 1;
inline constexpr const char* tool_version = "0.1.0";

enum ExitCode : int {
  exit_ok = 0,
  exit_other = 1,  // I/O and anything unclassified
  exit_config = 2,
  exit_assembly = 3,
  exit_solve = 4,
  exit_oracle = 5,
  exit_self_test = 6,
};

int exit_code(ErrorKind kind);

struct OracleConfig {
  bool enabled = false;
  int q = 256;
  int offset_points = 64;
  double offset_radius = 1.5;
};

struct Tolerances {
  double residual = 1e-8;  // relative residual of x E = -2h
  double oracle = 1e-3;    // max oracle/series discrepancy on the offset circle
};

struct OutputPaths {
  std::string dir = ".";
  std::string solution = "solution.json";
  std::string field = "field.csv";
  std::string summary = "summary.txt";
  std::string manifest = "manifest.json";
  std::string oracle = "oracle.json";
};

struct RunConfig {
  int schema = schema_version;
  double gamma = 1.0;
  std::vector<cplx> a;  // a_0..a_K
  std::optional<double> delta;
  bool cavity = false;
  double lambda = 0.0, mu = 0.0, lambda_t = 0.0, mu_t = 0.0;
  LoadingSpec loading;
  int truncation = 24;
  std::optional<GridSpec> grid;
  OracleConfig oracle;
  Tolerances tolerances;
  FieldOptions field;
  OutputPaths out;

  ConformalMap map() const;
  MaterialPair material() const;
};

// Both throw Error(config) with the offending key in the message and run
// every cross-module validity check.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// "x0,x1,y0,y1,nx,ny"
GridSpec parse_grid(const std::string& text);

struct Overrides {
  std::optional<int> truncation;
  std::optional<GridSpec> grid;
  bool oracle = false;
  std::optional<std::string> out_dir;
  std::optional<double> tolerance;
};

enum class Command { solve, field, oracle_check };
const char* to_string(Command c);

// Applies the overrides and re-runs validation. --tolerance replaces the
// oracle tolerance for oracle-check and the residual tolerance otherwise.
void apply_overrides(RunConfig& cfg, const Overrides& o, Command cmd);

// Echo of the effective configuration in the config schema.
std::string config_to_json(const RunConfig& cfg);

// Assembles, solves, evaluates and writes every report for the command.
// Nothing is written before all results are in memory.
int run(const RunConfig& cfg, Command cmd, std::ostream& log);

// Invariant suite on built-in disk and ellipse fixtures.
int self_test(std::ostream& out);

}  // namespace incl::cli
