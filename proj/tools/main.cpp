#include <iostream>

#include <CLI11.hpp>

#include "incl/cli.hpp"

using namespace incl;

namespace {

struct Flags {
  std::string config;
  std::optional<int> truncation;
  std::optional<std::string> grid;
  bool oracle = false;
  std::optional<std::string> out_dir;
  std::optional<double> tolerance;
};

CLI::App* add_run_command(CLI::App& app, const char* name, const char* help, Flags& f) {
  CLI::App* sub = app.add_subcommand(name, help);
  sub->add_option("--config", f.config, "run configuration (JSON)")->required();
  sub->add_option("--truncation", f.truncation, "truncation order n");
  sub->add_option("--grid", f.grid, "field grid \"x0,x1,y0,y1,nx,ny\"");
  sub->add_flag("--oracle", f.oracle, "also run the Nystrom cross-check");
  sub->add_option("--out-dir", f.out_dir, "output directory");
  sub->add_option("--tolerance", f.tolerance,
                  "residual tolerance (oracle tolerance for oracle-check)");
  return sub;
}

int run_command(const Flags& f, cli::Command cmd) {
  try {
    cli::RunConfig cfg = cli::load_config(f.config);
    cli::Overrides o;
    o.truncation = f.truncation;
    if (f.grid) o.grid = cli::parse_grid(*f.grid);
    o.oracle = f.oracle;
    o.out_dir = f.out_dir;
    o.tolerance = f.tolerance;
    cli::apply_overrides(cfg, o, cmd);
    const int code = cli::run(cfg, cmd, std::cerr);
    if (code == cli::exit_solve) std::cerr << "error: solve did not reach the residual tolerance\n";
    if (code == cli::exit_oracle) std::cerr << "error: oracle discrepancy above tolerance\n";
    return code;
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return cli::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::exit_other;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Elastic inclusion solver: series formulation with a Nystrom cross-check"};
  app.require_subcommand(1);
  Flags solve_f, field_f, oracle_f;
  CLI::App* solve = add_run_command(app, "solve", "solve for the density coefficients", solve_f);
  CLI::App* field = add_run_command(app, "field", "solve and evaluate the field on a grid", field_f);
  CLI::App* check = add_run_command(app, "oracle-check", "solve and compare against the Nystrom oracle", oracle_f);
  CLI::App* self = app.add_subcommand("self-test", "run the invariant suite on built-in fixtures");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // help and version requests come through here with status 0
    return app.exit(e) == 0 ? cli::exit_ok : cli::exit_config;
  }

  if (*solve) return run_command(solve_f, cli::Command::solve);
  if (*field) return run_command(field_f, cli::Command::field);
  if (*check) return run_command(oracle_f, cli::Command::oracle_check);
  if (*self) return cli::self_test(std::cout);
  return cli::exit_other;
}
