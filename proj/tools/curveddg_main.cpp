#include <CLI11.hpp>
#include <omp.h>

#include <cdg/cli_ops.hpp>

#include <iostream>

namespace {

// exit codes: 0 ok, 2 configuration/input error, 3 numerical failure
int guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const cdg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const cdg::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const cdg::DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const cdg::NumericsError& e) {
    std::cerr << "numerics error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"curveddg: curved-element discontinuous Galerkin Euler solver"};
  app.require_subcommand(1);

  std::string config_path;
  int threads = 0;
  bool deterministic = false;
  app.add_option("--threads", threads, "worker thread count (0 = all cores)");
  app.add_flag("--deterministic", deterministic,
               "fixed-order reductions (bitwise reproducible across thread counts; "
               "this CPU build always honors it)");

  auto* curve = app.add_subcommand("curve", "curve a mesh via the elasticity pipeline");
  curve->add_option("--config", config_path, "case config JSON")->required();

  auto* solve = app.add_subcommand("solve", "run the steady p-refinement solver");
  solve->add_option("--config", config_path, "case config JSON")->required();

  std::string state_path, out_path = "solution.vtk";
  auto* exp = app.add_subcommand("export", "export a state file to legacy VTK");
  exp->add_option("--config", config_path, "case config JSON")->required();
  exp->add_option("--state", state_path, "state file (default: config output.state)");
  exp->add_option("--out", out_path, "output VTK path");

  cdg::BenchConfig bench;
  auto* ben = app.add_subcommand("bench", "kernel micro-benchmarks (CSV to stdout)");
  ben->add_option("--p", bench.p, "polynomial degree")->check(CLI::Range(1, 9));
  ben->add_option("--elements", bench.elements, "approximate element count");
  ben->add_option("--repetitions", bench.repetitions, "timing repetitions");

  CLI11_PARSE(app, argc, argv);

  if (threads > 0) omp_set_num_threads(threads);
  (void)deterministic;  // reductions are always fixed-order in this build

  return guarded([&] {
    if (curve->parsed()) {
      cdg::cmd_curve(cdg::load_case_config(config_path), std::cout);
    } else if (solve->parsed()) {
      cdg::cmd_solve(cdg::load_case_config(config_path), std::cout);
    } else if (exp->parsed()) {
      const auto config = cdg::load_case_config(config_path);
      const std::string state = state_path.empty() ? config.output_state : state_path;
      cdg::cmd_export(config, state, out_path, std::cout);
    } else if (ben->parsed()) {
      bench.threads = threads;
      cdg::cmd_bench(bench, std::cout);
    }
  });
}
