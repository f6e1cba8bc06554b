#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "varineq/cli/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"varineq: dimensional variance inequalities, dual checks, semigroups and spectral gaps"};
  app.require_subcommand(1);

  std::string config;
  bool strict = false;
  std::uint64_t seed = 0;
  double tol = 0.0;
  std::string out = "out";
  std::string chosen;

  for (const char* name : {"run", "sweep", "dual", "evolve", "spectrum"}) {
    auto* sub = app.add_subcommand(name, std::string(name) == "run" ? "run every job of the config"
                                                                    : std::string("run the ") + name + " jobs of the config");
    sub->add_option("config", config, "config file")->required();
    sub->add_flag("--strict", strict, "guard failures and asserted-only violations fail the run");
    sub->add_option("--seed", seed, "seed for sampled quadrature");
    sub->add_option("--tol", tol, "relative tolerance of 1-D quadrature");
    sub->add_option("--out", out, "output directory")->capture_default_str();
    sub->callback([&chosen, name] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  varineq::cli::RunOptions opt;
  opt.strict = strict;
  opt.out_dir = out;
  for (auto* sub : app.get_subcommands()) {
    if (sub->count("--seed")) opt.seed = seed;
    if (sub->count("--tol")) opt.tol = tol;
  }
  return varineq::cli::run_command(chosen, config, opt, std::cout);
}
