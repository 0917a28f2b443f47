#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cusp_spectra/acceptance.hpp"
#include "cusp_spectra/config.hpp"
#include "cusp_spectra/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"cusp-spectra: spectral stability experiments for elliptic "
               "eigenvalue problems under domain perturbation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  std::uint64_t seed_override = 0;
  bool seed_set = false;
  int workers_override = 0;

  CLI::App* run = app.add_subcommand("run", "run the experiment described by a config file");
  run->add_option("config", config_path, "TOML-style config file (see docs/config.md)")
      ->required();
  run->add_option("--seed", seed_override, "override the random ensemble seed")
      ->each([&](const std::string&) { seed_set = true; });
  run->add_option("--workers", workers_override, "parallel sweep workers");
  run->add_option("--out", out_override, "output directory override");

  std::vector<int> only;
  std::string verify_dir = "acceptance_out";
  CLI::App* verify =
      app.add_subcommand("verify", "run the full acceptance/property suite");
  verify->add_option("--only", only, "subset of criteria ids (1-9)");
  verify->add_option("--out", verify_dir, "work directory for suite outputs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      cusp::RunConfig cfg = cusp::parse_config_file(config_path);
      if (seed_set) cfg.seed = seed_override;
      if (workers_override > 0) cfg.workers = workers_override;
      if (!out_override.empty()) cfg.out_dir = out_override;
      return cusp::run_experiment(cfg);
    }
    if (verify->parsed()) {
      const auto results = cusp::run_acceptance(only, std::cout, verify_dir);
      return cusp::all_passed(results) ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
