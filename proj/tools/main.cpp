#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lrf/harness.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> t_end;
  std::optional<double> step;
  std::vector<std::string> reps;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON experiment configuration")->required();
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--seed", args.seed, "override the initialization seed");
  cmd->add_option("--t-end", args.t_end, "override the integration horizon");
  cmd->add_option("--step", args.step, "override the integrator step");
  cmd->add_option("--rep", args.reps, "override the representation list")->delimiter(',');
}

int apply_and_run(const CommonArgs& args,
                  int (*runner)(const lrf::ExperimentConfig&, const std::string&,
                                std::ostream&)) {
  lrf::ExperimentConfig config;
  try {
    config = lrf::load_config(args.config_path);
    if (args.seed) config.init.seed = *args.seed;
    if (args.t_end) config.integrator.t_end = *args.t_end;
    if (args.step) config.integrator.step = *args.step;
    if (!args.reps.empty()) {
      config.representations.clear();
      for (const std::string& name : args.reps) {
        std::string upper = name;
        for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        config.representations.push_back(lrf::representation_from_string(upper));
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  return runner(config, args.out_dir, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradient-flow laboratory for symmetric low-rank factorization"};
  app.require_subcommand(1);

  CommonArgs sim_args, eq_args, ver_args, rate_args, dec_args;
  CLI::App* sim = app.add_subcommand("simulate", "integrate the flow and emit metric CSVs");
  add_common(sim, sim_args);
  CLI::App* eq = app.add_subcommand("equilibria", "enumerate and classify equilibria");
  add_common(eq, eq_args);
  CLI::App* ver = app.add_subcommand("verify", "run the invariant and bound suite");
  add_common(ver, ver_args);
  CLI::App* rates = app.add_subcommand("rates", "fit decay rates of the expanded cascade");
  add_common(rates, rate_args);
  CLI::App* dec = app.add_subcommand("decompose", "inspect the expanded Schur decomposition");
  add_common(dec, dec_args);

  CLI11_PARSE(app, argc, argv);

  if (sim->parsed()) return apply_and_run(sim_args, lrf::run_simulate);
  if (eq->parsed()) return apply_and_run(eq_args, lrf::run_equilibria);
  if (ver->parsed()) return apply_and_run(ver_args, lrf::run_verify);
  if (rates->parsed()) return apply_and_run(rate_args, lrf::run_rates);
  if (dec->parsed()) return apply_and_run(dec_args, lrf::run_decompose);
  return 2;
}
