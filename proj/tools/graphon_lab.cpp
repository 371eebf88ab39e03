#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "graphon/csv.hpp"
#include "graphon/errors.hpp"
#include "graphon/experiment.hpp"

namespace {

struct Overrides {
  std::optional<std::string> out;
  std::optional<std::string> experiment;
  std::optional<int> n;
  std::optional<double> dt;
  std::optional<double> t_end;
};

graphon::ExperimentConfig load(const std::string& path, const Overrides& o) {
  graphon::ExperimentConfig cfg = graphon::load_config(path);
  if (o.out) cfg.out_dir = *o.out;
  if (o.experiment) {
    try {
      cfg.experiment = graphon::parse_experiment_kind(*o.experiment);
    } catch (const std::invalid_argument& e) {
      throw graphon::ConfigError("experiment", e.what());
    }
  }
  if (o.n) cfg.n = *o.n;
  if (o.dt) cfg.dt = *o.dt;
  if (o.t_end) cfg.t_end = *o.t_end;
  graphon::validate_config(cfg);
  return cfg;
}

int report(const graphon::ExperimentResult& r, const std::string& out_dir) {
  for (const auto& f : r.failures) std::cerr << "assertion failed: " << f << '\n';
  std::cout << "wrote " << out_dir << (r.exit_code == 0 ? " (pass)" : " (FAIL)") << '\n';
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graphon consensus dynamics lab"};
  app.require_subcommand(1);

  std::string run_config;
  Overrides o;
  auto* run = app.add_subcommand("run", "Run one experiment");
  run->add_option("--config", run_config, "Config file")->required();
  run->add_option("--out", o.out, "Output directory");
  run->add_option("--experiment", o.experiment, "Experiment name");
  run->add_option("--n", o.n, "Number of agents");
  run->add_option("--dt", o.dt, "Step size");
  run->add_option("--t-end", o.t_end, "Final time");

  std::string sweep_config;
  std::optional<std::string> sweep_out;
  auto* sweep = app.add_subcommand("sweep", "Run the rate sweep over sweep_ns");
  sweep->add_option("--config", sweep_config, "Config file")->required();
  sweep->add_option("--out", sweep_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      const auto cfg = load(run_config, o);
      return report(graphon::run_experiment(cfg), cfg.out_dir);
    }
    Overrides so;
    so.out = sweep_out;
    auto cfg = load(sweep_config, so);
    return report(graphon::run_rate_sweep(cfg), cfg.out_dir);
  } catch (const graphon::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const graphon::NumericalError& e) {
    std::cerr << "numerical error at t=" << graphon::format_double(e.time()) << ": " << e.what()
              << '\n';
    return 3;
  }
}
