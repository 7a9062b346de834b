#include <iostream>

#include <CLI11.hpp>

#include "sarsim/cli.hpp"

int main(int argc, char** argv) {
  sarsim::CliOptions o;
  CLI::App app{"Behavioral simulator of a 10-bit asynchronous SAR ADC"};
  app.require_subcommand(1);

  const auto common = [&](CLI::App* c) {
    c->add_option("--config", o.config_path, "configuration file (default: built-in calibrated set)");
    c->add_option("--seed", o.seed, "random seed");
    c->add_option("--out", o.out, "output directory (default: $SARSIM_OUT_DIR or ./sarsim_out)");
    c->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
    c->add_flag("--check", o.check, "exit with status 3 when the command's checks fail");
  };
  const auto tone = [&](CLI::App* c) {
    c->add_option("--n", o.n, "record length");
    c->add_option("--bin", o.bin, "tone bin (coprime with N)");
    c->add_option("--amplitude", o.amplitude, "differential peak amplitude, V");
  };

  auto* sim = app.add_subcommand("simulate", "coherent tone -> spectrum CSV and metrics JSON");
  common(sim);
  tone(sim);
  sim->add_flag("--binary", o.binary_dump, "write codes as a binary dump instead of CSV");

  auto* timing = app.add_subcommand("timing", "asynchronous timing budget");
  common(timing);

  auto* power = app.add_subcommand("power", "per-block power breakdown");
  common(power);
  power->add_option("--n", o.n, "number of conversions");
  power->add_option("--amplitude", o.amplitude, "differential peak amplitude, V");

  auto* dac = app.add_subcommand("dac-compare", "DAC topology energy/capacitance/linearity trade");
  common(dac);

  auto* meta = app.add_subcommand("metastability", "Monte Carlo metastability rate");
  common(meta);
  meta->add_option("--pmeta", o.pmeta, "target metastability probability");
  meta->add_option("--trials", o.trials, "number of trials");

  auto* sweep = app.add_subcommand("sweep", "metrics versus one configuration key");
  common(sweep);
  tone(sweep);
  sweep->add_option("--param", o.param, "configuration key")->required();
  sweep->add_option("--range", o.range, "start:stop:count, e.g. 0fF:100fF:11")->required();

  app.add_subcommand("print-defaults", "print the built-in configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : sarsim::kExitRuntime;
  }
  return sarsim::run_command(app.get_subcommands().front()->get_name(), o, std::cout, std::cerr);
}
