#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <siv/errors.hpp>

#include "commands.hpp"
#include "config.hpp"

namespace {

constexpr int exit_config = 2;
constexpr int exit_experiment = 3;

struct Common {
  std::string config_path;
  std::string output;
  std::string seed;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config_path, "flat JSON config, or a previous sivsim CSV");
  sub->add_option("--output,-o", c.output, "output CSV path (default: stdout or $SIVSIM_OUTPUT_DIR)");
  sub->add_option("--seed", c.seed, "64-bit master seed");
  sub->allow_extras();
}

void write_output(const std::string& text, const Common& c, const std::string& stem) {
  std::string path = c.output;
  if (path.empty()) {
    if (const char* dir = std::getenv("SIVSIM_OUTPUT_DIR"); dir != nullptr && *dir != '\0') {
      std::filesystem::create_directories(dir);
      path = (std::filesystem::path(dir) / (stem + ".csv")).string();
    }
  }
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw sivsim::ConfigError("cannot write output file " + path);
  out << text;
  std::cerr << "wrote " << path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sivsim: SiV electron-nuclear register simulator"};
  app.require_subcommand(1);

  Common common;
  std::string experiment;
  CLI::App* structure = app.add_subcommand("structure", "electronic structure observables");
  CLI::App* estimate = app.add_subcommand("estimate", "strain and field-angle estimation from observables");
  CLI::App* run = app.add_subcommand("run", "register experiment: rabi|ramsey|dd|spinlock|nucrot|gates|rb");
  CLI::App* ssr = app.add_subcommand("ssr", "single-shot nuclear readout Monte Carlo");
  CLI::App* optical = app.add_subcommand("optical", "optical two-level dynamics");
  CLI::App* fit = app.add_subcommand("fit", "fit a registry model to x,y CSV data");
  run->add_option("experiment", experiment, "experiment name")->required();
  for (CLI::App* sub : {structure, estimate, run, ssr, optical, fit}) add_common(sub, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_config;
  }

  try {
    CLI::App* active = app.get_subcommands().front();
    sivsim::Config cfg;
    if (!common.config_path.empty()) cfg.load_file(common.config_path);
    cfg.merge_args(active->remaining());
    if (!common.seed.empty()) cfg.set("seed", common.seed);
    cfg.seed(1);

    std::string text;
    std::string stem = active->get_name();
    if (active == structure) {
      text = sivsim::cmd_structure(cfg);
    } else if (active == estimate) {
      text = sivsim::cmd_estimate(cfg);
    } else if (active == run) {
      text = sivsim::cmd_run(experiment, cfg);
      stem += "_" + experiment;
    } else if (active == ssr) {
      text = sivsim::cmd_ssr(cfg);
    } else if (active == optical) {
      text = sivsim::cmd_optical(cfg);
    } else {
      text = sivsim::cmd_fit(cfg);
    }
    write_output(text, common, stem);
  } catch (const sivsim::ConfigError& e) {
    std::cerr << "ConfigError: " << e.what() << "\n";
    return exit_config;
  } catch (const siv::Error& e) {
    std::cerr << "ExperimentError: " << e.what() << "\n";
    return exit_experiment;
  } catch (const std::exception& e) {
    std::cerr << "ExperimentError: " << e.what() << "\n";
    return exit_experiment;
  }
  return 0;
}
