// eit_main.cpp - command line front end
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "eit/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"EIT lineshape simulator for inhomogeneously broadened Lambda ensembles"};
  app.require_subcommand(1);

  struct SubArgs {
    std::string config;
    std::string out;
    int jobs = 1;
  };

  const std::pair<const char*, const char*> subs[] = {
      {"spectrum", "compute one susceptibility spectrum and its metrics"},
      {"sweep", "sweep the drive strength and tabulate width or visibility"},
      {"holeburn", "simulate hole-burning preparation, then the EIT spectrum on it"},
      {"analyze", "extract metrics from a measured transmission trace"},
  };

  SubArgs args[4];
  CLI::App* handles[4];
  for (int i = 0; i < 4; ++i) {
    CLI::App* sub = app.add_subcommand(subs[i].first, subs[i].second);
    sub->add_option("--config", args[i].config, "run configuration file")->required();
    sub->add_option("--out", args[i].out, "output directory (default: <output_dir>/<mode>-<hash>)");
    sub->add_option("--jobs", args[i].jobs, "worker threads for grid points")
        ->check(CLI::PositiveNumber);
    handles[i] = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  for (int i = 0; i < 4; ++i) {
    if (!handles[i]->parsed()) continue;
    try {
      eit::run_from_config(args[i].config, subs[i].first, args[i].out, args[i].jobs, std::cout);
      return 0;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return eit::exit_code_for(e);
    }
  }
  return 2;
}
