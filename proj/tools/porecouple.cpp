#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "porecouple/cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace porecouple::cli;
  CLI::App app{"Reactive transport coupling platform"};
  app.require_subcommand(1);

  std::string validate_file;
  auto* validate = app.add_subcommand("validate", "check a scenario file");
  validate->add_option("file", validate_file, "scenario JSON")->required();

  std::string run_file;
  std::string out_dir;
  std::vector<std::string> overrides;
  auto* run = app.add_subcommand("run", "run a scenario");
  run->add_option("file", run_file, "scenario JSON")->required();
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--set", overrides, "override as dotted.path=value")->allow_extra_args(false);

  std::string mff_file;
  std::string vtk_file;
  auto* export_vtk = app.add_subcommand("export-vtk", "convert an MFF snapshot to legacy VTK");
  export_vtk->add_option("mff", mff_file, "input MFF file")->required();
  export_vtk->add_option("out", vtk_file, "output VTK file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*validate) return run_validate(validate_file, std::cout, std::cerr);
  if (*run) return run_scenario(run_file, out_dir, overrides, std::cout, std::cerr);
  return run_export_vtk(mff_file, vtk_file, std::cout, std::cerr);
}
