// sinh-torus <integrate|verify|nullity|export|bound> --config <path> [--out <dir>]

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Minimal tori in S^3 from the sinh-Gordon frame system"};
  std::string command;
  std::string config;
  std::string out_dir = ".";
  app.add_option("command", command, "integrate | verify | nullity | export | bound")
      ->required()
      ->check(CLI::IsMember({"integrate", "verify", "nullity", "export", "bound"}));
  app.add_option("--config", config, "JSON run configuration")->required();
  app.add_option("--out", out_dir, "output directory");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return sinh_torus::cli::run(command, config, out_dir, std::cout, std::cerr);
}
