// Command-line front end: one subcommand per scenario.

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bouncer/bouncer.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Bound states of neutrons above a mirror and slit transmission curves"};
  app.require_subcommand(1);

  std::string config_path;
  std::string data_path;
  std::string out_dir;
  for (const char* name : {"spectrum", "scan", "fit", "appendix"}) {
    auto* sub = app.add_subcommand(name, std::string("run the ") + name + " scenario");
    sub->add_option("--config", config_path, "key = value configuration file")
        ->check(CLI::ExistingFile);
    sub->add_option("--data", data_path, "measured counts CSV (z_um,n_out[,sigma])");
    sub->add_option("--out", out_dir, "output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string scenario = app.get_subcommands().front()->get_name();
  bouncer::ConfigOverrides overrides{{"scenario", scenario}};
  // Flag paths are relative to the working directory, not the config file.
  if (!data_path.empty()) overrides["fit.data"] = std::filesystem::absolute(data_path).string();
  if (!out_dir.empty()) overrides["output.dir"] = std::filesystem::absolute(out_dir).string();

  bouncer::RunConfig cfg;
  try {
    cfg = config_path.empty() ? bouncer::parse_config("", ".", overrides)
                              : bouncer::load_config(config_path, overrides);
  } catch (const bouncer::Error& e) {
    std::string msg = e.what();
    for (auto& ch : msg) {
      if (ch == '\n') ch = ';';
    }
    std::cerr << "error kind=" << bouncer::to_string(e.kind())
              << " exit=" << bouncer::exit_code(e.kind()) << " message=\"" << msg << "\"\n";
    return bouncer::exit_code(e.kind());
  }
  return bouncer::run(cfg, std::cout, std::cerr);
}
