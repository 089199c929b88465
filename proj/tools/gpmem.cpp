#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "gpmem/config.hpp"
#include "gpmem/error.hpp"
#include "gpmem/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Gurtin-Pipkin memory-kernel toolkit: forward solves, kernel recovery and experiments"};
  std::string command;
  std::string config;
  std::string out;
  long seed = 0;
  bool verbose = false;
  app.add_option("command", command, "forward | response | invert | uniqueness | nonsobolev | speedcheck | validate")
      ->check(CLI::IsMember({"forward", "response", "invert", "uniqueness", "nonsobolev", "speedcheck", "validate"}));
  app.add_option("--config", config, "Run configuration file")->required();
  auto* out_opt = app.add_option("--out", out, "Output directory (overrides [output] dir)");
  auto* seed_opt = app.add_option("--seed", seed, "Reserved; all methods are deterministic");
  app.add_flag("--verbose", verbose, "Progress messages on stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    const std::optional<gpmem::Command> cmd =
        command.empty() ? std::nullopt : gpmem::command_from_name(command);
    const gpmem::RunConfig cfg = gpmem::parse_config(config, cmd);
    gpmem::RunOptions opts;
    if (*out_opt) opts.out_dir = out;
    if (*seed_opt) opts.seed = seed;
    if (verbose) opts.log = &std::cerr;
    const int rc = gpmem::run(cfg, opts);
    if (verbose) std::cerr << "[gpmem] exit status " << rc << '\n';
    return rc;
  } catch (const gpmem::Error& e) {
    std::cerr << "gpmem: " << e.what() << '\n';
    return gpmem::exit_status(e.code());
  }
}
