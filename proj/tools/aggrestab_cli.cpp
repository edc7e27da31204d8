#include "aggrestab/aggrestab.h"

#include "CLI11.hpp"

#include <cstdio>
#include <string>

int main(int argc, char** argv) {
  CLI::App app{"Stability lab for nonlocal aggregation-diffusion on the unit interval"};
  app.set_version_flag("--version", aggrestab_version());

  std::string config_path;
  std::string out_dir;
  unsigned jobs = 1;
  std::string command;

  for (const char* name : {"validate-kernel", "analyze", "simulate", "mild-solve", "threshold"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "key=value run configuration")->required();
    sub->add_option("--out", out_dir, "output directory (default: output.dir from the config)");
    sub->add_option("--jobs", jobs, "worker threads for independent sweep points")->check(CLI::Range(1u, 1024u));
    sub->callback([&command, name] { command = name; });
  }
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 64;
  }

  aggrestab_config* cfg = nullptr;
  const aggrestab_status s = aggrestab_config_load(config_path.c_str(), &cfg);
  if (s != AGGRESTAB_OK) {
    std::fprintf(stderr, "aggrestab: %s\n", aggrestab_last_error());
    return s == AGGRESTAB_IO ? 74 : (s == AGGRESTAB_LOAD ? 74 : 64);
  }
  int code = 0;
  if (aggrestab_run(command.c_str(), cfg, out_dir.empty() ? nullptr : out_dir.c_str(), jobs, &code) != AGGRESTAB_OK) {
    std::fprintf(stderr, "aggrestab %s: %s\n", command.c_str(), aggrestab_last_error());
  }
  aggrestab_config_free(cfg);
  return code;
}
