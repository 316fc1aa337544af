// Experiment runner: mdopt <config> [--out <prefix>] [--quiet]
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "mdopt/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"mirror descent / natural gradient experiment runner"};
  std::string config_path;
  std::string out_prefix;
  bool quiet = false;
  app.add_option("config", config_path, "experiment config file (flat key=value lines)")
      ->required();
  app.add_option("--out", out_prefix, "output path prefix, overrides the config's `out`");
  app.add_flag("--quiet", quiet, "do not echo summary.txt to stdout");
  CLI11_PARSE(app, argc, argv);

  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::fprintf(stderr, "error: cannot read config '%s'\n", config_path.c_str());
    return 2;
  }
  std::ostringstream buf;
  buf << in.rdbuf();

  mdopt::ParseResult parsed = mdopt::parse_config(buf.str());
  if (!parsed.ok()) {
    for (const mdopt::ParseError& e : parsed.errors)
      std::fprintf(stderr, "error: %s\n", mdopt::format_error(e).c_str());
    return 2;
  }

  try {
    return mdopt::run(*parsed.config, out_prefix, quiet).exit_code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
