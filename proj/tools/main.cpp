#include <CLI11.hpp>
#include <string>
#include <vector>

#include "smallnoise/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Gaussian approximations of small noise diffusions"};
  app.get_formatter()->column_width(28);

  smallnoise::CliOptions opts;
  app.add_option("-c,--config", opts.config_path, "JSON config file")
      ->required();
  app.add_option("-s,--set", opts.overrides,
                 "override a config entry, e.g. --set epsilon=1e-4 or "
                 "--set sweep.with_tv=true (repeatable)");
  app.add_option("-o,--out", opts.out_dir,
                 "output directory (overrides the config's 'out')");
  app.add_flag("--check", opts.check,
               "exit nonzero when the command's built-in checks fail");
  app.add_flag("--dry-run", opts.dry_run,
               "validate the config and print the resolved plan only");
  app.add_option("-t,--threads", opts.threads,
                 "worker threads (0 = hardware default)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? smallnoise::kExitOk : smallnoise::kExitUsage;
  }
  return smallnoise::run_cli(opts);
}
