#include <CLI11.hpp>
#include <utility>

#include "sfpmc/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"sfpmc: anisotropic prescribed mean curvature solver"};
  app.require_subcommand(1);
  sfpmc::cli::RunOptions opt;
  std::string config;
  std::string out;
  int workers = 0;
  std::string resume;
  const std::pair<const char*, const char*> commands[] = {
      {"geometry", "distance field, ridge and boundary curvature"},
      {"check", "curvature and integral conditions"},
      {"solve", "continuation solve with audits"},
      {"sweep", "grid x epsilon-floor convergence table"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("config", config, "YAML run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory (overrides outputs.directory)");
    sub->add_option("--workers", workers, "concurrent sweep cells")->check(CLI::PositiveNumber);
    sub->add_option("--seed", opt.seed, "seed for random test-field baskets");
    sub->add_flag("--verbose", opt.verbose, "progress on stderr");
    if (std::string(name) == "solve") sub->add_option("--resume", resume, "continuation checkpoint to resume from");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sfpmc::cli::kInvalid;
  }
  if (!out.empty()) opt.out = out;
  if (workers > 0) opt.workers = workers;
  if (!resume.empty()) opt.resume = resume;
  return sfpmc::cli::run_command(app.get_subcommands().front()->get_name(), config, opt);
}
