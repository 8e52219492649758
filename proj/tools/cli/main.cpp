#include <iostream>
#include <map>
#include <memory>

#include <CLI11.hpp>

#include "bni/error.hpp"
#include "commands.hpp"
#include "run_config.hpp"

using namespace bni::cli;

namespace {

struct Sub {
  Command command;
  CLI::App* app = nullptr;
  std::string config_path;
  bool dry_run = false;
  bool no_plots = false;
  bool full_data_bounds = false;
  unsigned long long seed = 0;
  CLI::Option* seed_opt = nullptr;
  std::map<std::string, std::string> raw;
  std::map<std::string, CLI::Option*> opts;
};

std::string flag_name(const std::string& key) {
  std::string s = key;
  for (char& c : s) {
    if (c == '_') c = '-';
  }
  return "--" + s;
}

void add_subcommand(CLI::App& root, Sub& sub, const std::string& description) {
  sub.app = root.add_subcommand(to_string(sub.command), description);
  sub.app->add_option("--config", sub.config_path, "key = value settings file");
  sub.app->add_flag("--dry-run", sub.dry_run, "print the resolved settings and exit");
  sub.seed_opt = sub.app->add_option("--seed", sub.seed, "root random seed");
  for (const auto& k : keys_for(sub.command)) {
    if (k.name == "plots") {
      sub.app->add_flag("--no-plots", sub.no_plots, "skip SVG output");
    } else if (k.name == "full_data_bounds") {
      sub.app->add_flag("--full-data-bounds", sub.full_data_bounds, k.help);
    } else {
      const std::string help = k.default_value.empty() ? k.help : k.help + " [" + k.default_value + "]";
      sub.opts[k.name] = sub.app->add_option(flag_name(k.name), sub.raw[k.name], help);
    }
  }
}

RunConfig resolve(const Sub& sub) {
  KeyValues file;
  if (!sub.config_path.empty()) file = read_config_file(sub.config_path);
  KeyValues flags;
  for (const auto& [name, opt] : sub.opts) {
    if (opt->count() > 0) flags[name] = sub.raw.at(name);
  }
  if (sub.no_plots) flags["plots"] = "false";
  if (sub.full_data_bounds) flags["full_data_bounds"] = "true";
  std::optional<unsigned long long> seed;
  if (sub.seed_opt->count() > 0) seed = sub.seed;
  return RunConfig::resolve(sub.command, file, flags, seed);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Treatment effect estimation under bipartite network interference"};
  app.require_subcommand(1);
  std::vector<std::unique_ptr<Sub>> subs;
  const std::pair<Command, const char*> commands[] = {
      {Command::derive, "map treatments to key/upwind exposures"},
      {Command::estimate, "estimate direct and spillover effects"},
      {Command::simulate, "run Monte Carlo simulation scenarios"},
      {Command::discover, "screen binarized covariates for effect heterogeneity"},
  };
  for (const auto& [c, help] : commands) {
    subs.push_back(std::make_unique<Sub>());
    subs.back()->command = c;
    add_subcommand(app, *subs.back(), help);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 4;
  }

  for (const auto& sub : subs) {
    if (!sub->app->parsed()) continue;
    try {
      const RunConfig config = resolve(*sub);
      if (sub->dry_run) {
        config.print(std::cout);
        return 0;
      }
      run_command(config, std::cout);
      return 0;
    } catch (const bni::Error& e) {
      std::cerr << "error: " << e.what() << '\n';
      return e.exit_code();
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 1;
    }
  }
  return 4;
}
