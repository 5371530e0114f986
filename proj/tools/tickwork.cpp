#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "scenario.hpp"

namespace {

using namespace tickwork;
using namespace tickwork::cli;

struct Request {
  std::string config_path;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::string out;
};

json load_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  json j = json::parse(f);
  // a manifest written by `run` carries the resolved config under "config"
  if (j.is_object() && j.contains("tool") && j.contains("config") && j["tool"] == "tickwork") return j["config"];
  return j;
}

ScenarioConfig resolve(const Request& r) {
  if (r.config_path.empty() == r.preset.empty()) throw ConfigError("give exactly one of --config or --preset");
  ScenarioConfig c = parse_config(r.preset.empty() ? load_json(r.config_path) : find_preset(r.preset).config);
  if (r.seed) c.run.master_seed = *r.seed;
  if (r.trials) c.run.trials = *r.trials;
  if (!r.out.empty()) c.out_path = r.out;
  return c;
}

int report(const char* kind, const std::exception& e, int code) {
  std::fprintf(stderr, "tickwork: %s: %s\n", kind, e.what());
  return code;
}

void add_scenario_flags(CLI::App* cmd, Request& r) {
  cmd->add_option("--config", r.config_path, "JSON scenario file (or a manifest.json from a previous run)");
  cmd->add_option("--preset", r.preset, "built-in preset name (see `tickwork list`)");
  cmd->add_option("--seed", r.seed, "master seed, overrides the config");
  cmd->add_option("--trials", r.trials, "number of trials, overrides the config");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tickwork: stochastic clock simulations"};
  app.require_subcommand(1);

  Request req;
  auto* run = app.add_subcommand("run", "run a scenario and write its artifacts");
  add_scenario_flags(run, req);
  run->add_option("--out", req.out, "output directory, overrides the config");
  auto* validate = app.add_subcommand("validate", "check a scenario without running it");
  add_scenario_flags(validate, req);
  auto* list = app.add_subcommand("list", "list the built-in presets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      for (const auto& p : presets()) std::printf("%-28s %s\n", p.name.c_str(), p.figure.c_str());
      return 0;
    }
    const auto cfg = resolve(req);
    validate_config(cfg);
    if (validate->parsed()) {
      std::printf("%s\n", to_json(cfg).dump(2).c_str());
      return 0;
    }
    const auto files = run_scenario(cfg);
    write_artifacts(files, cfg.out_path);
    for (const auto& [name, content] : files) std::printf("%s/%s\n", cfg.out_path.c_str(), name.c_str());
    return 0;
  } catch (const NumericalBlowup& e) {
    return report("numerical blowup", e, 2);
  } catch (const TrialError& e) {
    return report(e.numerical() ? "numerical blowup" : "error", e, e.numerical() ? 2 : 1);
  } catch (const ConfigError& e) {
    return report("invalid config", e, 1);
  } catch (const json::exception& e) {
    return report("invalid config", e, 1);
  } catch (const Error& e) {
    return report("error", e, 1);
  } catch (const std::filesystem::filesystem_error& e) {
    return report("i/o", e, 1);
  }
}
