// Experiment runner: deterministic numerical experiments on the compactified
// wave geometry near null infinity. One subcommand per experiment kind; the
// configuration file supplies all parameters.

#include <CLI11.hpp>
#include <cstdio>
#include <string>

#include "eblab/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitThreshold = 4;

int run_one(const std::string& kind_arg, const std::string& config_path,
            const eblab::RunOptions& opt) {
  using namespace eblab;
  try {
    Config cfg = Config::parse_file(config_path);
    const std::string kind = cfg.get_string("experiment", "kind", kind_arg);
    if (!kind_arg.empty() && kind != kind_arg)
      throw ConfigError("config kind '" + kind + "' does not match subcommand '" + kind_arg + "'");
    const RunResult res = run_experiment(cfg, opt);
    std::printf("%s\n", res.summary.c_str());
    for (const auto& f : res.files) std::printf("  wrote %s\n", f.c_str());
    return kExitOk;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const ThresholdViolation& e) {
    std::fprintf(stderr, "threshold gate: %s\n", e.what());
    return kExitThreshold;
  } catch (const Error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical experiments on waves near null infinity"};
  app.require_subcommand(0, 1);

  std::string config_path;
  eblab::RunOptions opt;
  long seed = 0;

  app.add_option("--config", config_path, "experiment configuration file")->required();
  app.add_option("--out", opt.out_dir, "output directory (default: out)");
  auto* seed_opt = app.add_option("--seed", seed, "override the configured random seed");
  app.add_option("--threads", opt.threads, "worker threads for independent batches");
  app.add_option("--format", opt.format, "output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  std::string kind_arg;
  for (const char* kind : {"chart", "flow", "portrait", "thresholds", "multiplier", "solve",
                           "normop", "mellin"}) {
    CLI::App* sub = app.add_subcommand(kind, std::string("run a '") + kind + "' experiment");
    sub->fallthrough();
    sub->callback([&kind_arg, kind]() { kind_arg = kind; });
  }

  CLI11_PARSE(app, argc, argv);
  opt.seed = seed;
  opt.seed_override = seed_opt->count() > 0;
  return run_one(kind_arg, config_path, opt);
}
