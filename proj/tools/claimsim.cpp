#include <iostream>

#include <CLI11.hpp>

#include "claimsim/error.hpp"
#include "claimsim/runner.hpp"

int main(int argc, char** argv) {
  using namespace claimsim;
  CLI::App app{"Monte Carlo experiments for marked Poisson cluster claim models"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);

  RunOptions opt;
  std::string out_dir = "out";
  unsigned threads = 0;
  std::uint64_t seed = 0;
  std::string regime;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "Experiment config file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
    sub->add_option("--threads", threads, "Worker threads (default from config)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "Master seed override");
    sub->add_flag("--strict", opt.strict, "Treat failed checks outside the hypotheses as failures");
  };

  auto* simulate = app.add_subcommand("simulate", "Simulate one path and dump its events");
  common(simulate);
  auto* analyze = app.add_subcommand("analyze", "Evaluate the closed forms for a model");
  common(analyze);
  auto* verify = app.add_subcommand("verify", "Run a limit-theorem experiment");
  verify->add_option("regime", regime,
                     "clt, stable12, stable01, subordinator, counterexample or residue_scaling")
      ->required();
  common(verify);

  CLI11_PARSE(app, argc, argv);

  opt.out_dir = out_dir;
  if (simulate->parsed()) opt.command = Command::Simulate;
  if (analyze->parsed()) opt.command = Command::Analyze;
  if (verify->parsed()) {
    opt.command = Command::Verify;
    try {
      opt.regime = parse_regime(regime);
    } catch (const Error& e) {
      std::cerr << e.what() << "\n";
      return 2;
    }
  }
  if (threads > 0) opt.threads = threads;
  for (auto* sub : {simulate, analyze, verify})
    if (sub->parsed() && sub->count("--seed")) opt.seed = seed;
  return run(opt, std::cout);
}
