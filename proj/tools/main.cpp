#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "app/commands.hpp"

int main(int argc, char** argv) {
  using namespace amln::app;

  CLI::App app{"Adaptive multilevel Newton experiments"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::string out_dir;
  GlobalOptions opts;
  auto* seed_opt = app.add_option("--seed", seed, "Global seed (overrides the config)");
  auto* out_opt = app.add_option("--out", out_dir, "Output directory (overrides the config)");
  app.add_option("--threads", opts.threads, "Run algorithms in parallel; wall times become non-comparable")
      ->check(CLI::PositiveNumber);

  std::string config;
  auto* run = app.add_subcommand("run", "Run every configured algorithm");
  run->add_option("config", config, "Experiment config")->required();
  run->fallthrough();

  auto* check = app.add_subcommand("check", "Finite-difference and operator checks");
  check->add_option("config", config, "Experiment config")->required();
  check->fallthrough();

  std::vector<double> sigmas;
  auto* sweep = app.add_subcommand("sigma-sweep", "Run AML-Newton for several sigma values");
  sweep->add_option("config", config, "Experiment config")->required();
  sweep->add_option("--sigmas", sigmas, "Comma separated sigma values")->required()->delimiter(',');
  sweep->fallthrough();

  amln::Index d = 0, n = 0, rank = 10;
  std::string loss = "logistic";
  std::string path;
  auto* gen = app.add_subcommand("gen-data", "Write a low-rank synthetic dataset in LIBSVM format");
  gen->add_option("--d", d, "Samples")->required()->check(CLI::PositiveNumber);
  gen->add_option("--n", n, "Features")->required()->check(CLI::PositiveNumber);
  gen->add_option("--rank", rank, "Rank of the feature matrix")->check(CLI::PositiveNumber);
  gen->add_option("--loss", loss, "logistic or poisson")->check(CLI::IsMember({"logistic", "poisson"}));
  gen->add_option("output", path, "Output file")->required();
  gen->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  if (*seed_opt) opts.seed = seed;
  if (*out_opt) opts.out = out_dir;

  if (*run) return cmd_run(config, opts, std::cout, std::cerr);
  if (*check) return cmd_check(config, opts, std::cout, std::cerr);
  if (*sweep) return cmd_sigma_sweep(config, sigmas, opts, std::cout, std::cerr);
  return cmd_gen_data(d, n, rank, seed, amln::parse_loss(loss), path, std::cerr);
}
