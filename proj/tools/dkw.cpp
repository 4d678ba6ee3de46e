// dkw: configuration-driven experiments for the regularized Dean-Kawasaki solver.
//
//   dkw simulate --config run.ini [--out DIR] [--seed N] [--threads N]
//   dkw diagnose DIR

#include <CLI11.hpp>

#include <iostream>

#include "dk/experiments.hpp"
#include "dk/simd/kernels.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Dean-Kawasaki experiment harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string diagnose_dir;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", config_path, "INI experiment configuration");
    if (needs_config) c->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "artifact directory (default [output].directory)");
    sub->add_option("--seed", seed, "overrides [noise].seed");
    sub->add_option("--threads", threads, "worker threads (speed only)")->check(CLI::PositiveNumber);
  };

  auto* simulate = app.add_subcommand("simulate", "one SPDE path plus conservation and entropy reports");
  auto* skeleton = app.add_subcommand("skeleton", "deterministic controlled run");
  auto* rate = app.add_subcommand("rate", "forward and particle-system rate of a controlled run");
  auto* mc = app.add_subcommand("mc", "Monte Carlo tail estimates over [mc].eps_list");
  auto* check = app.add_subcommand("check-kernel", "integrability report for the configured kernel");
  auto* diagnose = app.add_subcommand("diagnose", "re-check an existing trajectory directory");
  for (auto* s : {simulate, skeleton, rate, mc, check}) add_common(s, true);
  diagnose->add_option("dir", diagnose_dir, "trajectory directory")->required();
  diagnose->add_option("--out", out_dir, "where to write diagnose.csv");

  CLI11_PARSE(app, argc, argv);

  dk::RunOptions opt;
  opt.out = out_dir;
  opt.threads = threads;
  for (auto* s : {simulate, skeleton, rate, mc, check}) {
    if (s->parsed() && s->count("--seed") > 0) opt.seed = seed;
  }

  try {
    std::clog << "simd: " << dk::simd::isa_name(dk::simd::active_isa()) << '\n';
    if (diagnose->parsed()) return dk::cmd_diagnose(diagnose_dir, opt, std::cout);
    const dk::ExperimentConfig cfg = dk::load_config(config_path);
    if (simulate->parsed()) return dk::cmd_simulate(cfg, opt, std::cout);
    if (skeleton->parsed()) return dk::cmd_skeleton(cfg, opt, std::cout);
    if (rate->parsed()) return dk::cmd_rate(cfg, opt, std::cout);
    if (mc->parsed()) return dk::cmd_mc(cfg, opt, std::cout);
    if (check->parsed()) return dk::cmd_check_kernel(cfg, opt, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "dkw: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
