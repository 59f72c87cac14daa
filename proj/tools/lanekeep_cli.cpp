#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace lanekeep::cli;
  CLI::App app{"Lane-keeping reinforcement learning laboratory"};
  app.require_subcommand(1);

  TrainOptions train;
  auto* t = app.add_subcommand("train", "train agents over a seed list");
  t->add_option("--algo", train.algo, "qlearn | dqn | ddac")
      ->check(CLI::IsMember({"qlearn", "dqn", "ddac"}))
      ->capture_default_str();
  t->add_option("--termination", train.termination, "none | out | stuck | both")
      ->check(CLI::IsMember({"none", "out", "stuck", "both"}))
      ->capture_default_str();
  t->add_option("--track", train.track, "track file")->required()->check(CLI::ExistingFile);
  t->add_option("--seeds", train.seeds, "seed range a..b or list a,b,c")->capture_default_str();
  t->add_option("--out", train.out, "output directory")->capture_default_str();
  t->add_option("--config", train.config, "JSON experiment config with overrides")->check(CLI::ExistingFile);
  t->add_flag("--no-replay", train.no_replay, "DQN trains on the latest transition only");
  t->add_flag("--no-target-net", train.no_target_net, "DQN bootstraps from its online network");
  t->add_flag("--two-feature-obs", train.two_feature_obs, "observe only trackPos and speedX");
  t->add_option("--max-episodes", train.max_episodes)->capture_default_str();
  t->add_option("--max-steps", train.max_steps, "step cap per episode")->capture_default_str();
  t->add_option("--laps", train.laps, "laps in one episode that count as converged")->capture_default_str();
  t->add_flag("--quiet", train.quiet);

  EvalOptions eval;
  auto* e = app.add_subcommand("eval", "greedy rollout of a trained agent");
  e->add_option("--checkpoint", eval.checkpoint)->required()->check(CLI::ExistingFile);
  e->add_option("--track", eval.track)->required()->check(CLI::ExistingFile);
  e->add_option("--laps", eval.laps)->capture_default_str();
  e->add_option("--termination", eval.termination)
      ->check(CLI::IsMember({"none", "out", "stuck", "both"}))
      ->capture_default_str();
  e->add_option("--max-steps", eval.max_steps)->capture_default_str();
  e->add_option("--trajectory", eval.trajectory, "write the driven path as CSV");

  std::string compare_dir, compare_label = "ddac";
  auto* c = app.add_subcommand("compare", "termination ordering and replay ablation reports");
  c->add_option("--in", compare_dir, "directory holding convergence.csv")->required()->check(CLI::ExistingDirectory);
  c->add_option("--label", compare_label, "run label for the ordering verdict")->capture_default_str();

  ScrOptions scr;
  auto* s = app.add_subcommand("scr-client", "drive a car on an SCR race server");
  add_scr_options(*s, scr);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*t) return run_train(train);
    if (*e) return run_eval(eval);
    if (*c) return run_compare(compare_dir, compare_label);
    if (*s) return run_scr_client(scr);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}
