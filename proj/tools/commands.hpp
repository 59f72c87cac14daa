#pragma once

// Subcommand implementations shared by the `lanekeep` and `scr-client`
// executables.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "lanekeep/lanekeep.hpp"

namespace lanekeep::cli {

// Accepts "1..5", "1,2,7" or a single number.
inline std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  if (auto dots = text.find(".."); dots != std::string::npos) {
    const auto lo = std::stoull(text.substr(0, dots));
    const auto hi = std::stoull(text.substr(dots + 2));
    if (hi < lo) throw std::invalid_argument("empty seed range " + text);
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) seeds.push_back(std::stoull(part));
  if (seeds.empty()) throw std::invalid_argument("no seeds given");
  return seeds;
}

struct TrainOptions {
  std::string algo = "ddac";
  std::string termination = "both";
  std::string track;
  std::string seeds = "1..5";
  std::string out = "runs";
  std::string config;
  bool no_replay = false;
  bool no_target_net = false;
  bool two_feature_obs = false;
  std::size_t max_episodes = 3000;
  std::uint64_t max_steps = 20'000;
  std::uint32_t laps = 10;
  bool quiet = false;
};

inline int run_train(const TrainOptions& o) {
  ExperimentConfig cfg;
  if (!o.config.empty()) {
    std::ifstream is(o.config);
    if (!is) throw std::runtime_error("cannot open config " + o.config);
    cfg = json::parse(is).get<ExperimentConfig>();
  }
  cfg.agent.algorithm = parse_algorithm(o.algo);
  cfg.termination = parse_termination_condition(o.termination);
  cfg.track_path = o.track;
  cfg.seeds = parse_seeds(o.seeds);
  cfg.output_dir = o.out;
  cfg.max_episodes = o.max_episodes;
  cfg.max_steps_per_episode = o.max_steps;
  cfg.convergence_laps = o.laps;
  cfg.agent.encoder.two_feature = o.two_feature_obs;
  std::string label(to_string(cfg.agent.algorithm));
  if (o.no_replay) {
    cfg.agent.dqn.use_replay = false;
    label += "-noreplay";
  }
  if (o.no_target_net) {
    cfg.agent.dqn.use_target_net = false;
    label += "-notarget";
  }
  if (o.two_feature_obs) label += "-2obs";
  cfg.label = label;

  EpisodeCallback progress;
  if (!o.quiet) {
    progress = [](std::uint64_t seed, const EpisodeLog& e) {
      if (e.episode % 25 == 0 || e.laps_completed > 0)
        std::cerr << "seed " << seed << " episode " << e.episode << " steps " << e.steps << " laps "
                  << e.laps_completed << " reward " << e.total_reward << " end "
                  << to_string(e.termination) << '\n';
    };
  }
  const auto result = run_experiment(cfg, {}, progress);
  for (const auto& r : result.records()) {
    std::cout << cfg.run_label() << ' ' << to_string(cfg.termination) << " seed " << r.seed << ": ";
    if (r.failed) std::cout << "failed (" << r.failure << ")";
    else if (r.converged) std::cout << "converged at episode " << *r.convergence_episode;
    else std::cout << "not converged after " << r.episodes_run << " episodes";
    std::cout << ", " << r.wall_time << " s\n";
  }
  return 0;
}

struct EvalOptions {
  std::string checkpoint;
  std::string track;
  std::uint32_t laps = 1;
  std::string termination = "both";
  std::uint64_t max_steps = 20'000;
  std::string trajectory;
};

inline int run_eval(const EvalOptions& o) {
  auto agent = load_agent_file(o.checkpoint);
  const Track track = load_track(o.track);
  const auto term = TerminationPolicy::for_condition(parse_termination_condition(o.termination));
  const auto trace = evaluate_rollout(*agent, track, DynamicsConfig{}, term, o.laps, o.max_steps,
                                      !o.trajectory.empty());
  json out{{"algorithm", to_string(agent->algorithm())},
           {"laps", trace.laps},
           {"steps", trace.steps},
           {"total_reward", trace.total_reward},
           {"termination", to_string(trace.termination)}};
  if (trace.steer.size() >= 2) out["mean_abs_dsteer"] = smoothness_metric(trace.steer);
  try {
    out["curved_mean_abs_dsteer"] = curved_smoothness(trace);
  } catch (const MetricError&) {
    out["curved_mean_abs_dsteer"] = nullptr;
  }
  if (!o.trajectory.empty()) {
    std::ofstream os(o.trajectory);
    os << "step,x,y,heading,steer,curved\n";
    for (std::size_t i = 0; i < trace.path.size(); ++i)
      os << i << ',' << trace.path[i].x << ',' << trace.path[i].y << ',' << trace.path[i].heading << ','
         << trace.steer[i] << ',' << (trace.curved[i] ? 1 : 0) << '\n';
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

inline int run_compare(const std::string& dir, const std::string& label) {
  namespace fs = std::filesystem;
  const auto table = read_convergence_csv(dir);
  json verdict = json::object();
  std::ofstream csv(fs::path(dir) / "ordering.csv", std::ios::trunc);
  csv << "label,termination,seeds,converged,median_convergence_episode\n";
  for (const auto& [name, by_cond] : table.by_label) {
    const auto rep = compare_terminations(by_cond, table.max_episodes);
    for (const auto& [c, s] : rep.conditions)
      if (s.seeds > 0)
        csv << name << ',' << to_string(c) << ',' << s.seeds << ',' << s.converged << ','
            << nn::format_double(s.median_episode) << '\n';
    if (name == label) verdict["termination_ordering"] = ordering_report_json(rep, name);
  }
  if (!verdict.contains("termination_ordering")) {
    std::cerr << "no runs labelled '" << label << "' in " << dir << '\n';
    verdict["termination_ordering"] = nullptr;
  }
  // Replay ablation: pair every condition run both as "dqn" and "dqn-noreplay".
  json ablations = json::object();
  auto with = table.by_label.find("dqn");
  auto without = table.by_label.find("dqn-noreplay");
  if (with != table.by_label.end() && without != table.by_label.end()) {
    for (const auto& [c, recs] : with->second) {
      auto it = without->second.find(c);
      if (it == without->second.end()) continue;
      ablations[std::string(to_string(c))] =
          replay_ablation_json(replay_ablation(recs, it->second, table.max_episodes));
    }
  }
  verdict["replay_ablation"] = ablations;
  std::ofstream(fs::path(dir) / "verdict.json", std::ios::trunc) << verdict.dump(2) << '\n';
  std::cout << verdict.dump(2) << '\n';
  return 0;
}

struct ScrOptions {
  std::string host = "localhost";
  int port = 3001;
  std::string checkpoint;
  int timeout_ms = 1000;
  int retries = 5;
  std::string client_id = "SCR";
};

inline int run_scr_client(const ScrOptions& o) {
  auto agent = load_agent_file(o.checkpoint);
  scr::ClientOptions opt;
  opt.host = o.host;
  opt.port = o.port;
  opt.timeout_ms = o.timeout_ms;
  opt.max_retries = o.retries;
  opt.client_id = o.client_id;
  scr::Driver driver;
  driver.drive = [&](const scr::SensorFrame& f) {
    const CarAction a = agent->act(Observation{f.trackPos, f.angle, f.speedX}, 0, false);
    return scr::ActuatorFrame{a.steer, a.accel, a.brake, 1, false};
  };
  driver.on_restart = [&] { agent->begin_episode(); };
  const auto summary = scr::run_client(opt, driver);
  std::cout << json{{"steps", summary.steps},
                    {"restarts", summary.restarts},
                    {"timeouts", summary.timeouts},
                    {"parse_errors", summary.parse_errors},
                    {"ended_by", summary.ended_by == scr::SessionEnd::shutdown ? "shutdown" : "timeout"}}
                   .dump()
            << '\n';
  return 0;
}

inline void add_scr_options(CLI::App& app, ScrOptions& o) {
  app.add_option("--host", o.host, "race server host")->capture_default_str();
  app.add_option("--port", o.port, "race server port")->capture_default_str();
  app.add_option("--checkpoint", o.checkpoint, "agent checkpoint")->required();
  app.add_option("--timeout-ms", o.timeout_ms, "receive timeout per datagram")->capture_default_str();
  app.add_option("--retries", o.retries, "handshake attempts and consecutive timeouts allowed")
      ->capture_default_str();
  app.add_option("--client-id", o.client_id, "identification prefix")->capture_default_str();
}

}  // namespace lanekeep::cli
