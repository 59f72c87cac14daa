#pragma once

// Seeded training runs, evaluation rollouts and the reports built on them.
//
// Output files (all under ExperimentConfig::output_dir):
//   episodes_<label>_<term>_<seed>.csv   one row per finished episode
//   convergence.csv                      one row per (label, term, seed)
//   timing.csv                           wall-clock seconds per run
//   config_<label>_<term>.json           the configuration, verbatim
//   agent_<label>_<term>_<seed>.ckpt     final agent checkpoint

#include <algorithm>
#include <array>
#include <span>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lanekeep/config_json.hpp"
#include "lanekeep/errors.hpp"
#include "lanekeep/lane_agents.hpp"
#include "lanekeep/simulator.hpp"
#include "lanekeep/track.hpp"

namespace lanekeep {

struct ExperimentConfig {
  AgentSettings agent;
  TerminationCondition termination = TerminationCondition::both;
  std::string track_path;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::size_t max_episodes = 3000;
  std::uint64_t max_steps_per_episode = 20'000;
  std::uint32_t convergence_laps = 10;
  DynamicsConfig dynamics;
  RewardConfig reward;
  // Thresholds for stuck/horizontal; the enabled flags come from `termination`.
  TerminationPolicy termination_thresholds;
  std::string output_dir;
  // Run label used in file names; defaults to the algorithm name.
  std::string label;

  std::string run_label() const { return label.empty() ? std::string(to_string(agent.algorithm)) : label; }

  TerminationPolicy termination_policy() const {
    TerminationPolicy p = termination_thresholds;
    const auto flags = TerminationPolicy::for_condition(termination);
    p.out_of_track_enabled = flags.out_of_track_enabled;
    p.stuck_enabled = flags.stuck_enabled;
    return p;
  }
};

inline void to_json(json& j, const ExperimentConfig& c) {
  j = json{{"agent", c.agent},
           {"termination", to_string(c.termination)},
           {"track", c.track_path},
           {"seeds", c.seeds},
           {"max_episodes", c.max_episodes},
           {"max_steps_per_episode", c.max_steps_per_episode},
           {"convergence_laps", c.convergence_laps},
           {"dynamics", c.dynamics},
           {"reward", c.reward},
           {"termination_thresholds", c.termination_thresholds},
           {"label", c.run_label()}};
}

inline void from_json(const json& j, ExperimentConfig& c) {
  detail::read_opt(j, "agent", c.agent);
  if (auto it = j.find("termination"); it != j.end())
    c.termination = parse_termination_condition(it->get<std::string>());
  detail::read_opt(j, "track", c.track_path);
  detail::read_opt(j, "seeds", c.seeds);
  detail::read_opt(j, "max_episodes", c.max_episodes);
  detail::read_opt(j, "max_steps_per_episode", c.max_steps_per_episode);
  detail::read_opt(j, "convergence_laps", c.convergence_laps);
  detail::read_opt(j, "dynamics", c.dynamics);
  detail::read_opt(j, "reward", c.reward);
  detail::read_opt(j, "termination_thresholds", c.termination_thresholds);
  detail::read_opt(j, "label", c.label);
}

struct EpisodeLog {
  std::size_t episode = 0;
  std::uint64_t steps = 0;
  double total_reward = 0.0;
  std::uint32_t laps_completed = 0;
  TerminationReason termination = TerminationReason::none;
  double mean_dsteer = 0.0;
};

struct ConvergenceRecord {
  std::uint64_t seed = 0;
  bool converged = false;
  std::optional<std::size_t> convergence_episode;
  double wall_time = 0.0;  // s
  std::size_t episodes_run = 0;
  bool failed = false;
  std::string failure;
};

struct SeedRun {
  std::uint64_t seed = 0;
  std::vector<EpisodeLog> episodes;
  ConvergenceRecord record;
  std::unique_ptr<Agent> agent;
};

inline constexpr std::string_view kEpisodeCsvHeader = "episode,steps,reward,laps,termination,mean_dsteer";

inline std::string episode_csv_row(const EpisodeLog& e) {
  std::ostringstream os;
  os << e.episode << ',' << e.steps << ',' << nn::format_double(e.total_reward) << ','
     << e.laps_completed << ',' << to_string(e.termination) << ',' << nn::format_double(e.mean_dsteer);
  return os.str();
}

// Smallest episode index whose lap count reaches the requirement.
inline std::optional<std::size_t> convergence_episode(std::span<const std::uint32_t> laps,
                                                      std::uint32_t laps_required) {
  for (std::size_t i = 0; i < laps.size(); ++i)
    if (laps[i] >= laps_required) return i;
  return std::nullopt;
}

inline std::optional<std::size_t> convergence_episode(std::span<const EpisodeLog> logs,
                                                      std::uint32_t laps_required) {
  for (const auto& e : logs)
    if (e.laps_completed >= laps_required) return e.episode;
  return std::nullopt;
}

// Mean |steer_t - steer_{t-1}|.
inline double smoothness_metric(std::span<const double> steer) {
  if (steer.size() < 2) throw MetricError("smoothness needs at least two steering samples");
  double sum = 0.0;
  for (std::size_t i = 1; i < steer.size(); ++i) sum += std::abs(steer[i] - steer[i - 1]);
  return sum / static_cast<double>(steer.size() - 1);
}

struct RolloutTrace {
  std::vector<double> steer;
  std::vector<bool> curved;  // car was on an arc when the action was taken
  std::vector<Pose> path;
  std::uint64_t steps = 0;
  std::uint32_t laps = 0;
  double total_reward = 0.0;
  TerminationReason termination = TerminationReason::none;
};

// Mean |delta steer| restricted to consecutive steps that were both taken on
// curved segments.
inline double curved_smoothness(const RolloutTrace& trace) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 1; i < trace.steer.size(); ++i) {
    if (!trace.curved[i] || !trace.curved[i - 1]) continue;
    sum += std::abs(trace.steer[i] - trace.steer[i - 1]);
    ++n;
  }
  if (n == 0) throw MetricError("rollout never spent two consecutive steps on a curve");
  return sum / static_cast<double>(n);
}

// Greedy rollout until `laps` laps, termination or the step cap.
inline RolloutTrace evaluate_rollout(Agent& agent, const Track& track, const DynamicsConfig& dyn,
                                     const TerminationPolicy& term, std::uint32_t laps,
                                     std::uint64_t max_steps, bool record_path = false) {
  Environment env(track, dyn, term);
  Observation obs = env.reset();
  agent.begin_episode();
  RolloutTrace trace;
  while (trace.steps < max_steps) {
    const bool curved = track.is_curved_at(env.state().s);
    const CarAction a = agent.act(obs, 0, false);
    const StepResult r = env.step(a);
    trace.steer.push_back(a.steer);
    trace.curved.push_back(curved);
    if (record_path) {
      const auto& st = env.state();
      trace.path.push_back(track.world_pose(st.s, st.lateral, st.heading_err));
    }
    ++trace.steps;
    trace.total_reward += r.reward;
    trace.laps = env.state().laps_completed;
    obs = r.observation;
    if (r.terminated) {
      trace.termination = r.termination_reason;
      break;
    }
    if (trace.laps >= laps) break;
  }
  return trace;
}

using AgentFactory = std::function<std::unique_ptr<Agent>(std::uint64_t seed)>;
using EpisodeCallback = std::function<void(std::uint64_t seed, const EpisodeLog&)>;

inline std::string episodes_file_name(const ExperimentConfig& cfg, std::uint64_t seed) {
  return "episodes_" + cfg.run_label() + "_" + std::string(to_string(cfg.termination)) + "_" +
         std::to_string(seed) + ".csv";
}

// Trains one fresh agent until it converges or the episode budget runs out.
inline SeedRun run_seed(const ExperimentConfig& cfg, const Track& track, std::uint64_t seed,
                        const AgentFactory& factory = {}, const EpisodeCallback& on_episode = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  SeedRun run;
  run.seed = seed;
  run.record.seed = seed;
  run.agent = factory ? factory(seed) : make_agent(cfg.agent, seed);

  std::ofstream csv;
  if (!cfg.output_dir.empty()) {
    std::filesystem::create_directories(cfg.output_dir);
    csv.open(std::filesystem::path(cfg.output_dir) / episodes_file_name(cfg, seed), std::ios::trunc);
    if (!csv) throw std::runtime_error("cannot write episode log in " + cfg.output_dir);
    csv << kEpisodeCsvHeader << '\n' << std::flush;
  }

  Environment env(track, cfg.dynamics, cfg.termination_policy(), cfg.reward);
  std::uint64_t global_step = 0;
  try {
    for (std::size_t ep = 0; ep < cfg.max_episodes; ++ep) {
      run.agent->begin_episode();
      Observation obs = env.reset(seed);
      EpisodeLog log;
      log.episode = ep;
      double prev_steer = 0.0;
      double dsteer_sum = 0.0;
      while (log.steps < cfg.max_steps_per_episode) {
        const CarAction a = run.agent->act(obs, global_step, true);
        const StepResult r = env.step(a);
        run.agent->learn(obs, r.reward, r.observation, r.terminated);
        if (log.steps > 0) dsteer_sum += std::abs(a.steer - prev_steer);
        prev_steer = a.steer;
        ++log.steps;
        ++global_step;
        log.total_reward += r.reward;
        log.laps_completed = env.state().laps_completed;
        obs = r.observation;
        if (r.terminated) {
          log.termination = r.termination_reason;
          break;
        }
        if (log.laps_completed >= cfg.convergence_laps) break;
      }
      log.mean_dsteer = log.steps > 1 ? dsteer_sum / static_cast<double>(log.steps - 1) : 0.0;
      run.episodes.push_back(log);
      if (csv.is_open()) csv << episode_csv_row(log) << '\n' << std::flush;
      if (on_episode) on_episode(seed, log);
      if (log.laps_completed >= cfg.convergence_laps) {
        run.record.converged = true;
        run.record.convergence_episode = ep;
        break;
      }
    }
  } catch (const TrainingDivergence& e) {
    run.record.failed = true;
    run.record.failure = e.what();
  }
  run.record.episodes_run = run.episodes.size();
  run.record.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return run;
}

namespace detail {

inline std::vector<std::vector<std::string>> read_csv_rows(const std::filesystem::path& p,
                                                           std::string* header = nullptr) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream is(p);
  if (!is) return rows;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (header) *header = line;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

// Replaces rows whose first two cells match (label, term), keeps the rest.
inline void upsert_csv(const std::filesystem::path& p, std::string_view header,
                       const std::string& label, const std::string& term,
                       const std::vector<std::string>& new_rows) {
  std::vector<std::string> kept;
  for (const auto& cells : read_csv_rows(p)) {
    if (cells.size() >= 2 && cells[0] == label && cells[1] == term) continue;
    std::string joined;
    for (std::size_t i = 0; i < cells.size(); ++i) joined += (i ? "," : "") + cells[i];
    kept.push_back(joined);
  }
  kept.insert(kept.end(), new_rows.begin(), new_rows.end());
  std::sort(kept.begin(), kept.end());
  std::ofstream os(p, std::ios::trunc);
  os << header << '\n';
  for (const auto& r : kept) os << r << '\n';
}

}  // namespace detail

inline constexpr std::string_view kConvergenceCsvHeader =
    "label,termination,seed,converged,convergence_episode,episodes_run,max_episodes,status";

struct ExperimentResult {
  std::vector<SeedRun> runs;

  std::vector<ConvergenceRecord> records() const {
    std::vector<ConvergenceRecord> r;
    for (const auto& run : runs) r.push_back(run.record);
    return r;
  }
};

inline void write_run_outputs(const ExperimentConfig& cfg, const ExperimentResult& result) {
  namespace fs = std::filesystem;
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  const std::string label = cfg.run_label();
  const std::string term(to_string(cfg.termination));
  {
    std::ofstream os(dir / ("config_" + label + "_" + term + ".json"), std::ios::trunc);
    os << json(cfg).dump(2) << '\n';
  }
  std::vector<std::string> conv_rows, time_rows;
  for (const auto& run : result.runs) {
    const auto& r = run.record;
    std::ostringstream row;
    row << label << ',' << term << ',' << r.seed << ',' << (r.converged ? 1 : 0) << ','
        << (r.convergence_episode ? std::to_string(*r.convergence_episode) : "") << ','
        << r.episodes_run << ',' << cfg.max_episodes << ',' << (r.failed ? "failed" : "ok");
    conv_rows.push_back(row.str());
    std::ostringstream trow;
    trow << label << ',' << term << ',' << r.seed << ',' << r.wall_time;
    time_rows.push_back(trow.str());
    if (run.agent) {
      save_agent_file((dir / ("agent_" + label + "_" + term + "_" + std::to_string(r.seed) + ".ckpt")).string(),
                      *run.agent);
    }
  }
  detail::upsert_csv(dir / "convergence.csv", kConvergenceCsvHeader, label, term, conv_rows);
  detail::upsert_csv(dir / "timing.csv", "label,termination,seed,wall_time_s", label, term, time_rows);
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg, const AgentFactory& factory = {},
                                       const EpisodeCallback& on_episode = {}) {
  if (cfg.seeds.empty()) throw std::invalid_argument("experiment needs at least one seed");
  if (cfg.convergence_laps < 1) throw std::invalid_argument("convergence_laps must be at least 1");
  const Track track = load_track(cfg.track_path);
  ExperimentResult result;
  for (auto seed : cfg.seeds) result.runs.push_back(run_seed(cfg, track, seed, factory, on_episode));
  if (!cfg.output_dir.empty()) write_run_outputs(cfg, result);
  return result;
}

// ---- termination-ordering report ------------------------------------------

inline constexpr std::array<TerminationCondition, 4> kExpectedOrder{
    TerminationCondition::none, TerminationCondition::stuck, TerminationCondition::out,
    TerminationCondition::both};

struct ConditionSummary {
  std::size_t seeds = 0;
  std::size_t converged = 0;
  // Non-converged seeds count as max_episodes.
  double median_episode = 0.0;
  bool censored = false;  // no seed converged
};

struct OrderingReport {
  std::map<TerminationCondition, ConditionSummary> conditions;
  std::size_t max_episodes = 0;
  bool ordering_holds = false;
  bool inconclusive = false;
  std::vector<std::string> violations;  // e.g. "none>stuck"
};

inline double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of an empty set");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline ConditionSummary summarize_condition(std::span<const ConvergenceRecord> records,
                                            std::size_t max_episodes) {
  ConditionSummary s;
  std::vector<double> eps;
  for (const auto& r : records) {
    ++s.seeds;
    if (r.converged && r.convergence_episode) {
      ++s.converged;
      eps.push_back(static_cast<double>(*r.convergence_episode));
    } else {
      eps.push_back(static_cast<double>(max_episodes));
    }
  }
  s.median_episode = eps.empty() ? static_cast<double>(max_episodes) : median(eps);
  s.censored = s.converged == 0;
  return s;
}

inline OrderingReport compare_terminations(
    const std::map<TerminationCondition, std::vector<ConvergenceRecord>>& by_condition,
    std::size_t max_episodes) {
  OrderingReport rep;
  rep.max_episodes = max_episodes;
  for (auto c : kExpectedOrder) {
    auto it = by_condition.find(c);
    if (it == by_condition.end() || it->second.empty()) {
      rep.inconclusive = true;
      rep.conditions[c] = ConditionSummary{0, 0, static_cast<double>(max_episodes), true};
      continue;
    }
    rep.conditions[c] = summarize_condition(it->second, max_episodes);
    if (rep.conditions[c].converged == 0) rep.inconclusive = true;
  }
  rep.ordering_holds = true;
  for (std::size_t i = 0; i + 1 < kExpectedOrder.size(); ++i) {
    const auto a = kExpectedOrder[i];
    const auto b = kExpectedOrder[i + 1];
    if (rep.conditions[a].median_episode > rep.conditions[b].median_episode) {
      rep.ordering_holds = false;
      rep.violations.push_back(std::string(to_string(a)) + ">" + std::string(to_string(b)));
    }
  }
  return rep;
}

inline json ordering_report_json(const OrderingReport& rep, const std::string& label) {
  json conds = json::object();
  for (const auto& [c, s] : rep.conditions) {
    conds[std::string(to_string(c))] = {
        {"seeds", s.seeds},
        {"converged", s.converged},
        {"median_convergence_episode", s.median_episode},
        {"display", s.censored ? ">" + std::to_string(rep.max_episodes) : nn::format_double(s.median_episode)}};
  }
  return json{{"label", label},
              {"expected_order", {"none", "stuck", "out", "both"}},
              {"max_episodes", rep.max_episodes},
              {"conditions", conds},
              {"ordering_holds", rep.ordering_holds},
              {"inconclusive", rep.inconclusive},
              {"violations", rep.violations}};
}

// Convergence-episode difference (without replay minus with replay) per seed.
struct ReplayAblation {
  std::vector<std::uint64_t> seeds;
  std::vector<double> with_replay;
  std::vector<double> without_replay;
  double median_with = 0.0;
  double median_without = 0.0;
  double median_delta = 0.0;  // negative: dropping replay converged sooner
};

inline ReplayAblation replay_ablation(std::span<const ConvergenceRecord> with_replay,
                                      std::span<const ConvergenceRecord> without_replay,
                                      std::size_t max_episodes) {
  ReplayAblation out;
  auto censored = [&](const ConvergenceRecord& r) {
    return r.converged && r.convergence_episode ? static_cast<double>(*r.convergence_episode)
                                                : static_cast<double>(max_episodes);
  };
  for (const auto& w : with_replay) {
    for (const auto& wo : without_replay) {
      if (wo.seed != w.seed) continue;
      out.seeds.push_back(w.seed);
      out.with_replay.push_back(censored(w));
      out.without_replay.push_back(censored(wo));
    }
  }
  if (out.seeds.empty()) throw std::invalid_argument("no seed was run both with and without replay");
  out.median_with = median(out.with_replay);
  out.median_without = median(out.without_replay);
  out.median_delta = out.median_without - out.median_with;
  return out;
}

inline json replay_ablation_json(const ReplayAblation& a) {
  return json{{"seeds", a.seeds},
              {"with_replay", a.with_replay},
              {"without_replay", a.without_replay},
              {"median_with_replay", a.median_with},
              {"median_without_replay", a.median_without},
              {"median_delta", a.median_delta},
              {"faster", a.median_delta < 0 ? "without_replay"
                                            : (a.median_delta > 0 ? "with_replay" : "tie")}};
}

// Reads convergence.csv from `dir`; returns records grouped by label and
// condition together with the largest max_episodes seen.
struct ConvergenceTable {
  std::map<std::string, std::map<TerminationCondition, std::vector<ConvergenceRecord>>> by_label;
  std::size_t max_episodes = 0;
};

inline ConvergenceTable read_convergence_csv(const std::filesystem::path& dir) {
  ConvergenceTable t;
  const auto path = dir / "convergence.csv";
  if (!std::filesystem::exists(path)) throw std::runtime_error("missing " + path.string());
  for (const auto& cells : detail::read_csv_rows(path)) {
    if (cells.size() < 7) throw std::runtime_error("malformed row in " + path.string());
    ConvergenceRecord r;
    r.seed = std::stoull(cells[2]);
    r.converged = cells[3] == "1";
    if (!cells[4].empty()) r.convergence_episode = std::stoull(cells[4]);
    r.episodes_run = std::stoull(cells[5]);
    t.max_episodes = std::max<std::size_t>(t.max_episodes, std::stoull(cells[6]));
    r.failed = cells.size() > 7 && cells[7] == "failed";
    t.by_label[cells[0]][parse_termination_condition(cells[1])].push_back(r);
  }
  return t;
}

}  // namespace lanekeep
