#pragma once

// The three learners behind the common Agent interface, plus the agent
// checkpoint format:
//
//   lanekeep-agent 1
//   algorithm <qlearn|dqn|ddac>
//   header <one-line JSON: encoder, action set, hyperparameters, tiling>
//   network <role>            (dqn: online; ddac: actor, critic)
//   <mlp checkpoint block>
//   entries <n>               (qlearn only)
//   <key> <value>             n lines, key = tile * action_count + action

#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <string>

#include "lanekeep/action_set.hpp"
#include "lanekeep/agent.hpp"
#include "lanekeep/config_json.hpp"
#include "lanekeep/ddac.hpp"
#include "lanekeep/dqn.hpp"
#include "lanekeep/nn_io.hpp"
#include "lanekeep/qlearning.hpp"

namespace lanekeep {

struct AgentSettings {
  Algorithm algorithm = Algorithm::ddac;
  ObservationEncoder encoder;
  DiscreteActionSet actions;
  QLearningConfig qlearn;
  DqnConfig dqn;
  DdacConfig ddac;
};

inline void to_json(json& j, const AgentSettings& s) {
  j = json{{"algorithm", to_string(s.algorithm)},
           {"encoder", s.encoder},
           {"actions", s.actions},
           {"qlearn", s.qlearn},
           {"dqn", s.dqn},
           {"ddac", s.ddac}};
}

inline void from_json(const json& j, AgentSettings& s) {
  if (auto it = j.find("algorithm"); it != j.end()) s.algorithm = parse_algorithm(it->get<std::string>());
  detail::read_opt(j, "encoder", s.encoder);
  detail::read_opt(j, "actions", s.actions);
  detail::read_opt(j, "qlearn", s.qlearn);
  detail::read_opt(j, "dqn", s.dqn);
  detail::read_opt(j, "ddac", s.ddac);
}

inline constexpr std::string_view kAgentMagic = "lanekeep-agent";
inline constexpr int kAgentFormatVersion = 1;

namespace detail {
inline void write_agent_preamble(std::ostream& os, Algorithm algo, const json& header) {
  os << kAgentMagic << ' ' << kAgentFormatVersion << '\n';
  os << "algorithm " << to_string(algo) << '\n';
  os << "header " << header.dump() << '\n';
}
// The two-feature encoding has no angle, so its tiling resolution is dropped.
inline std::vector<std::size_t> tiles_for(const ObservationEncoder& enc, std::vector<std::size_t> tiles) {
  if (enc.dim() == 2 && tiles.size() == 3) tiles.erase(tiles.begin() + 1);
  return tiles;
}
}  // namespace detail

class QLearningLaneAgent final : public Agent {
 public:
  QLearningLaneAgent(ObservationEncoder enc, DiscreteActionSet actions, QLearningConfig cfg,
                     std::uint64_t seed)
      : enc_(enc),
        actions_(std::move(actions)),
        core_(TileCoder(cfg.num_tilings, detail::tiles_for(enc_, cfg.tiles_per_dim),
                        default_state_bounds(enc_.dim())),
              actions_.size(), cfg, seed) {}

  Algorithm algorithm() const override { return Algorithm::qlearn; }
  const ObservationEncoder& encoder() const override { return enc_; }
  const DiscreteActionSet& actions() const { return actions_; }
  QLearningAgent& core() { return core_; }
  const QLearningAgent& core() const { return core_; }

  CarAction act(const Observation& obs, std::uint64_t step, bool explore) override {
    last_ = core_.select_action(enc_.encode(obs), explore ? core_.epsilon(step) : 0.0);
    return actions_.decode(last_);
  }

  std::optional<double> learn(const Observation& obs, double reward, const Observation& next,
                              bool done) override {
    const double delta = core_.update(enc_.encode(obs), last_, reward, enc_.encode(next), done);
    return delta * delta;
  }

  void save(std::ostream& os) const override {
    json header{{"encoder", enc_}, {"actions", actions_}, {"hyperparameters", core_.config()}};
    detail::write_agent_preamble(os, algorithm(), header);
    const auto entries = core_.table().sorted_entries();
    os << "entries " << entries.size() << '\n';
    for (const auto& [k, v] : entries) os << k << ' ' << nn::format_double(v) << '\n';
  }

 private:
  ObservationEncoder enc_;
  DiscreteActionSet actions_;
  QLearningAgent core_;
  std::size_t last_ = 0;
};

class DqnLaneAgent final : public Agent {
 public:
  DqnLaneAgent(ObservationEncoder enc, DiscreteActionSet actions, DqnConfig cfg, std::uint64_t seed)
      : enc_(enc), actions_(std::move(actions)), core_(enc_.dim(), actions_.size(), cfg, seed) {}

  DqnLaneAgent(ObservationEncoder enc, DiscreteActionSet actions, nn::MlpParams online,
               DqnConfig cfg, std::uint64_t seed)
      : enc_(enc), actions_(std::move(actions)), core_(std::move(online), cfg, seed) {
    if (core_.online().input_dim() != enc_.dim() || core_.action_count() != actions_.size())
      throw ShapeError("network shape does not match encoder and action set");
  }

  Algorithm algorithm() const override { return Algorithm::dqn; }
  const ObservationEncoder& encoder() const override { return enc_; }
  const DiscreteActionSet& actions() const { return actions_; }
  DqnAgent& core() { return core_; }
  const DqnAgent& core() const { return core_; }

  CarAction act(const Observation& obs, std::uint64_t step, bool explore) override {
    const auto s = enc_.encode(obs);
    last_ = explore ? core_.select_action(s, step) : core_.greedy_action(s);
    return actions_.decode(last_);
  }

  std::optional<double> learn(const Observation& obs, double reward, const Observation& next,
                              bool done) override {
    core_.remember({enc_.encode(obs), last_, reward, enc_.encode(next), done});
    return core_.train_step();
  }

  void save(std::ostream& os) const override {
    json header{{"encoder", enc_}, {"actions", actions_}, {"hyperparameters", core_.config()}};
    detail::write_agent_preamble(os, algorithm(), header);
    os << "network online\n";
    nn::save_mlp(os, core_.online());
  }

 private:
  ObservationEncoder enc_;
  DiscreteActionSet actions_;
  DqnAgent core_;
  std::size_t last_ = 0;
};

class DdacLaneAgent final : public Agent {
 public:
  DdacLaneAgent(ObservationEncoder enc, DdacConfig cfg, std::uint64_t seed)
      : enc_(enc), core_(enc_.dim(), cfg, seed) {}

  DdacLaneAgent(ObservationEncoder enc, nn::MlpParams actor, nn::MlpParams critic, DdacConfig cfg,
                std::uint64_t seed)
      : enc_(enc),
        core_(std::move(actor), std::move(critic), {kCarActionSquash.begin(), kCarActionSquash.end()},
              cfg, seed) {
    if (core_.actor().input_dim() != enc_.dim()) throw ShapeError("actor input does not match encoder");
  }

  Algorithm algorithm() const override { return Algorithm::ddac; }
  const ObservationEncoder& encoder() const override { return enc_; }
  DdacAgent& core() { return core_; }
  const DdacAgent& core() const { return core_; }

  CarAction act(const Observation& obs, std::uint64_t step, bool explore) override {
    const CarAction a = core_.select_action(enc_.encode(obs), step, explore);
    last_ = {a.steer, a.accel, a.brake};
    return a;
  }

  std::optional<double> learn(const Observation& obs, double reward, const Observation& next,
                              bool done) override {
    core_.remember({enc_.encode(obs), last_, reward, enc_.encode(next), done});
    if (auto losses = core_.train_step()) return losses->critic_loss;
    return std::nullopt;
  }

  void save(std::ostream& os) const override {
    json header{{"encoder", enc_}, {"hyperparameters", core_.config()}};
    detail::write_agent_preamble(os, algorithm(), header);
    os << "network actor\n";
    nn::save_mlp(os, core_.actor());
    os << "network critic\n";
    nn::save_mlp(os, core_.critic());
  }

 private:
  ObservationEncoder enc_;
  DdacAgent core_;
  std::vector<double> last_{0.0, 0.0, 0.0};
};

inline std::unique_ptr<Agent> make_agent(const AgentSettings& s, std::uint64_t seed) {
  switch (s.algorithm) {
    case Algorithm::qlearn:
      return std::make_unique<QLearningLaneAgent>(s.encoder, s.actions, s.qlearn, seed);
    case Algorithm::dqn: return std::make_unique<DqnLaneAgent>(s.encoder, s.actions, s.dqn, seed);
    case Algorithm::ddac: return std::make_unique<DdacLaneAgent>(s.encoder, s.ddac, seed);
  }
  throw std::invalid_argument("unknown algorithm");
}

inline void save_agent_file(const std::string& path, const Agent& agent) {
  std::ofstream os(path);
  if (!os) throw CheckpointError("cannot open " + path + " for writing");
  agent.save(os);
  if (!os) throw CheckpointError("failed writing " + path);
}

namespace detail {
inline std::string read_keyword_line(std::istream& is, std::string_view keyword) {
  std::string line;
  while (std::getline(is, line) && line.empty()) {
  }
  if (line.rfind(std::string(keyword) + ' ', 0) != 0)
    throw CheckpointError("expected '" + std::string(keyword) + "' line, got '" + line + "'");
  return line.substr(keyword.size() + 1);
}
}  // namespace detail

inline std::unique_ptr<Agent> load_agent(std::istream& is, std::uint64_t seed = 0) {
  const std::string magic = detail::read_keyword_line(is, kAgentMagic);
  if (magic != std::to_string(kAgentFormatVersion)) throw CheckpointError("unsupported agent checkpoint version");
  const Algorithm algo = parse_algorithm(detail::read_keyword_line(is, "algorithm"));
  json header;
  try {
    header = json::parse(detail::read_keyword_line(is, "header"));
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("bad checkpoint header: ") + e.what());
  }
  const auto enc = header.value("encoder", json::object()).get<ObservationEncoder>();
  switch (algo) {
    case Algorithm::qlearn: {
      auto agent = std::make_unique<QLearningLaneAgent>(
          enc, header.value("actions", json::object()).get<DiscreteActionSet>(),
          header.value("hyperparameters", json::object()).get<QLearningConfig>(), seed);
      const std::string n_text = detail::read_keyword_line(is, "entries");
      const std::size_t n = std::stoull(n_text);
      for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t key = 0;
        std::string value;
        if (!(is >> key >> value)) throw CheckpointError("truncated q-table");
        agent->core().table().set_raw(key, nn::parse_double(value));
      }
      return agent;
    }
    case Algorithm::dqn: {
      if (detail::read_keyword_line(is, "network") != "online") throw CheckpointError("expected online network");
      auto online = nn::load_mlp(is);
      return std::make_unique<DqnLaneAgent>(
          enc, header.value("actions", json::object()).get<DiscreteActionSet>(), std::move(online),
          header.value("hyperparameters", json::object()).get<DqnConfig>(), seed);
    }
    case Algorithm::ddac: {
      if (detail::read_keyword_line(is, "network") != "actor") throw CheckpointError("expected actor network");
      auto actor = nn::load_mlp(is);
      if (detail::read_keyword_line(is, "network") != "critic") throw CheckpointError("expected critic network");
      auto critic = nn::load_mlp(is);
      return std::make_unique<DdacLaneAgent>(enc, std::move(actor), std::move(critic),
                                             header.value("hyperparameters", json::object()).get<DdacConfig>(),
                                             seed);
    }
  }
  throw CheckpointError("unknown algorithm");
}

inline std::unique_ptr<Agent> load_agent_file(const std::string& path, std::uint64_t seed = 0) {
  std::ifstream is(path);
  if (!is) throw CheckpointError("cannot open " + path);
  return load_agent(is, seed);
}

}  // namespace lanekeep
