#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "lanekeep/lanekeep.hpp"
#include "mdp_training.hpp"
#include "oracles.hpp"

using namespace lanekeep;

// ---- tile coding -----------------------------------------------------------

TEST(TileCoder, SingleTilingIndex) {
  TileCoder c(1, {4}, {{0.0, 1.0}});
  const auto ids = tile_encode(c, std::vector<double>{0.3});
  ASSERT_EQ(ids.size(), 1u);
  EXPECT_EQ(ids[0], 1u);
  EXPECT_EQ(tile_encode(c, std::vector<double>{0.3}), ids);
}

TEST(TileCoder, TwoOffsetTilings) {
  TileCoder c(2, {4}, {{0.0, 1.0}});
  const std::size_t per = c.cells_per_tiling();
  EXPECT_EQ(c.cell(1, 0, 0.26), 1u);
  EXPECT_EQ(c.cell(0, 0, 0.26), 1u);
  EXPECT_EQ(c.cell(0, 0, 0.24), 0u);
  EXPECT_EQ(c.cell(1, 0, 0.24), 1u);
  const auto a = c.encode(std::vector<double>{0.26});
  const auto b = c.encode(std::vector<double>{0.24});
  EXPECT_EQ(a, (std::vector<std::size_t>{1, per + 1}));
  EXPECT_EQ(b, (std::vector<std::size_t>{0, per + 1}));
}

TEST(TileCoder, CoverageAndLocality) {
  TileCoder c(8, {10}, {{-1.0, 1.0}});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double w = c.tile_width(0);
  for (int i = 0; i < 2000; ++i) {
    const double x = u(rng);
    const auto ids = c.encode(std::vector<double>{x});
    ASSERT_EQ(ids.size(), 8u);
    ASSERT_EQ(std::set<std::size_t>(ids.begin(), ids.end()).size(), 8u);
    for (std::size_t t = 0; t < 8; ++t) {
      ASSERT_GE(ids[t], t * c.cells_per_tiling());
      ASSERT_LT(ids[t], (t + 1) * c.cells_per_tiling());
    }
    const double y = std::clamp(x + 0.999 * w / 8.0, -1.0, 1.0);
    const auto near = c.encode(std::vector<double>{y});
    std::size_t shared = 0;
    for (std::size_t t = 0; t < 8; ++t) shared += ids[t] == near[t];
    ASSERT_GE(shared, 7u) << x << " vs " << y;
  }
}

TEST(TileCoder, MultiDimensionalAndClamping) {
  TileCoder c(4, {8, 8, 4}, default_state_bounds(3));
  const auto inside = c.encode(std::vector<double>{1.2, 1.6, 1.0});
  const auto outside = c.encode(std::vector<double>{50.0, 9.0, 3.0});
  EXPECT_EQ(inside, outside);
  for (std::size_t t = 0; t < 4; ++t) EXPECT_LT(outside[t], c.total_tiles());
  EXPECT_THROW(c.encode(std::vector<double>{0.0, 0.0}), ShapeError);
  EXPECT_THROW(TileCoder(0, {4}, {{0, 1}}), std::invalid_argument);
  EXPECT_THROW(TileCoder(2, {4, 4}, {{0, 1}}), ShapeError);
}

// ---- tabular Q-learning ----------------------------------------------------

TEST(QUpdate, SingleStep) {
  QTable t(2, 0.5, 0.0);
  const std::vector<std::size_t> s{3}, sn{4};
  const double delta = q_update(t, s, 1, 1.0, sn, false);
  EXPECT_EQ(delta, 1.0);
  EXPECT_EQ(t.value(s, 1), 0.5);
  EXPECT_EQ(t.value(s, 0), 0.0);
}

TEST(QUpdate, ZeroTdErrorLeavesTableUnchanged) {
  QTable t(2, 0.5, 0.9);
  const std::vector<std::size_t> s{0, 7}, sn{1, 8};
  t.set_entry(0, 0, 1.0);
  t.set_entry(7, 0, 1.0);  // Q(s,0) = 1
  const QTable before = t;
  EXPECT_EQ(q_update(t, s, 0, 1.0, sn, true), 0.0);
  EXPECT_TRUE(t == before);
  EXPECT_EQ(t.stored_entries(), before.stored_entries());
}

TEST(QUpdate, SpreadsStepOverActiveTiles) {
  QTable t(1, 0.4, 0.0);
  const std::vector<std::size_t> s{0, 5, 9, 12};
  q_update(t, s, 0, 2.0, s, true);
  for (auto id : s) EXPECT_DOUBLE_EQ(t.entry(id, 0), 0.1 * 2.0);
  EXPECT_DOUBLE_EQ(t.value(s, 0), 0.2);
}

TEST(QUpdate, TwoStateChainReachesValueIteration) {
  // 0 -a0-> 0 (r 0), 0 -a1-> 1 (r 1), 1 -a0-> 0 (r 0), 1 -a1-> 1 (r 0.5)
  oracle::Mdp m;
  m.states = 2;
  m.actions = 2;
  m.next = {{0, 1}, {0, 1}};
  m.reward = {{0.0, 1.0}, {0.0, 0.5}};
  m.terminal = {{false, false}, {false, false}};
  const auto vi = oracle::value_iteration(m, 0.9);
  const auto q = mdp::tabular_q(m, 0.9);
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t a = 0; a < 2; ++a) EXPECT_NEAR(q[s][a], vi[s][a], 1e-3);
}

TEST(QUpdate, RandomMdpsMatchValueIteration) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 5; ++i) {
    const auto m = oracle::random_mdp(rng);
    const auto vi = oracle::value_iteration(m, 0.9);
    const auto q = mdp::tabular_q(m, 0.9);
    for (std::size_t s = 0; s < m.states; ++s) {
      for (std::size_t a = 0; a < m.actions; ++a) ASSERT_NEAR(q[s][a], vi[s][a], 1e-3);
      EXPECT_EQ(oracle::greedy(q[s]), oracle::greedy(vi[s]));
    }
  }
}

TEST(QLearningAgent, EpsilonScheduleAndGreedy) {
  QLearningConfig cfg;
  QLearningAgent agent(TileCoder(cfg.num_tilings, cfg.tiles_per_dim, default_state_bounds(3)), 15, cfg, 1);
  EXPECT_EQ(agent.epsilon(0), 1.0);
  EXPECT_NEAR(agent.epsilon(25'000), 0.525, 1e-12);
  EXPECT_EQ(agent.epsilon(50'000), 0.05);
  EXPECT_EQ(agent.epsilon(1'000'000), 0.05);
  const std::vector<double> s{0.1, 0.0, 0.5};
  EXPECT_EQ(agent.greedy_action(s), 0u);
  agent.update(s, 7, 5.0, s, true);
  EXPECT_EQ(agent.greedy_action(s), 7u);
  EXPECT_EQ(agent.select_action(s, 0.0), 7u);
}

// ---- DQN ---------------------------------------------------------------------

namespace {

nn::MlpParams constant_head(std::vector<double> outputs, std::size_t in = 2) {
  nn::Layer l;
  l.in = in;
  l.out = outputs.size();
  l.weights.assign(l.in * l.out, 0.0);
  l.bias = std::move(outputs);
  return nn::MlpParams({l});
}

}  // namespace

TEST(DqnTarget, Examples) {
  const auto net = constant_head({0.5, 2.0, 1.0});
  const std::vector<double> s{0.0, 0.0};
  EXPECT_NEAR(compute_dqn_target(1.0, s, false, 0.9, net), 2.8, 1e-15);
  EXPECT_EQ(compute_dqn_target(1.0, s, true, 0.9, net), 1.0);
  EXPECT_EQ(compute_dqn_target(-3.0, s, false, 0.0, net), -3.0);
  EXPECT_EQ(compute_dqn_target(1.0, s, false, 0.9, net), compute_dqn_target(1.0, s, false, 0.9, net));
  auto bad = constant_head({0.5, NAN, 1.0});
  EXPECT_THROW(compute_dqn_target(1.0, s, false, 0.9, bad), TrainingDivergence);
}

TEST(DqnSelect, ArgmaxAndTies) {
  EXPECT_EQ(argmax_lowest(std::vector<double>{0.1, 0.9, 0.3}), 1u);
  EXPECT_EQ(argmax_lowest(std::vector<double>{0.4, 0.4, 0.4}), 0u);
  EXPECT_EQ(argmax_lowest(std::vector<double>{0.1, 0.4, 0.4}), 1u);
  DqnConfig cfg;
  cfg.use_target_net = false;
  DqnAgent agent(constant_head({0.1, 0.9, 0.3}), cfg, 1);
  EXPECT_EQ(agent.select_action_with_epsilon(std::vector<double>{0.0, 0.0}, 0.0), 1u);
  DqnAgent tied(constant_head({0.2, 0.2, 0.2}), cfg, 1);
  EXPECT_EQ(tied.select_action_with_epsilon(std::vector<double>{0.0, 0.0}, 0.0), 0u);
}

TEST(DqnSelect, UniformExplorationWithinThreeSigma) {
  DqnAgent agent(2, 15, DqnConfig{}, 5);
  const int draws = 10000;
  std::vector<int> counts(15, 0);
  for (int i = 0; i < draws; ++i) ++counts[agent.select_action_with_epsilon(std::vector<double>{0.1, 0.2}, 1.0)];
  const double p = 1.0 / 15.0;
  const double mean = draws * p;
  const double sigma = std::sqrt(draws * p * (1 - p));
  for (int c : counts) EXPECT_LE(std::abs(c - mean), 3 * sigma);
}

TEST(DqnSelect, EpsilonSchedule) {
  DqnAgent agent(2, 3, DqnConfig{}, 1);
  double prev = 2.0;
  for (std::uint64_t s = 0; s <= 60'000; s += 500) {
    EXPECT_LE(agent.epsilon(s), prev);
    prev = agent.epsilon(s);
  }
  EXPECT_EQ(agent.epsilon(0), 1.0);
  EXPECT_EQ(agent.epsilon(50'000), 0.05);
}

TEST(DqnTrain, ZeroResidualLeavesNetworkUnchanged) {
  DqnAgent agent(2, 3, DqnConfig{}, 9);
  const std::vector<double> s{0.3, -0.2};
  const double q1 = agent.q_values(s)[1];
  DiscreteTransition t{s, 1, q1, {0.0, 0.0}, true};
  const nn::MlpParams before = agent.online();
  const DiscreteTransition* batch[] = {&t, &t};
  EXPECT_EQ(agent.train_on(batch), 0.0);
  EXPECT_TRUE(agent.online() == before);
}

TEST(DqnTrain, ScalarQuadraticDescent) {
  nn::Layer l{1, 1, {0.2}, {0.0}, nn::Activation::linear};
  DqnConfig cfg;
  cfg.sgd = {1e-3, 0.0, std::nullopt};
  cfg.use_target_net = false;
  cfg.use_replay = false;
  DqnAgent agent(nn::MlpParams({l}), cfg, 1);
  agent.remember({{1.0}, 0, 1.0, {0.0}, true});
  const double pre = *agent.train_step();
  EXPECT_NEAR(pre, 0.64, 1e-15);
  DiscreteTransition t{{1.0}, 0, 1.0, {0.0}, true};
  const DiscreteTransition* batch[] = {&t};
  EXPECT_LT(agent.evaluate_loss(batch), pre);
  // w and b each move by lr * 2 * 0.8.
  EXPECT_NEAR(agent.online().layers[0].weights[0], 0.2 + 1.6e-3, 1e-15);
}

TEST(DqnTrain, NotReadyUntilBatchAvailable) {
  DqnConfig cfg;
  cfg.batch_size = 4;
  DqnAgent agent(2, 3, cfg, 1);
  EXPECT_FALSE(agent.train_step().has_value());
  for (int i = 0; i < 3; ++i) agent.remember({{0.0, 0.0}, 0, 0.0, {0.0, 0.0}, false});
  EXPECT_FALSE(agent.train_step().has_value());
  agent.remember({{0.0, 0.0}, 0, 0.0, {0.0, 0.0}, false});
  EXPECT_TRUE(agent.train_step().has_value());

  cfg.use_replay = false;
  DqnAgent online_only(2, 3, cfg, 1);
  EXPECT_FALSE(online_only.train_step().has_value());
  online_only.remember({{0.0, 0.0}, 0, 1.0, {0.0, 0.0}, true});
  EXPECT_TRUE(online_only.train_step().has_value());
  EXPECT_EQ(online_only.buffer().size(), 0u);
}

TEST(DqnTrain, TargetNetworkSyncsOnSchedule) {
  DqnConfig cfg;
  cfg.target_sync_interval = 3;
  cfg.batch_size = 1;
  DqnAgent agent(2, 2, cfg, 4);
  DiscreteTransition t{{0.5, 0.5}, 0, 1.0, {0.1, 0.1}, false};
  const DiscreteTransition* batch[] = {&t};
  const nn::MlpParams initial = agent.online();
  agent.train_on(batch);
  agent.train_on(batch);
  EXPECT_TRUE(*agent.target() == initial);
  EXPECT_FALSE(agent.online() == initial);
  agent.train_on(batch);
  EXPECT_TRUE(*agent.target() == agent.online());
  cfg.use_target_net = false;
  DqnAgent no_target(2, 2, cfg, 4);
  EXPECT_EQ(no_target.target(), nullptr);
}

TEST(DqnTrain, FourStateChainMatchesOptimalPolicy) {
  // 0 - 1 - 2 - 3; action 0 moves left, 1 moves right. Entering 3 pays 1 and
  // ends the episode; moving left out of 0 pays 0.2 and ends it.
  oracle::Mdp m;
  m.states = 4;
  m.actions = 2;
  m.next = {{0, 1}, {0, 2}, {1, 3}, {2, 3}};
  m.reward = {{0.2, 0.0}, {0.0, 0.0}, {0.0, 1.0}, {0.0, 1.0}};
  m.terminal = {{true, false}, {false, false}, {false, true}, {false, true}};
  const auto vi = oracle::value_iteration(m, 0.9);
  const auto policy = mdp::dqn_greedy_policy(m, 0.9, 3);
  for (std::size_t s = 0; s < 4; ++s) EXPECT_EQ(policy[s], oracle::greedy(vi[s])) << "state " << s;
}

// ---- DDAC --------------------------------------------------------------------

TEST(Ddac, LinearChainRuleStep) {
  // Critic Q(s, a) = 2a, actor pi(s) = u s with no squashing.
  nn::Layer critic_l{2, 1, {0.0, 2.0}, {0.0}, nn::Activation::linear};
  nn::Layer actor_l{1, 1, {0.7}, {0.0}, nn::Activation::linear};
  const nn::MlpParams critic({critic_l});
  const nn::MlpParams actor({actor_l});
  const std::vector<Squash> heads{Squash::none};
  const auto g = actor_gradient(actor, critic, heads, std::vector<double>{1.0});
  EXPECT_DOUBLE_EQ(g.weights[0][0], 2.0);

  DdacConfig cfg;
  cfg.actor_sgd = {0.1, 0.0, std::nullopt};
  cfg.critic_sgd = {0.1, 0.0, std::nullopt};
  cfg.batch_size = 1;
  cfg.reward_scale = 1.0;
  cfg.target_tau = 0.0;
  DdacAgent agent(actor, critic, heads, cfg, 1);
  // Terminal transition with r == Q(s, a): zero critic residual.
  ContinuousTransition t{{1.0}, {0.4}, 0.8, {0.0}, true};
  const ContinuousTransition* batch[] = {&t};
  const auto losses = agent.train_on(batch);
  EXPECT_EQ(losses.critic_loss, 0.0);
  EXPECT_TRUE(agent.critic() == critic);
  EXPECT_NEAR(agent.actor().layers[0].weights[0], 0.7 + 0.2, 1e-15);
  EXPECT_NEAR(losses.actor_objective, 2.0 * 0.7, 1e-15);
}

TEST(Ddac, ActorGradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> squash_pick(0, 2);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t sdim = 1 + rng() % 4, adim = 1 + rng() % 3;
    auto actor = nn::init_mlp({sdim, 8, adim}, {nn::Activation::tanh, nn::Activation::linear}, rng());
    auto critic = nn::init_mlp({sdim + adim, 12, 1}, {nn::Activation::sigmoid, nn::Activation::linear}, rng());
    std::vector<Squash> heads;
    for (std::size_t i = 0; i < adim; ++i) heads.push_back(static_cast<Squash>(squash_pick(rng)));
    const auto s = oracle::random_vector(rng, sdim);
    const auto g = actor_gradient(actor, critic, heads, s);
    auto q_of = [&](const nn::MlpParams& a) {
      auto act = oracle::reference_forward(a, s);
      for (std::size_t i = 0; i < adim; ++i) act[i] = squash(heads[i], act[i]);
      auto in = s;
      in.insert(in.end(), act.begin(), act.end());
      return oracle::reference_forward(critic, in)[0];
    };
    for (std::size_t k = 0; k < actor.layers.size(); ++k)
      for (std::size_t i = 0; i < actor.layers[k].weights.size(); ++i) {
        auto f = [&](double v) {
          auto a = actor;
          a.layers[k].weights[i] = v;
          return q_of(a);
        };
        EXPECT_LE(oracle::rel_error(g.weights[k][i], oracle::central_difference(f, actor.layers[k].weights[i])),
                  1e-5);
      }
  }
}

TEST(Ddac, ClampingAfterNoise) {
  const std::vector<double> a{0.95, 0.5, 0.5};
  const std::vector<double> noise{0.2, 0.0, 0.0};
  EXPECT_EQ(DdacAgent::perturbed_action(a, noise).steer, 1.0);
  const std::vector<double> low{-0.9, 0.05, 0.99};
  const std::vector<double> push{-0.3, -0.1, 0.5};
  const auto c = DdacAgent::perturbed_action(low, push);
  EXPECT_EQ(c.steer, -1.0);
  EXPECT_EQ(c.accel, 0.0);
  EXPECT_EQ(c.brake, 1.0);
  EXPECT_EQ(c.gear, 1);
}

TEST(Ddac, DeterministicPolicyAndSquashedRange) {
  DdacAgent agent(3, DdacConfig{}, 2);
  const std::vector<double> s{0.2, -0.1, 0.4};
  const auto a = agent.select_action(s, 0, false);
  const auto b = agent.select_action(s, 0, false);
  EXPECT_EQ(a, b);
  // Saturate the pre-squash outputs.
  for (auto& w : agent.actor().layers.back().bias) w = 1e6;
  agent.actor().touch();
  const auto big = agent.select_action(s, 0, false);
  EXPECT_LE(big.steer, 1.0);
  EXPECT_GE(big.steer, -1.0);
  EXPECT_TRUE(big.in_range());
}

TEST(Ddac, ExploratoryActionsStayLegal) {
  DdacAgent agent(3, DdacConfig{}, 3);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 2000; ++i) ASSERT_TRUE(agent.select_action(oracle::random_vector(rng, 3, 3.0), i, true).in_range());
}

TEST(Ddac, TrainingIsDeterministic) {
  auto run = [] {
    DdacConfig cfg;
    cfg.batch_size = 8;
    cfg.target_tau = 0.01;
    DdacAgent agent(3, cfg, 11);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
      auto s = oracle::random_vector(rng, 3);
      auto a = agent.select_action(s, i, true);
      agent.remember({s, {a.steer, a.accel, a.brake}, s[0], oracle::random_vector(rng, 3), i % 17 == 0});
      agent.train_step();
    }
    return agent.actor();
  };
  EXPECT_TRUE(run() == run());
}

TEST(Ddac, BrakeBiasInitialization) {
  DdacConfig cfg;
  cfg.brake_bias_init = -2.5;
  DdacAgent agent(3, cfg, 1);
  EXPECT_EQ(agent.actor().layers.back().bias[2], -2.5);
  const auto a = agent.policy(std::vector<double>{0.0, 0.0, 0.0});
  EXPECT_LT(a[2], 0.2);
}

// ---- replay memory and action grid --------------------------------------------

TEST(ReplayBuffer, RingKeepsNewest) {
  ReplayBuffer<DiscreteTransition> buf(5, 1);
  for (std::size_t i = 0; i < 12; ++i) buf.push({{static_cast<double>(i)}, i, 0.0, {0.0}, false});
  EXPECT_EQ(buf.size(), 5u);
  EXPECT_EQ(buf.latest().a, 11u);
  std::vector<std::size_t> kept;
  for (const auto* t : buf.chronological()) kept.push_back(t->a);
  EXPECT_EQ(kept, (std::vector<std::size_t>{7, 8, 9, 10, 11}));
  for (const auto* t : buf.sample(100)) {
    EXPECT_GE(t->a, 7u);
    EXPECT_LE(t->a, 11u);
  }
  ReplayBuffer<DiscreteTransition> empty(3, 1);
  EXPECT_THROW(empty.sample(1), std::logic_error);
  EXPECT_THROW(ReplayBuffer<DiscreteTransition>(0, 1), std::invalid_argument);
}

TEST(ReplayBuffer, SamplingCoversContentsUniformly) {
  ReplayBuffer<DiscreteTransition> buf(4, 9);
  for (std::size_t i = 0; i < 4; ++i) buf.push({{0.0}, i, 0.0, {0.0}, false});
  std::vector<int> counts(4, 0);
  for (const auto* t : buf.sample(8000)) ++counts[t->a];
  for (int c : counts) EXPECT_NEAR(c, 2000, 3 * std::sqrt(8000 * 0.25 * 0.75));
}

TEST(ActionSet, GridLayout) {
  DiscreteActionSet set;
  EXPECT_EQ(set.size(), 15u);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto [si, ti] = set.coordinates(i);
    EXPECT_EQ(set.encode(si, ti), i);
    const CarAction a = set.decode(i);
    EXPECT_TRUE(a.in_range());
    EXPECT_EQ(a.gear, 1);
    EXPECT_FALSE(a.accel > 0.0 && a.brake > 0.0);
  }
  EXPECT_EQ(set.decode(0).steer, -1.0);
  EXPECT_EQ(set.decode(14).steer, 1.0);
  EXPECT_EQ(set.decode(14).brake, 0.8);
  EXPECT_THROW(set.decode(15), std::out_of_range);
}

// ---- lane agents and checkpoints ----------------------------------------------

namespace {

std::string saved(const Agent& a) {
  std::ostringstream os;
  a.save(os);
  return os.str();
}

void train_briefly(Agent& agent, std::uint64_t seed) {
  const Track track = load_track(LANEKEEP_TRACK_DIR "/oval.track");
  Environment env(track, DynamicsConfig{}, TerminationPolicy::for_condition(TerminationCondition::both));
  Observation obs = env.reset(seed);
  for (std::uint64_t i = 0; i < 400; ++i) {
    const auto a = agent.act(obs, i, true);
    const auto r = env.step(a);
    agent.learn(obs, r.reward, r.observation, r.terminated);
    obs = r.terminated ? env.reset(seed) : r.observation;
  }
}

}  // namespace

TEST(LaneAgents, CheckpointRoundTripForEveryAlgorithm) {
  for (auto algo : {Algorithm::qlearn, Algorithm::dqn, Algorithm::ddac}) {
    AgentSettings settings;
    settings.algorithm = algo;
    settings.dqn.batch_size = 8;
    settings.ddac.batch_size = 8;
    auto agent = make_agent(settings, 4);
    train_briefly(*agent, 4);
    const std::string text = saved(*agent);
    std::istringstream is(text);
    auto loaded = load_agent(is);
    EXPECT_EQ(loaded->algorithm(), algo);
    EXPECT_EQ(saved(*loaded), text) << to_string(algo);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 50; ++i) {
      const Observation o{u(rng), 0.5 * u(rng), 50.0 + 40.0 * u(rng)};
      EXPECT_EQ(agent->act(o, 0, false), loaded->act(o, 0, false)) << to_string(algo);
    }
  }
}

TEST(LaneAgents, TwoFeatureEncoderDropsAngle) {
  ObservationEncoder enc;
  enc.two_feature = true;
  EXPECT_EQ(enc.dim(), 2u);
  EXPECT_EQ(enc.encode({0.5, 0.3, 54.0}), (std::vector<double>{0.5, 0.5}));
  AgentSettings settings;
  settings.encoder = enc;
  for (auto algo : {Algorithm::qlearn, Algorithm::dqn, Algorithm::ddac}) {
    settings.algorithm = algo;
    auto agent = make_agent(settings, 1);
    EXPECT_TRUE(agent->act({0.1, 0.2, 10.0}, 0, true).in_range());
  }
}

TEST(LaneAgents, RejectsCorruptCheckpoints) {
  std::istringstream junk("hello\n");
  EXPECT_THROW(load_agent(junk), CheckpointError);
  auto agent = make_agent(AgentSettings{}, 1);
  std::string text = saved(*agent);
  std::istringstream cut(text.substr(0, text.size() / 3));
  EXPECT_THROW(load_agent(cut), CheckpointError);
}
