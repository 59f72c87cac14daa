#pragma once

#include "lanekeep/action_set.hpp"
#include "lanekeep/agent.hpp"
#include "lanekeep/config_json.hpp"
#include "lanekeep/ddac.hpp"
#include "lanekeep/dqn.hpp"
#include "lanekeep/errors.hpp"
#include "lanekeep/experiment.hpp"
#include "lanekeep/lane_agents.hpp"
#include "lanekeep/nn.hpp"
#include "lanekeep/nn_io.hpp"
#include "lanekeep/qlearning.hpp"
#include "lanekeep/replay_buffer.hpp"
#include "lanekeep/scr_client.hpp"
#include "lanekeep/scr_protocol.hpp"
#include "lanekeep/simulator.hpp"
#include "lanekeep/tile_coding.hpp"
#include "lanekeep/track.hpp"
