#pragma once

#include <string>
#include <vector>

#include "psdpg/trainer.hpp"

namespace psdpg {

/// Everything a run needs: the training configuration plus environment
/// selection and output handling.
struct RunSpec {
    TrainConfig train;
    std::string env_name = "coop_spread";
    int n_agents = 2;
    std::string out_dir = ".";
    int eval_every = 0;    // episodes between evaluation sweeps; 0 = final sweep only
    int eval_episodes = 10;
    double obs_noise = 0.0;
    bool dump_trajectories = false;

    bool operator==(const RunSpec&) const = default;
};

/// Parses line-oriented "key = value" text ('#' starts a comment). Unknown
/// or duplicate keys and unparsable or out-of-range values throw ConfigError
/// carrying the offending line number. Missing keys keep their defaults.
RunSpec parse_config(const std::string& text);

/// The fully resolved spec as config text; parse_config(echo_config(s)) == s.
std::string echo_config(const RunSpec& spec);

} // namespace psdpg
