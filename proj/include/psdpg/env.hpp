#pragma once

#include <random>
#include <string>
#include <vector>

#include "psdpg/errors.hpp"

namespace psdpg {

/// Static description of a multi-agent environment.
struct EnvSpec {
    int n_agents = 0;
    std::vector<int> obs_dims;
    std::vector<int> act_dims;
    bool reward_sharing = false;
    bool exchangeable = false;
    int max_episode_length = 0;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// Full kinematic state. Positions live in the arena box [-1,1]^2.
struct EnvState {
    std::vector<Vec2> pos;
    std::vector<Vec2> vel;
    std::vector<Vec2> landmarks;
    int step = 0;
};

enum class EnvKind { coop_spread, assigned_targets, id_tagged_spread };

/// 2-D double-integrator arena with N agents and N landmarks.
///
/// Per-step dynamics (dt = 0.1, drag = 0.25), actions clipped to [-1,1]:
///   pos += dt * vel   (then clamped to the box)
///   vel += dt * action - drag * vel
///
/// Rewards:
///   coop_spread / id_tagged_spread  shared: -sum over landmarks of the
///                                   closest agent's distance
///   assigned_targets                per agent i: -dist(agent i, landmark i)
///
/// Observations are strictly local. Layout per agent:
///   [0..1]  own position          [2..3] own velocity
///   [4..]   landmark offsets (landmark - own position), world order, 2N
///   [..]    other-agent offsets, 2(N-1), sorted by (dx, dy) so that the
///           slots carry no agent identity
///   [..]    one-hot agent id (id_tagged_spread only), appended noise-free
class ParticleEnv {
public:
    ParticleEnv(EnvKind kind, int n_agents, int max_episode_length,
                double obs_noise = 0.0);

    const EnvSpec& spec() const { return spec_; }
    EnvKind kind() const { return kind_; }

    struct ResetResult {
        EnvState state;
        std::vector<std::vector<double>> obs;
    };
    /// Uniform agent/landmark placement, zero velocities, step counter zero.
    ResetResult reset(std::mt19937_64& rng) const;

    struct StepResult {
        EnvState state;
        std::vector<std::vector<double>> obs;
        std::vector<double> rewards;
        bool done = false;
    };
    StepResult step(const EnvState& state,
                    const std::vector<std::vector<double>>& actions,
                    std::mt19937_64& rng) const;

    /// Local views of an arbitrary state; noise_rng may be null to read the
    /// noise-free sensors regardless of the configured noise level.
    std::vector<std::vector<double>> observe(const EnvState& state,
                                             std::mt19937_64* noise_rng) const;

    std::vector<double> rewards(const EnvState& state) const;

    static constexpr double kDt = 0.1;
    static constexpr double kDrag = 0.25;
    static constexpr double kArenaHalf = 1.0;

private:
    EnvKind kind_;
    EnvSpec spec_;
    double obs_noise_;
};

ParticleEnv make_env(const std::string& name, int n_agents, int max_episode_length,
                     double obs_noise = 0.0);

/// Per-step locomotion reward: v minus contact and control costs plus the
/// survival bonus. Contact cost is 5e-4 * ||clip(F,-1,1)||^2, control cost
/// c_ctrl * ||a||^2.
double multi_ant_reward(double v, const std::vector<double>& contact_forces,
                        const std::vector<double>& action, double survival,
                        double c_ctrl);

} // namespace psdpg
