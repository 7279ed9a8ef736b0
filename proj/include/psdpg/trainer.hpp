#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "psdpg/env.hpp"
#include "psdpg/metrics.hpp"
#include "psdpg/net.hpp"
#include "psdpg/replay.hpp"

namespace psdpg {

/// The four learners. maddpg keeps per-agent actors and critics; v0 shares
/// one actor and one critic; v1 shares the actor only; v2 shares the actor
/// and the critic trunk, with one Q head per agent.
enum class Variant { maddpg, v0, v1, v2 };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

struct TrainConfig {
    Variant variant = Variant::v0;
    double gamma = 0.99;
    double tau = 0.01;
    double lr_actor = 1e-3;
    double lr_critic = 1e-3;
    int batch_size = 64;
    int warmup = 1000;
    double eps_start = 1.0;
    double eps_end = 0.02;
    long eps_decay_steps = 10000;
    long total_steps = 30000;
    int max_episode_length = 25;
    std::uint64_t seed = 0;
    long replay_capacity = 50000;

    // Desk-scale shapes; paper-scale runs use (500,128) actor,
    // (500,300,128) critic, (500,300) trunk and (128) head.
    std::vector<int> actor_hidden = {64, 64};
    std::vector<int> critic_hidden = {64, 64};
    std::vector<int> v2_shared_sizes = {64, 64};
    std::vector<int> v2_head_sizes = {64};

    bool operator==(const TrainConfig&) const = default;
};

/// Critic with a shared trunk and per-agent scalar heads. Counts as one
/// network: one logical update touches the trunk and every head.
struct MultiHeadCritic {
    LayeredNet trunk;
    std::vector<LayeredNet> heads;
};

/// Offsets of each agent's slice inside the concatenated observation and
/// action vectors.
struct AgentLayout {
    std::vector<int> obs_dims, act_dims;
    std::vector<int> obs_off, act_off;
    int obs_total = 0;
    int act_total = 0;

    static AgentLayout from_spec(const EnvSpec& spec);
};

struct AgentEnsemble {
    Variant variant = Variant::v0;
    int n_agents = 0;
    AgentLayout layout;

    std::vector<LayeredNet> actors, target_actors;   // 1 net when shared, N for maddpg
    std::vector<LayeredNet> critics, target_critics; // N for maddpg/v1, 1 for v0, empty for v2
    std::optional<MultiHeadCritic> head_critic, target_head_critic; // v2 only

    std::vector<AdamState> actor_opt, critic_opt;
    AdamState trunk_opt;
    std::vector<AdamState> head_opt;

    bool shared_actor() const { return variant != Variant::maddpg; }
    const LayeredNet& actor_for(int agent) const;
    const LayeredNet& target_actor_for(int agent) const;

    long actor_params() const;
    long critic_params() const;
    long total_params() const { return actor_params() + critic_params(); }

    /// Logical networks receiving a gradient update (and target networks
    /// soft-updated) per warmed-up train step: maddpg 2N, v0 2, v1 N+1, v2 2.
    int nets_updated_per_step() const;
};

/// Builds the variant's networks for an environment. Shared-actor variants
/// require uniform per-agent dimensions. Targets start as exact copies.
AgentEnsemble make_ensemble(const EnvSpec& spec, const TrainConfig& cfg);

/// Linear eps_start -> eps_end over eps_decay_steps, constant afterwards.
double exploration_epsilon(long step, const TrainConfig& cfg);

/// Zero-mean Gaussian exploration noise, per-dimension std eps.
std::vector<double> action_noise(int dim, double eps, std::mt19937_64& rng);

/// mu(obs) plus exploration noise, clipped to [-1,1]. eps = 0 returns the
/// deterministic policy output with no rng draw.
std::vector<double> select_action(const LayeredNet& actor, const std::vector<double>& obs,
                                  double eps, std::mt19937_64& rng);

/// y = r_i + gamma * (1 - terminal) * Q'(x', a') with a' from the target
/// actor(s). The agent index picks the reward slot and, per variant, the
/// target critic or head.
std::vector<double> bellman_targets(const AgentEnsemble& ens,
                                    const std::vector<Transition>& batch,
                                    int agent, double gamma);

/// Targets for every agent at once; shares the target-action evaluations.
std::vector<std::vector<double>> bellman_targets_all(const AgentEnsemble& ens,
                                                     const std::vector<Transition>& batch,
                                                     double gamma);

/// Loss and parameter gradients of the variant's TD objective. grads is
/// ordered per critic net for maddpg/v1, a single entry for v0, and
/// [trunk, head_0.. head_{N-1}] for v2. Entries of targets not used by the
/// variant may stay empty. loss is the mean squared residual over every
/// (agent, sample) pair evaluated.
struct CriticEval {
    double loss = 0.0;
    std::vector<GradientSet> grads;
};
CriticEval critic_gradient(const AgentEnsemble& ens, const std::vector<Transition>& batch,
                           const std::vector<std::vector<double>>& targets, int chosen_agent);

/// Deterministic-policy-gradient chain for one agent context:
/// (1/S) sum_j  d mu(o_ij)/d theta * dQ/da_i  at a_i = mu(o_ij), other
/// actions from the batch. The critic (or head) is picked by the variant.
GradientSet actor_policy_gradient(const AgentEnsemble& ens,
                                  const std::vector<Transition>& batch, int agent);

/// One Adam descent step on the TD loss. Returns the loss; empty batches are
/// skipped (loss 0, nothing updated).
double critic_update(AgentEnsemble& ens, const std::vector<Transition>& batch,
                     const TrainConfig& cfg, int chosen_agent);

/// One Adam ascent step per updated actor. maddpg steps each agent's own
/// actor; v0 steps the shared actor along the chosen agent's gradient; v1
/// and v2 step it once along the agent-averaged gradient.
void actor_update(AgentEnsemble& ens, const std::vector<Transition>& batch,
                  const TrainConfig& cfg, int chosen_agent);

/// Soft-updates every target net of the variant.
void update_targets(AgentEnsemble& ens, double tau);

struct StepReport {
    bool updated = false;
    double critic_loss = 0.0;
    int nets_updated = 0;
    int chosen_agent = -1; // v0's random agent for this step
};

/// Pushes the transition and, once the memory holds max(batch, warmup)
/// transitions, runs one sample / target / critic / actor / soft-update
/// cycle.
StepReport train_step(AgentEnsemble& ens, ReplayMemory& mem, const Transition& t,
                      const TrainConfig& cfg, std::mt19937_64& rng);

struct TrainRun {
    AgentEnsemble ensemble;
    std::vector<EpisodeRecord> episodes;
    std::vector<std::string> warnings;
};

/// Full training loop: episodes until total_steps environment steps are
/// consumed, exploration decaying on the global step counter. Deterministic
/// for a fixed config. on_episode, when set, sees the ensemble after each
/// recorded episode (evaluation sweeps hook in here).
using EpisodeObserver = std::function<void(const AgentEnsemble&, const EpisodeRecord&)>;
TrainRun train(const ParticleEnv& env, const TrainConfig& cfg,
               const EpisodeObserver& on_episode = {});

/// Ensemble file: manifest line "variant N gamma tau", a layout line, then
/// each net tagged with its role in a fixed order.
void save_ensemble(std::ostream& os, const AgentEnsemble& ens, double gamma, double tau);

struct LoadedEnsemble {
    AgentEnsemble ensemble;
    double gamma = 0.0;
    double tau = 0.0;
};
LoadedEnsemble load_ensemble(std::istream& is);

} // namespace psdpg
