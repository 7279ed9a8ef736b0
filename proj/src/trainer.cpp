#include "psdpg/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

namespace psdpg {

std::string variant_name(Variant v) {
    switch (v) {
    case Variant::maddpg: return "maddpg";
    case Variant::v0: return "v0";
    case Variant::v1: return "v1";
    case Variant::v2: return "v2";
    }
    return "v0";
}

Variant variant_from_name(const std::string& name) {
    if (name == "maddpg") return Variant::maddpg;
    if (name == "v0") return Variant::v0;
    if (name == "v1") return Variant::v1;
    if (name == "v2") return Variant::v2;
    throw InvalidSpecError("unknown variant '" + name + "'");
}

AgentLayout AgentLayout::from_spec(const EnvSpec& spec) {
    AgentLayout lay;
    lay.obs_dims = spec.obs_dims;
    lay.act_dims = spec.act_dims;
    lay.obs_off.resize(spec.n_agents);
    lay.act_off.resize(spec.n_agents);
    for (int i = 0; i < spec.n_agents; ++i) {
        lay.obs_off[i] = lay.obs_total;
        lay.act_off[i] = lay.act_total;
        lay.obs_total += spec.obs_dims[i];
        lay.act_total += spec.act_dims[i];
    }
    return lay;
}

const LayeredNet& AgentEnsemble::actor_for(int agent) const {
    return shared_actor() ? actors[0] : actors[agent];
}

const LayeredNet& AgentEnsemble::target_actor_for(int agent) const {
    return shared_actor() ? target_actors[0] : target_actors[agent];
}

long AgentEnsemble::actor_params() const {
    long total = 0;
    for (const auto& net : actors) total += param_count(net);
    return total;
}

long AgentEnsemble::critic_params() const {
    long total = 0;
    for (const auto& net : critics) total += param_count(net);
    if (head_critic) {
        total += param_count(head_critic->trunk);
        for (const auto& h : head_critic->heads) total += param_count(h);
    }
    return total;
}

int AgentEnsemble::nets_updated_per_step() const {
    switch (variant) {
    case Variant::maddpg: return 2 * n_agents;
    case Variant::v0: return 2;
    case Variant::v1: return n_agents + 1;
    case Variant::v2: return 2;
    }
    return 0;
}

namespace {

std::vector<int> chained_sizes(int in, const std::vector<int>& hidden, int out) {
    std::vector<int> sizes;
    sizes.push_back(in);
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(out);
    return sizes;
}

std::vector<Activation> hidden_relu_then(std::size_t n_layers, Activation last) {
    std::vector<Activation> acts(n_layers, Activation::relu);
    acts.back() = last;
    return acts;
}

LayeredNet make_actor_net(int obs_dim, int act_dim, const std::vector<int>& hidden,
                          std::uint64_t seed) {
    auto sizes = chained_sizes(obs_dim, hidden, act_dim);
    return init_net(sizes, hidden_relu_then(sizes.size() - 1, Activation::tanh), seed);
}

LayeredNet make_critic_net(int in_dim, const std::vector<int>& hidden, std::uint64_t seed) {
    auto sizes = chained_sizes(in_dim, hidden, 1);
    return init_net(sizes, hidden_relu_then(sizes.size() - 1, Activation::identity), seed);
}

} // namespace

AgentEnsemble make_ensemble(const EnvSpec& spec, const TrainConfig& cfg) {
    if (spec.n_agents < 1) throw InvalidSpecError("make_ensemble: need at least one agent");

    AgentEnsemble ens;
    ens.variant = cfg.variant;
    ens.n_agents = spec.n_agents;
    ens.layout = AgentLayout::from_spec(spec);

    const bool shared = cfg.variant != Variant::maddpg;
    if (shared) {
        for (int i = 1; i < spec.n_agents; ++i)
            if (spec.obs_dims[i] != spec.obs_dims[0] || spec.act_dims[i] != spec.act_dims[0])
                throw InvalidSpecError(variant_name(cfg.variant) +
                                       " requires uniform per-agent dimensions");
    }

    std::mt19937_64 seeder(cfg.seed);
    const int critic_in = ens.layout.obs_total + ens.layout.act_total;

    const int n_actors = shared ? 1 : spec.n_agents;
    for (int i = 0; i < n_actors; ++i)
        ens.actors.push_back(make_actor_net(spec.obs_dims[shared ? 0 : i],
                                            spec.act_dims[shared ? 0 : i],
                                            cfg.actor_hidden, seeder()));

    switch (cfg.variant) {
    case Variant::v0:
        ens.critics.push_back(make_critic_net(critic_in, cfg.critic_hidden, seeder()));
        break;
    case Variant::maddpg:
    case Variant::v1:
        for (int i = 0; i < spec.n_agents; ++i)
            ens.critics.push_back(make_critic_net(critic_in, cfg.critic_hidden, seeder()));
        break;
    case Variant::v2: {
        if (cfg.v2_shared_sizes.empty())
            throw InvalidSpecError("v2 needs at least one shared trunk layer");
        MultiHeadCritic mhc;
        auto trunk_sizes = chained_sizes(critic_in, cfg.v2_shared_sizes, 0);
        trunk_sizes.pop_back(); // trunk output = last shared width
        mhc.trunk = init_net(trunk_sizes,
                             std::vector<Activation>(trunk_sizes.size() - 1, Activation::relu),
                             seeder());
        for (int i = 0; i < spec.n_agents; ++i)
            mhc.heads.push_back(
                make_critic_net(cfg.v2_shared_sizes.back(), cfg.v2_head_sizes, seeder()));
        ens.head_critic = std::move(mhc);
        break;
    }
    }

    ens.target_actors = ens.actors;
    ens.target_critics = ens.critics;
    ens.target_head_critic = ens.head_critic;

    for (const auto& net : ens.actors) ens.actor_opt.push_back(make_adam_state(net));
    for (const auto& net : ens.critics) ens.critic_opt.push_back(make_adam_state(net));
    if (ens.head_critic) {
        ens.trunk_opt = make_adam_state(ens.head_critic->trunk);
        for (const auto& h : ens.head_critic->heads) ens.head_opt.push_back(make_adam_state(h));
    }
    return ens;
}

double exploration_epsilon(long step, const TrainConfig& cfg) {
    if (cfg.eps_decay_steps <= 0 || step >= cfg.eps_decay_steps) return cfg.eps_end;
    if (step <= 0) return cfg.eps_start;
    const double f = static_cast<double>(step) / static_cast<double>(cfg.eps_decay_steps);
    return cfg.eps_start + (cfg.eps_end - cfg.eps_start) * f;
}

std::vector<double> action_noise(int dim, double eps, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> noise(dim);
    for (double& v : noise) v = eps * gauss(rng);
    return noise;
}

std::vector<double> select_action(const LayeredNet& actor, const std::vector<double>& obs,
                                  double eps, std::mt19937_64& rng) {
    std::vector<double> a = forward(actor, obs);
    if (eps > 0.0) {
        const auto noise = action_noise(static_cast<int>(a.size()), eps, rng);
        for (std::size_t k = 0; k < a.size(); ++k) a[k] += noise[k];
    }
    for (double& v : a) v = std::clamp(v, -1.0, 1.0);
    return a;
}

namespace {

// Shared scratch for one batch pass over a variant's critic side.
struct CriticScratch {
    Workspace critic_ws, trunk_ws, head_ws;
    std::vector<double> input;      // concatenated (x, a)
    std::vector<double> upstream1;  // scalar upstream
    std::vector<double> trunk_up;   // accumulated head input-gradients
    std::vector<double> head_in_grad;
    std::vector<double> full_in_grad;
};

void concat_xa(const std::vector<double>& x, const std::vector<double>& a,
               std::vector<double>& out) {
    out.resize(x.size() + a.size());
    std::copy(x.begin(), x.end(), out.begin());
    std::copy(a.begin(), a.end(), out.begin() + static_cast<long>(x.size()));
}

// Evaluates Q for the variant's agent context and, when requested, the
// gradient of Q with respect to the concatenated (x, a) input.
double critic_value_and_input_grad(const AgentEnsemble& ens, int agent,
                                   const std::vector<double>& input, CriticScratch& sc,
                                   std::vector<double>* input_grad) {
    sc.upstream1.assign(1, 1.0);
    if (ens.variant == Variant::v2) {
        const auto& mhc = *ens.head_critic;
        const auto& trunk_out = forward_ws(mhc.trunk, input, sc.trunk_ws);
        const double q = forward_ws(mhc.heads[agent], trunk_out, sc.head_ws)[0];
        if (input_grad) {
            backward_ws(mhc.heads[agent], sc.head_ws, sc.upstream1, 1.0, nullptr,
                        &sc.head_in_grad);
            backward_ws(mhc.trunk, sc.trunk_ws, sc.head_in_grad, 1.0, nullptr, input_grad);
        }
        return q;
    }
    const LayeredNet& critic =
        ens.variant == Variant::v0 ? ens.critics[0] : ens.critics[agent];
    const double q = forward_ws(critic, input, sc.critic_ws)[0];
    if (input_grad)
        backward_ws(critic, sc.critic_ws, sc.upstream1, 1.0, nullptr, input_grad);
    return q;
}

} // namespace

std::vector<std::vector<double>> bellman_targets_all(const AgentEnsemble& ens,
                                                     const std::vector<Transition>& batch,
                                                     double gamma) {
    const int n = ens.n_agents;
    const std::size_t s = batch.size();
    std::vector<std::vector<double>> y(n, std::vector<double>(s, 0.0));

    Workspace actor_ws, critic_ws, trunk_ws, head_ws;
    std::vector<double> next_input(ens.layout.obs_total + ens.layout.act_total);

    for (std::size_t j = 0; j < s; ++j) {
        const Transition& t = batch[j];
        if (static_cast<int>(t.x_next.size()) != ens.layout.obs_total ||
            static_cast<int>(t.r.size()) != n)
            throw ShapeError("bellman_targets: transition does not match layout");

        // a'_k = mu'_k(o'_k) for every agent, frozen target nets.
        std::copy(t.x_next.begin(), t.x_next.end(), next_input.begin());
        for (int k = 0; k < n; ++k) {
            const auto& out = forward_ws(ens.target_actor_for(k),
                                         t.x_next.data() + ens.layout.obs_off[k],
                                         ens.layout.obs_dims[k], actor_ws);
            std::copy(out.begin(), out.end(),
                      next_input.begin() + ens.layout.obs_total + ens.layout.act_off[k]);
        }

        const double mask = t.terminal ? 0.0 : 1.0;
        switch (ens.variant) {
        case Variant::v0: {
            const double q = forward_ws(ens.target_critics[0], next_input, critic_ws)[0];
            for (int i = 0; i < n; ++i) y[i][j] = t.r[i] + gamma * mask * q;
            break;
        }
        case Variant::maddpg:
        case Variant::v1:
            for (int i = 0; i < n; ++i) {
                const double q = forward_ws(ens.target_critics[i], next_input, critic_ws)[0];
                y[i][j] = t.r[i] + gamma * mask * q;
            }
            break;
        case Variant::v2: {
            const auto& mhc = *ens.target_head_critic;
            const auto& trunk_out = forward_ws(mhc.trunk, next_input, trunk_ws);
            for (int i = 0; i < n; ++i) {
                const double q = forward_ws(mhc.heads[i], trunk_out, head_ws)[0];
                y[i][j] = t.r[i] + gamma * mask * q;
            }
            break;
        }
        }
    }
    return y;
}

std::vector<double> bellman_targets(const AgentEnsemble& ens,
                                    const std::vector<Transition>& batch,
                                    int agent, double gamma) {
    if (agent < 0 || agent >= ens.n_agents)
        throw InvalidSpecError("bellman_targets: agent index out of range");
    return bellman_targets_all(ens, batch, gamma)[agent];
}

CriticEval critic_gradient(const AgentEnsemble& ens, const std::vector<Transition>& batch,
                           const std::vector<std::vector<double>>& targets, int chosen_agent) {
    CriticEval ev;
    const std::size_t s = batch.size();
    if (s == 0) return ev;
    const int n = ens.n_agents;
    if (static_cast<int>(targets.size()) != n)
        throw ShapeError("critic_gradient: expected one target row per agent");

    CriticScratch sc;
    auto check_row = [&](int i) {
        if (targets[i].size() != s)
            throw ShapeError("critic_gradient: target row " + std::to_string(i) +
                             " does not match the batch");
    };

    switch (ens.variant) {
    case Variant::v0: {
        if (chosen_agent < 0 || chosen_agent >= n)
            throw InvalidSpecError("critic_gradient: v0 needs a chosen agent");
        check_row(chosen_agent);
        ev.grads.push_back(make_zero_gradients(ens.critics[0]));
        double sq = 0.0;
        for (std::size_t j = 0; j < s; ++j) {
            concat_xa(batch[j].x, batch[j].a, sc.input);
            const double q = forward_ws(ens.critics[0], sc.input, sc.critic_ws)[0];
            const double res = q - targets[chosen_agent][j];
            sq += res * res;
            sc.upstream1.assign(1, 2.0 * res / static_cast<double>(s));
            backward_ws(ens.critics[0], sc.critic_ws, sc.upstream1, 1.0, &ev.grads[0], nullptr);
        }
        ev.loss = sq / static_cast<double>(s);
        break;
    }
    case Variant::maddpg:
    case Variant::v1: {
        double sq = 0.0;
        for (int i = 0; i < n; ++i) {
            check_row(i);
            ev.grads.push_back(make_zero_gradients(ens.critics[i]));
        }
        for (std::size_t j = 0; j < s; ++j) {
            concat_xa(batch[j].x, batch[j].a, sc.input);
            for (int i = 0; i < n; ++i) {
                const double q = forward_ws(ens.critics[i], sc.input, sc.critic_ws)[0];
                const double res = q - targets[i][j];
                sq += res * res;
                sc.upstream1.assign(1, 2.0 * res / static_cast<double>(s));
                backward_ws(ens.critics[i], sc.critic_ws, sc.upstream1, 1.0, &ev.grads[i],
                            nullptr);
            }
        }
        ev.loss = sq / static_cast<double>(n * s);
        break;
    }
    case Variant::v2: {
        const auto& mhc = *ens.head_critic;
        ev.grads.push_back(make_zero_gradients(mhc.trunk));
        for (int i = 0; i < n; ++i) {
            check_row(i);
            ev.grads.push_back(make_zero_gradients(mhc.heads[i]));
        }
        const double norm = static_cast<double>(n) * static_cast<double>(s);
        double sq = 0.0;
        for (std::size_t j = 0; j < s; ++j) {
            concat_xa(batch[j].x, batch[j].a, sc.input);
            const auto& trunk_out = forward_ws(mhc.trunk, sc.input, sc.trunk_ws);
            sc.trunk_up.assign(trunk_out.size(), 0.0);
            for (int i = 0; i < n; ++i) {
                const double q = forward_ws(mhc.heads[i], trunk_out, sc.head_ws)[0];
                const double res = q - targets[i][j];
                sq += res * res;
                sc.upstream1.assign(1, 2.0 * res / norm);
                backward_ws(mhc.heads[i], sc.head_ws, sc.upstream1, 1.0, &ev.grads[1 + i],
                            &sc.head_in_grad);
                for (std::size_t k = 0; k < sc.trunk_up.size(); ++k)
                    sc.trunk_up[k] += sc.head_in_grad[k];
            }
            backward_ws(mhc.trunk, sc.trunk_ws, sc.trunk_up, 1.0, &ev.grads[0], nullptr);
        }
        ev.loss = sq / norm;
        break;
    }
    }
    return ev;
}

namespace {

void actor_gradient_accumulate(const AgentEnsemble& ens, const std::vector<Transition>& batch,
                               int agent, double scale, GradientSet& acc) {
    const std::size_t s = batch.size();
    if (s == 0) return;
    const AgentLayout& lay = ens.layout;
    const LayeredNet& actor = ens.actor_for(agent);

    Workspace actor_ws;
    CriticScratch sc;
    std::vector<double> da(lay.act_dims[agent]);
    const double per_sample = scale / static_cast<double>(s);
    const int a_base = lay.obs_total + lay.act_off[agent];

    for (std::size_t j = 0; j < s; ++j) {
        const Transition& t = batch[j];
        if (static_cast<int>(t.x.size()) != lay.obs_total ||
            static_cast<int>(t.a.size()) != lay.act_total)
            throw ShapeError("actor gradient: transition does not match layout");

        const auto& a_i = forward_ws(actor, t.x.data() + lay.obs_off[agent],
                                     lay.obs_dims[agent], actor_ws);
        concat_xa(t.x, t.a, sc.input);
        std::copy(a_i.begin(), a_i.end(), sc.input.begin() + a_base);

        critic_value_and_input_grad(ens, agent, sc.input, sc, &sc.full_in_grad);
        std::copy(sc.full_in_grad.begin() + a_base,
                  sc.full_in_grad.begin() + a_base + lay.act_dims[agent], da.begin());

        backward_ws(actor, actor_ws, da, per_sample, &acc, nullptr);
    }
}

} // namespace

GradientSet actor_policy_gradient(const AgentEnsemble& ens,
                                  const std::vector<Transition>& batch, int agent) {
    if (agent < 0 || agent >= ens.n_agents)
        throw InvalidSpecError("actor_policy_gradient: agent index out of range");
    GradientSet g = make_zero_gradients(ens.actor_for(agent));
    actor_gradient_accumulate(ens, batch, agent, 1.0, g);
    return g;
}

double critic_update(AgentEnsemble& ens, const std::vector<Transition>& batch,
                     const TrainConfig& cfg, int chosen_agent) {
    if (batch.empty()) return 0.0; // insufficient batch: skip
    const auto targets = bellman_targets_all(ens, batch, cfg.gamma);
    const auto ev = critic_gradient(ens, batch, targets, chosen_agent);

    switch (ens.variant) {
    case Variant::v0:
        adam_step(ens.critics[0], ev.grads[0], ens.critic_opt[0], cfg.lr_critic,
                  StepDirection::descend);
        break;
    case Variant::maddpg:
    case Variant::v1:
        for (int i = 0; i < ens.n_agents; ++i)
            adam_step(ens.critics[i], ev.grads[i], ens.critic_opt[i], cfg.lr_critic,
                      StepDirection::descend);
        break;
    case Variant::v2: {
        auto& mhc = *ens.head_critic;
        adam_step(mhc.trunk, ev.grads[0], ens.trunk_opt, cfg.lr_critic,
                  StepDirection::descend);
        for (int i = 0; i < ens.n_agents; ++i)
            adam_step(mhc.heads[i], ev.grads[1 + i], ens.head_opt[i], cfg.lr_critic,
                      StepDirection::descend);
        break;
    }
    }
    return ev.loss;
}

void actor_update(AgentEnsemble& ens, const std::vector<Transition>& batch,
                  const TrainConfig& cfg, int chosen_agent) {
    if (batch.empty()) return;
    switch (ens.variant) {
    case Variant::maddpg:
        for (int i = 0; i < ens.n_agents; ++i) {
            GradientSet g = make_zero_gradients(ens.actors[i]);
            actor_gradient_accumulate(ens, batch, i, 1.0, g);
            adam_step(ens.actors[i], g, ens.actor_opt[i], cfg.lr_actor,
                      StepDirection::ascend);
        }
        break;
    case Variant::v0: {
        if (chosen_agent < 0 || chosen_agent >= ens.n_agents)
            throw InvalidSpecError("actor_update: v0 needs a chosen agent");
        GradientSet g = make_zero_gradients(ens.actors[0]);
        actor_gradient_accumulate(ens, batch, chosen_agent, 1.0, g);
        adam_step(ens.actors[0], g, ens.actor_opt[0], cfg.lr_actor, StepDirection::ascend);
        break;
    }
    case Variant::v1:
    case Variant::v2: {
        // One shared-actor step along the agent-averaged chain.
        GradientSet g = make_zero_gradients(ens.actors[0]);
        const double w = 1.0 / static_cast<double>(ens.n_agents);
        for (int i = 0; i < ens.n_agents; ++i)
            actor_gradient_accumulate(ens, batch, i, w, g);
        adam_step(ens.actors[0], g, ens.actor_opt[0], cfg.lr_actor, StepDirection::ascend);
        break;
    }
    }
}

void update_targets(AgentEnsemble& ens, double tau) {
    for (std::size_t i = 0; i < ens.actors.size(); ++i)
        soft_update(ens.target_actors[i], ens.actors[i], tau);
    for (std::size_t i = 0; i < ens.critics.size(); ++i)
        soft_update(ens.target_critics[i], ens.critics[i], tau);
    if (ens.head_critic) {
        soft_update(ens.target_head_critic->trunk, ens.head_critic->trunk, tau);
        for (std::size_t i = 0; i < ens.head_critic->heads.size(); ++i)
            soft_update(ens.target_head_critic->heads[i], ens.head_critic->heads[i], tau);
    }
}

StepReport train_step(AgentEnsemble& ens, ReplayMemory& mem, const Transition& t,
                      const TrainConfig& cfg, std::mt19937_64& rng) {
    mem.push(t);
    StepReport rep;
    if (mem.size() < std::max<long>(cfg.batch_size, cfg.warmup)) return rep;

    const auto batch = mem.sample(cfg.batch_size, rng);
    int chosen = -1;
    if (ens.variant == Variant::v0)
        chosen = std::uniform_int_distribution<int>(0, ens.n_agents - 1)(rng);

    rep.critic_loss = critic_update(ens, batch, cfg, chosen);
    actor_update(ens, batch, cfg, chosen);
    update_targets(ens, cfg.tau);

    rep.updated = true;
    rep.nets_updated = ens.nets_updated_per_step();
    rep.chosen_agent = chosen;
    return rep;
}

namespace {

std::vector<double> concat_agent_vectors(const std::vector<std::vector<double>>& per_agent) {
    std::vector<double> out;
    for (const auto& v : per_agent) out.insert(out.end(), v.begin(), v.end());
    return out;
}

} // namespace

TrainRun train(const ParticleEnv& env, const TrainConfig& cfg,
               const EpisodeObserver& on_episode) {
    const EnvSpec& spec = env.spec();
    TrainRun run{make_ensemble(spec, cfg), {}, {}};

    if (cfg.variant == Variant::v0 && !spec.reward_sharing)
        run.warnings.push_back(
            "v0 assumes reward sharing; this environment pays per-agent rewards");

    // Offset keeps the training stream decoupled from the init seeder.
    std::mt19937_64 rng(cfg.seed + 0x9E3779B97F4A7C15ull);
    ReplayMemory mem(cfg.replay_capacity, run.ensemble.layout.obs_total,
                     run.ensemble.layout.act_total, spec.n_agents);

    long global_step = 0;
    int episode = 0;
    while (global_step < cfg.total_steps) {
        auto [state, obs] = env.reset(rng);
        std::vector<double> ep_returns(spec.n_agents, 0.0);
        int steps = 0;
        std::vector<std::vector<double>> actions(spec.n_agents);

        while (global_step < cfg.total_steps) {
            const double eps = exploration_epsilon(global_step, cfg);
            for (int i = 0; i < spec.n_agents; ++i)
                actions[i] = select_action(run.ensemble.actor_for(i), obs[i], eps, rng);

            auto sr = env.step(state, actions, rng);
            Transition t;
            t.x = concat_agent_vectors(obs);
            t.a = concat_agent_vectors(actions);
            t.r = sr.rewards;
            t.x_next = concat_agent_vectors(sr.obs);
            t.terminal = sr.done;
            train_step(run.ensemble, mem, t, cfg, rng);

            for (int i = 0; i < spec.n_agents; ++i) ep_returns[i] += sr.rewards[i];
            ++steps;
            ++global_step;
            state = std::move(sr.state);
            obs = std::move(sr.obs);
            if (sr.done) break;
        }

        if (steps > 0) {
            EpisodeRecord rec;
            rec.episode = episode++;
            rec.agent_returns = ep_returns;
            rec.total = std::accumulate(ep_returns.begin(), ep_returns.end(), 0.0);
            rec.steps = steps;
            run.episodes.push_back(std::move(rec));
            if (on_episode) on_episode(run.ensemble, run.episodes.back());
        }
    }
    return run;
}

namespace {

void write_real(std::ostream& os, double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    os << buf;
}

void save_role(std::ostream& os, const std::string& role, int index, const LayeredNet& net) {
    os << role;
    if (index >= 0) os << " " << index;
    os << "\n";
    save_net(os, net);
}

} // namespace

void save_ensemble(std::ostream& os, const AgentEnsemble& ens, double gamma, double tau) {
    os << variant_name(ens.variant) << " " << ens.n_agents << " ";
    write_real(os, gamma);
    os << " ";
    write_real(os, tau);
    os << "\n";
    os << "layout obs";
    for (int d : ens.layout.obs_dims) os << " " << d;
    os << " act";
    for (int d : ens.layout.act_dims) os << " " << d;
    os << "\n";

    for (std::size_t i = 0; i < ens.actors.size(); ++i)
        save_role(os, "actor", static_cast<int>(i), ens.actors[i]);
    for (std::size_t i = 0; i < ens.target_actors.size(); ++i)
        save_role(os, "target_actor", static_cast<int>(i), ens.target_actors[i]);
    for (std::size_t i = 0; i < ens.critics.size(); ++i)
        save_role(os, "critic", static_cast<int>(i), ens.critics[i]);
    for (std::size_t i = 0; i < ens.target_critics.size(); ++i)
        save_role(os, "target_critic", static_cast<int>(i), ens.target_critics[i]);
    if (ens.head_critic) {
        save_role(os, "trunk", -1, ens.head_critic->trunk);
        for (std::size_t i = 0; i < ens.head_critic->heads.size(); ++i)
            save_role(os, "head", static_cast<int>(i), ens.head_critic->heads[i]);
        save_role(os, "target_trunk", -1, ens.target_head_critic->trunk);
        for (std::size_t i = 0; i < ens.target_head_critic->heads.size(); ++i)
            save_role(os, "target_head", static_cast<int>(i), ens.target_head_critic->heads[i]);
    }
}

LoadedEnsemble load_ensemble(std::istream& is) {
    LoadedEnsemble out;
    AgentEnsemble& ens = out.ensemble;

    std::string variant_str;
    if (!(is >> variant_str >> ens.n_agents >> out.gamma >> out.tau))
        throw InvalidSpecError("load_ensemble: bad manifest line");
    ens.variant = variant_from_name(variant_str);
    if (ens.n_agents < 1) throw InvalidSpecError("load_ensemble: bad agent count");

    std::string tag;
    if (!(is >> tag) || tag != "layout")
        throw InvalidSpecError("load_ensemble: expected layout line");
    EnvSpec pseudo;
    pseudo.n_agents = ens.n_agents;
    if (!(is >> tag) || tag != "obs") throw InvalidSpecError("load_ensemble: bad layout");
    pseudo.obs_dims.resize(ens.n_agents);
    for (int& d : pseudo.obs_dims)
        if (!(is >> d)) throw InvalidSpecError("load_ensemble: bad layout");
    if (!(is >> tag) || tag != "act") throw InvalidSpecError("load_ensemble: bad layout");
    pseudo.act_dims.resize(ens.n_agents);
    for (int& d : pseudo.act_dims)
        if (!(is >> d)) throw InvalidSpecError("load_ensemble: bad layout");
    ens.layout = AgentLayout::from_spec(pseudo);

    MultiHeadCritic mhc, target_mhc;
    bool has_mhc = false;
    std::string role;
    while (is >> role) {
        int index = -1;
        if (role != "trunk" && role != "target_trunk")
            if (!(is >> index)) throw InvalidSpecError("load_ensemble: missing net index");
        LayeredNet net = load_net(is);
        if (role == "actor") ens.actors.push_back(std::move(net));
        else if (role == "target_actor") ens.target_actors.push_back(std::move(net));
        else if (role == "critic") ens.critics.push_back(std::move(net));
        else if (role == "target_critic") ens.target_critics.push_back(std::move(net));
        else if (role == "trunk") { mhc.trunk = std::move(net); has_mhc = true; }
        else if (role == "head") { mhc.heads.push_back(std::move(net)); has_mhc = true; }
        else if (role == "target_trunk") target_mhc.trunk = std::move(net);
        else if (role == "target_head") target_mhc.heads.push_back(std::move(net));
        else throw InvalidSpecError("load_ensemble: unknown net role '" + role + "'");
    }
    if (has_mhc) {
        ens.head_critic = std::move(mhc);
        ens.target_head_critic = std::move(target_mhc);
    }

    for (const auto& net : ens.actors) ens.actor_opt.push_back(make_adam_state(net));
    for (const auto& net : ens.critics) ens.critic_opt.push_back(make_adam_state(net));
    if (ens.head_critic) {
        ens.trunk_opt = make_adam_state(ens.head_critic->trunk);
        for (const auto& h : ens.head_critic->heads) ens.head_opt.push_back(make_adam_state(h));
    }
    return out;
}

} // namespace psdpg
