#include "psdpg/eval.hpp"

#include <chrono>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace psdpg {

std::vector<double> moving_average(const std::vector<double>& series, int window) {
    if (window < 1) throw InvalidSpecError("moving_average: window must be positive");
    std::vector<double> out(series.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < series.size(); ++k) {
        acc += series[k];
        if (k >= static_cast<std::size_t>(window)) acc -= series[k - window];
        const auto span = std::min<std::size_t>(k + 1, window);
        out[k] = acc / static_cast<double>(span);
    }
    return out;
}

std::vector<EpisodeRecord> evaluate(const AgentEnsemble& ens, const ParticleEnv& env,
                                    int episodes, std::mt19937_64& rng) {
    const EnvSpec& spec = env.spec();
    if (ens.n_agents != spec.n_agents ||
        ens.layout.obs_dims != spec.obs_dims || ens.layout.act_dims != spec.act_dims)
        throw InvalidSpecError("evaluate: ensemble does not match the environment");

    std::vector<EpisodeRecord> records;
    records.reserve(episodes);
    for (int e = 0; e < episodes; ++e) {
        auto [state, obs] = env.reset(rng);
        std::vector<double> returns(spec.n_agents, 0.0);
        int steps = 0;
        std::vector<std::vector<double>> actions(spec.n_agents);
        while (true) {
            for (int i = 0; i < spec.n_agents; ++i)
                actions[i] = select_action(ens.actor_for(i), obs[i], 0.0, rng);
            auto sr = env.step(state, actions, rng);
            for (int i = 0; i < spec.n_agents; ++i) returns[i] += sr.rewards[i];
            ++steps;
            state = std::move(sr.state);
            obs = std::move(sr.obs);
            if (sr.done) break;
        }
        EpisodeRecord rec;
        rec.episode = e;
        rec.agent_returns = returns;
        rec.total = std::accumulate(returns.begin(), returns.end(), 0.0);
        rec.steps = steps;
        records.push_back(std::move(rec));
    }
    return records;
}

const StructuralRow& StructuralReport::row(Variant v) const {
    for (const auto& r : rows)
        if (r.variant == v) return r;
    throw InvalidSpecError("structural report has no row for " + variant_name(v));
}

std::string StructuralReport::to_text() const {
    std::ostringstream os;
    os << "n_agents " << n_agents << "\n";
    os << "variant actor_params critic_params total_params nets_updated_per_step"
          " ms_per_1000_steps\n";
    for (const auto& r : rows) {
        char ms[32];
        std::snprintf(ms, sizeof ms, "%.3f", r.ms_per_1000_steps);
        os << variant_name(r.variant) << " " << r.actor_params << " " << r.critic_params
           << " " << r.total_params << " " << r.nets_updated_per_step << " " << ms << "\n";
    }
    return os.str();
}

namespace {

// Synthetic transition stream, cheap enough to leave the timed region
// dominated by network updates.
Transition random_transition(const AgentLayout& lay, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Transition t;
    t.x.resize(lay.obs_total);
    t.x_next.resize(lay.obs_total);
    t.a.resize(lay.act_total);
    t.r.resize(lay.obs_dims.size());
    for (double& v : t.x) v = u(rng);
    for (double& v : t.x_next) v = u(rng);
    for (double& v : t.a) v = u(rng);
    for (double& v : t.r) v = u(rng);
    return t;
}

} // namespace

StructuralReport structural_report(const std::vector<TrainConfig>& cfgs,
                                   const ParticleEnv& env, int timing_steps) {
    StructuralReport report;
    report.n_agents = env.spec().n_agents;

    for (const auto& cfg : cfgs) {
        AgentEnsemble ens = make_ensemble(env.spec(), cfg);
        StructuralRow row;
        row.variant = cfg.variant;
        row.actor_params = ens.actor_params();
        row.critic_params = ens.critic_params();
        row.total_params = ens.total_params();
        row.nets_updated_per_step = ens.nets_updated_per_step();

        if (timing_steps > 0) {
            std::mt19937_64 rng(cfg.seed + 17);
            TrainConfig timing_cfg = cfg;
            timing_cfg.warmup = std::min(timing_cfg.warmup, timing_cfg.batch_size);

            ReplayMemory mem(cfg.replay_capacity, ens.layout.obs_total, ens.layout.act_total,
                             ens.n_agents);
            const long prefill = std::max<long>(timing_cfg.batch_size, timing_cfg.warmup);
            for (long k = 0; k < prefill; ++k) mem.push(random_transition(ens.layout, rng));

            std::vector<Transition> stream;
            stream.reserve(timing_steps);
            for (int k = 0; k < timing_steps; ++k)
                stream.push_back(random_transition(ens.layout, rng));

            const auto t0 = std::chrono::steady_clock::now();
            for (int k = 0; k < timing_steps; ++k)
                train_step(ens, mem, stream[k], timing_cfg, rng);
            const auto t1 = std::chrono::steady_clock::now();
            const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
            row.ms_per_1000_steps = ms * 1000.0 / timing_steps;
        }
        report.rows.push_back(row);
    }
    return report;
}

} // namespace psdpg
