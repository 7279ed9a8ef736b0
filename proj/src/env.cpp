#include "psdpg/env.hpp"

#include <algorithm>
#include <cmath>

namespace psdpg {

namespace {

double clampd(double x, double lo, double hi) { return x < lo ? lo : (x > hi ? hi : x); }

double dist(const Vec2& a, const Vec2& b) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

} // namespace

ParticleEnv::ParticleEnv(EnvKind kind, int n_agents, int max_episode_length,
                         double obs_noise)
    : kind_(kind), obs_noise_(obs_noise) {
    if (n_agents < 1) throw InvalidSpecError("ParticleEnv: need at least one agent");
    if (max_episode_length < 1)
        throw InvalidSpecError("ParticleEnv: max_episode_length must be positive");
    if (obs_noise < 0.0) throw InvalidSpecError("ParticleEnv: negative obs noise");

    const int base = 4 + 2 * n_agents + 2 * (n_agents - 1);
    const int obs_dim = base + (kind == EnvKind::id_tagged_spread ? n_agents : 0);

    spec_.n_agents = n_agents;
    spec_.obs_dims.assign(n_agents, obs_dim);
    spec_.act_dims.assign(n_agents, 2);
    spec_.reward_sharing = kind != EnvKind::assigned_targets;
    spec_.exchangeable = kind == EnvKind::coop_spread;
    spec_.max_episode_length = max_episode_length;
}

ParticleEnv::ResetResult ParticleEnv::reset(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> u(-kArenaHalf, kArenaHalf);
    ResetResult res;
    auto& st = res.state;
    st.pos.resize(spec_.n_agents);
    st.vel.assign(spec_.n_agents, Vec2{});
    st.landmarks.resize(spec_.n_agents);
    for (auto& p : st.pos) {
        p.x = u(rng);
        p.y = u(rng);
    }
    for (auto& p : st.landmarks) {
        p.x = u(rng);
        p.y = u(rng);
    }
    st.step = 0;
    res.obs = observe(st, obs_noise_ > 0.0 ? &rng : nullptr);
    return res;
}

std::vector<std::vector<double>> ParticleEnv::observe(const EnvState& state,
                                                      std::mt19937_64* noise_rng) const {
    const int n = spec_.n_agents;
    std::vector<std::vector<double>> all(n);
    std::vector<std::pair<double, double>> offsets;
    for (int i = 0; i < n; ++i) {
        auto& o = all[i];
        o.reserve(spec_.obs_dims[i]);
        o.push_back(state.pos[i].x);
        o.push_back(state.pos[i].y);
        o.push_back(state.vel[i].x);
        o.push_back(state.vel[i].y);
        for (const auto& lm : state.landmarks) {
            o.push_back(lm.x - state.pos[i].x);
            o.push_back(lm.y - state.pos[i].y);
        }
        offsets.clear();
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            offsets.emplace_back(state.pos[j].x - state.pos[i].x,
                                 state.pos[j].y - state.pos[i].y);
        }
        std::sort(offsets.begin(), offsets.end());
        for (const auto& [dx, dy] : offsets) {
            o.push_back(dx);
            o.push_back(dy);
        }
        if (noise_rng && obs_noise_ > 0.0) {
            std::uniform_real_distribution<double> noise(-obs_noise_, obs_noise_);
            for (double& v : o) v += noise(*noise_rng);
        }
        if (kind_ == EnvKind::id_tagged_spread)
            for (int j = 0; j < n; ++j) o.push_back(j == i ? 1.0 : 0.0);
    }
    return all;
}

std::vector<double> ParticleEnv::rewards(const EnvState& state) const {
    const int n = spec_.n_agents;
    std::vector<double> r(n, 0.0);
    if (kind_ == EnvKind::assigned_targets) {
        for (int i = 0; i < n; ++i) r[i] = -dist(state.pos[i], state.landmarks[i]);
        return r;
    }
    double shared = 0.0;
    for (const auto& lm : state.landmarks) {
        double best = dist(state.pos[0], lm);
        for (int i = 1; i < n; ++i) best = std::min(best, dist(state.pos[i], lm));
        shared -= best;
    }
    std::fill(r.begin(), r.end(), shared);
    return r;
}

ParticleEnv::StepResult ParticleEnv::step(const EnvState& state,
                                          const std::vector<std::vector<double>>& actions,
                                          std::mt19937_64& rng) const {
    const int n = spec_.n_agents;
    if (static_cast<int>(actions.size()) != n)
        throw ShapeError("step: expected one action per agent");
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(actions[i].size()) != spec_.act_dims[i])
            throw ShapeError("step: action dimension mismatch for agent " + std::to_string(i));
        for (double v : actions[i])
            if (!std::isfinite(v)) throw NumericError("step: non-finite action");
    }
    if (state.step >= spec_.max_episode_length)
        throw InvalidSpecError("step: episode already finished");

    StepResult res;
    res.state = state;
    auto& st = res.state;
    for (int i = 0; i < n; ++i) {
        st.pos[i].x = clampd(st.pos[i].x + kDt * st.vel[i].x, -kArenaHalf, kArenaHalf);
        st.pos[i].y = clampd(st.pos[i].y + kDt * st.vel[i].y, -kArenaHalf, kArenaHalf);
        const double ax = clampd(actions[i][0], -1.0, 1.0);
        const double ay = clampd(actions[i][1], -1.0, 1.0);
        st.vel[i].x += kDt * ax - kDrag * st.vel[i].x;
        st.vel[i].y += kDt * ay - kDrag * st.vel[i].y;
    }
    st.step = state.step + 1;
    res.obs = observe(st, obs_noise_ > 0.0 ? &rng : nullptr);
    res.rewards = rewards(st);
    res.done = st.step >= spec_.max_episode_length;
    return res;
}

ParticleEnv make_env(const std::string& name, int n_agents, int max_episode_length,
                     double obs_noise) {
    EnvKind kind;
    if (name == "coop_spread")
        kind = EnvKind::coop_spread;
    else if (name == "assigned_targets")
        kind = EnvKind::assigned_targets;
    else if (name == "id_tagged_spread")
        kind = EnvKind::id_tagged_spread;
    else
        throw InvalidSpecError("unknown environment '" + name + "'");
    return ParticleEnv(kind, n_agents, max_episode_length, obs_noise);
}

double multi_ant_reward(double v, const std::vector<double>& contact_forces,
                        const std::vector<double>& action, double survival,
                        double c_ctrl) {
    double contact = 0.0;
    for (double f : contact_forces) {
        const double c = clampd(f, -1.0, 1.0);
        contact += c * c;
    }
    double control = 0.0;
    for (double a : action) control += a * a;
    return v - 5e-4 * contact - c_ctrl * control + survival;
}

} // namespace psdpg
