#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "psdpg/eval.hpp"
#include "psdpg/trainer.hpp"

using namespace psdpg;

namespace {

// Independent evaluation path for oracle arithmetic.
std::vector<double> naive_forward(const LayeredNet& net, std::vector<double> x) {
    for (const auto& l : net.layers) {
        std::vector<double> y(l.out, 0.0);
        for (int r = 0; r < l.out; ++r) {
            double s = l.b[r];
            for (int c = 0; c < l.in; ++c) s += l.wat(r, c) * x[c];
            switch (l.act) {
            case Activation::relu: y[r] = s > 0.0 ? s : 0.0; break;
            case Activation::tanh: y[r] = std::tanh(s); break;
            case Activation::identity: y[r] = s; break;
            }
        }
        x = std::move(y);
    }
    return x;
}

EnvSpec toy_spec(int n_agents, int obs_dim = 1, int act_dim = 1) {
    EnvSpec spec;
    spec.n_agents = n_agents;
    spec.obs_dims.assign(n_agents, obs_dim);
    spec.act_dims.assign(n_agents, act_dim);
    spec.reward_sharing = true;
    spec.exchangeable = true;
    spec.max_episode_length = 10;
    return spec;
}

TrainConfig toy_cfg(Variant v, std::uint64_t seed = 0) {
    TrainConfig cfg;
    cfg.variant = v;
    cfg.seed = seed;
    cfg.actor_hidden = {3};
    cfg.critic_hidden = {4};
    cfg.v2_shared_sizes = {4};
    cfg.v2_head_sizes = {3};
    return cfg;
}

std::vector<Transition> random_batch(const AgentLayout& lay, int s, std::uint64_t seed,
                                     bool terminal = false) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Transition> batch(s);
    for (auto& t : batch) {
        t.x.resize(lay.obs_total);
        t.a.resize(lay.act_total);
        t.r.resize(lay.obs_dims.size());
        t.x_next.resize(lay.obs_total);
        for (double& v : t.x) v = u(rng);
        for (double& v : t.a) v = u(rng);
        for (double& v : t.r) v = u(rng);
        for (double& v : t.x_next) v = u(rng);
        t.terminal = terminal;
    }
    return batch;
}

std::string ensemble_fingerprint(const AgentEnsemble& ens) {
    std::ostringstream os;
    save_ensemble(os, ens, 0.0, 0.0);
    return os.str();
}

bool grads_close(const GradientSet& a, const GradientSet& b, double tol) {
    REQUIRE(a.layers.size() == b.layers.size());
    for (std::size_t k = 0; k < a.layers.size(); ++k) {
        for (std::size_t i = 0; i < a.layers[k].w.size(); ++i)
            if (std::fabs(a.layers[k].w[i] - b.layers[k].w[i]) > tol) return false;
        for (std::size_t i = 0; i < a.layers[k].b.size(); ++i)
            if (std::fabs(a.layers[k].b[i] - b.layers[k].b[i]) > tol) return false;
    }
    return true;
}

} // namespace

TEST_CASE("exploration schedule endpoints and midpoint") {
    TrainConfig cfg;
    cfg.eps_start = 1.0;
    cfg.eps_end = 0.02;
    cfg.eps_decay_steps = 600000;
    CHECK(exploration_epsilon(0, cfg) == 1.0);
    CHECK(exploration_epsilon(600000, cfg) == 0.02);
    CHECK(exploration_epsilon(10000000, cfg) == 0.02);
    CHECK(exploration_epsilon(300000, cfg) == doctest::Approx(0.51).epsilon(1e-12));
}

TEST_CASE("exploration schedule is piecewise linear") {
    TrainConfig cfg;
    cfg.eps_start = 1.0;
    cfg.eps_end = 0.02;
    cfg.eps_decay_steps = 600000;
    for (int k = 0; k <= 100; ++k) {
        const long step = cfg.eps_decay_steps * k / 100;
        const double expect =
            1.0 + (0.02 - 1.0) * (static_cast<double>(step) / cfg.eps_decay_steps);
        CHECK(exploration_epsilon(step, cfg) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("action noise has the requested scale") {
    std::mt19937_64 rng(71);
    const int samples = 10000;
    double sum = 0.0, sq = 0.0;
    for (int k = 0; k < samples; ++k) {
        const auto n = action_noise(1, 1.0, rng);
        sum += n[0];
        sq += n[0] * n[0];
    }
    const double mean = sum / samples;
    const double stddev = std::sqrt(sq / samples - mean * mean);
    CHECK(std::fabs(stddev - 1.0) < 0.03);
    CHECK(std::fabs(mean) < 0.05);
}

TEST_CASE("select_action with eps 0 is the clipped deterministic policy") {
    const auto actor = init_net({2, 3, 2},
                                {Activation::relu, Activation::tanh}, 5);
    std::mt19937_64 rng(1);
    const std::vector<double> obs{0.4, -0.7};
    const auto a1 = select_action(actor, obs, 0.0, rng);
    const auto a2 = select_action(actor, obs, 0.0, rng);
    CHECK(a1 == a2);
    CHECK(a1 == forward(actor, obs)); // tanh output already sits inside [-1,1]
    for (double v : a1) {
        CHECK(v >= -1.0);
        CHECK(v <= 1.0);
    }
    CHECK_THROWS_AS(select_action(actor, {0.1}, 0.0, rng), ShapeError);
}

TEST_CASE("select_action with noise stays clipped") {
    const auto actor = init_net({2, 2}, {Activation::tanh}, 6);
    std::mt19937_64 rng(2);
    for (int k = 0; k < 200; ++k) {
        const auto a = select_action(actor, {0.9, -0.9}, 2.0, rng);
        for (double v : a) {
            CHECK(v >= -1.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("bellman targets reduce to rewards when gamma is zero") {
    const auto spec = toy_spec(2);
    const auto ens = make_ensemble(spec, toy_cfg(Variant::v0));
    const auto batch = random_batch(ens.layout, 6, 3);
    const auto y = bellman_targets_all(ens, batch, 0.0);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 6; ++j) CHECK(y[i][j] == batch[j].r[i]);
}

TEST_CASE("terminal transitions ignore the target critic") {
    const auto spec = toy_spec(2);
    for (Variant v : {Variant::maddpg, Variant::v0, Variant::v1, Variant::v2}) {
        const auto ens = make_ensemble(spec, toy_cfg(v));
        const auto batch = random_batch(ens.layout, 5, 4, /*terminal=*/true);
        const auto y = bellman_targets_all(ens, batch, 0.99);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 5; ++j) CHECK(y[i][j] == batch[j].r[i]);
    }
}

TEST_CASE("bellman target matches hand arithmetic on a 2-agent 1-D toy") {
    const auto spec = toy_spec(2);
    TrainConfig cfg = toy_cfg(Variant::v0);
    cfg.actor_hidden = {};
    cfg.critic_hidden = {};
    auto ens = make_ensemble(spec, cfg);

    // single tanh actor layer and a linear critic with hand-set weights
    ens.target_actors[0].layers[0].w = {0.8};
    ens.target_actors[0].layers[0].b = {0.1};
    ens.target_critics[0].layers[0].w = {0.3, -0.2, 0.5, 0.7};
    ens.target_critics[0].layers[0].b = {0.05};

    Transition t;
    t.x = {0.2, -0.4};
    t.a = {0.0, 0.0};
    t.r = {1.5, -2.5};
    t.x_next = {0.6, -0.1};
    t.terminal = false;

    const double gamma = 0.9;
    const auto y = bellman_targets_all(ens, {t}, gamma);

    const double a1 = std::tanh(0.8 * 0.6 + 0.1);
    const double a2 = std::tanh(0.8 * -0.1 + 0.1);
    const double q = 0.3 * 0.6 - 0.2 * -0.1 + 0.5 * a1 + 0.7 * a2 + 0.05;
    CHECK(y[0][0] == doctest::Approx(1.5 + gamma * q).epsilon(1e-12));
    CHECK(y[1][0] == doctest::Approx(-2.5 + gamma * q).epsilon(1e-12));
}

TEST_CASE("per-agent bellman_targets agrees with the batched form") {
    const auto spec = toy_spec(3, 2, 1);
    for (Variant v : {Variant::maddpg, Variant::v0, Variant::v1, Variant::v2}) {
        const auto ens = make_ensemble(spec, toy_cfg(v, 9));
        const auto batch = random_batch(ens.layout, 4, 10);
        const auto all = bellman_targets_all(ens, batch, 0.97);
        for (int i = 0; i < 3; ++i) CHECK(bellman_targets(ens, batch, i, 0.97) == all[i]);
    }
}

TEST_CASE("a critic that already fits its targets keeps its parameters") {
    const auto spec = toy_spec(2);
    TrainConfig cfg = toy_cfg(Variant::v0);
    cfg.gamma = 0.0;
    auto ens = make_ensemble(spec, cfg);

    auto batch = random_batch(ens.layout, 4, 11);
    for (auto& t : batch) std::fill(t.r.begin(), t.r.end(), 0.0);
    // zero critic means Q == 0 == y everywhere
    for (auto& l : ens.critics[0].layers) {
        std::fill(l.w.begin(), l.w.end(), 0.0);
        std::fill(l.b.begin(), l.b.end(), 0.0);
    }
    const auto before = ensemble_fingerprint(ens);
    const double loss = critic_update(ens, batch, cfg, 0);
    CHECK(loss == 0.0);
    CHECK(ensemble_fingerprint(ens) == before);
    CHECK(ens.critic_opt[0].step == 1);
}

TEST_CASE("critic loss equals the independently computed residual mean") {
    const auto spec = toy_spec(2, 2, 2);
    for (Variant v : {Variant::maddpg, Variant::v0, Variant::v1, Variant::v2}) {
        const auto ens = make_ensemble(spec, toy_cfg(v, 21));
        const auto batch = random_batch(ens.layout, 8, 22);
        const auto targets = bellman_targets_all(ens, batch, 0.9);
        const auto ev = critic_gradient(ens, batch, targets, 1);

        double sq = 0.0;
        long pairs = 0;
        for (std::size_t j = 0; j < batch.size(); ++j) {
            std::vector<double> u = batch[j].x;
            u.insert(u.end(), batch[j].a.begin(), batch[j].a.end());
            if (v == Variant::v0) {
                const double q = naive_forward(ens.critics[0], u)[0];
                sq += (q - targets[1][j]) * (q - targets[1][j]);
                ++pairs;
            } else if (v == Variant::v2) {
                const auto trunk_out = naive_forward(ens.head_critic->trunk, u);
                for (int i = 0; i < 2; ++i) {
                    const double q = naive_forward(ens.head_critic->heads[i], trunk_out)[0];
                    sq += (q - targets[i][j]) * (q - targets[i][j]);
                    ++pairs;
                }
            } else {
                for (int i = 0; i < 2; ++i) {
                    const double q = naive_forward(ens.critics[i], u)[0];
                    sq += (q - targets[i][j]) * (q - targets[i][j]);
                    ++pairs;
                }
            }
        }
        CHECK(ev.loss == doctest::Approx(sq / pairs).epsilon(1e-12));
    }
}

TEST_CASE("v2 trunk gradient averages the single-head chains") {
    const auto spec = toy_spec(2, 2, 1);
    auto ens = make_ensemble(spec, toy_cfg(Variant::v2, 31));
    ens.head_critic->heads[1] = ens.head_critic->heads[0]; // identical heads

    const auto batch = random_batch(ens.layout, 5, 32);
    const int s = static_cast<int>(batch.size());
    std::vector<std::vector<double>> targets(2, std::vector<double>(s));
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int j = 0; j < s; ++j) targets[0][j] = targets[1][j] = u(rng);

    const auto ev = critic_gradient(ens, batch, targets, -1);
    CHECK(grads_close(ev.grads[1], ev.grads[2], 0.0)); // per-head gradients identical

    // single-head trunk chains rebuilt from the public primitives
    const auto& trunk = ens.head_critic->trunk;
    std::vector<GradientSet> single(2, make_zero_gradients(trunk));
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < s; ++j) {
            std::vector<double> in = batch[j].x;
            in.insert(in.end(), batch[j].a.begin(), batch[j].a.end());
            const auto trunk_out = forward(trunk, in);
            const double q = forward(ens.head_critic->heads[i], trunk_out)[0];
            const auto head_bw = backward(ens.head_critic->heads[i], trunk_out,
                                          {2.0 * (q - targets[i][j]) / s});
            const auto trunk_bw = backward(trunk, in, head_bw.input_grad);
            for (std::size_t k = 0; k < single[i].layers.size(); ++k) {
                for (std::size_t w = 0; w < single[i].layers[k].w.size(); ++w)
                    single[i].layers[k].w[w] += trunk_bw.grads.layers[k].w[w];
                for (std::size_t b = 0; b < single[i].layers[k].b.size(); ++b)
                    single[i].layers[k].b[b] += trunk_bw.grads.layers[k].b[b];
            }
        }
    }
    GradientSet avg = make_zero_gradients(trunk);
    for (std::size_t k = 0; k < avg.layers.size(); ++k) {
        for (std::size_t w = 0; w < avg.layers[k].w.size(); ++w)
            avg.layers[k].w[w] = 0.5 * (single[0].layers[k].w[w] + single[1].layers[k].w[w]);
        for (std::size_t b = 0; b < avg.layers[k].b.size(); ++b)
            avg.layers[k].b[b] = 0.5 * (single[0].layers[k].b[b] + single[1].layers[k].b[b]);
    }
    CHECK(grads_close(ev.grads[0], avg, 1e-12));
}

TEST_CASE("a critic blind to actions leaves the actor unchanged") {
    const auto spec = toy_spec(2);
    TrainConfig cfg = toy_cfg(Variant::v0);
    auto ens = make_ensemble(spec, cfg);
    // zero the first-layer weights that read the action slots
    auto& first = ens.critics[0].layers[0];
    for (int r = 0; r < first.out; ++r)
        for (int c = ens.layout.obs_total; c < first.in; ++c) first.wat(r, c) = 0.0;

    const auto batch = random_batch(ens.layout, 4, 41);
    const auto actor_before = ens.actors[0];
    actor_update(ens, batch, cfg, 0);
    CHECK(ens.actors[0].layers[0].w == actor_before.layers[0].w);
    CHECK(ens.actors[0].layers[1].w == actor_before.layers[1].w);
    CHECK(ens.actor_opt[0].step == 1);
}

TEST_CASE("chained actor gradient matches finite differences of J") {
    const auto spec = toy_spec(1);
    TrainConfig cfg = toy_cfg(Variant::maddpg, 51);
    auto ens = make_ensemble(spec, cfg);
    // smooth activations keep the finite differences clean
    ens.actors[0].layers[0].act = Activation::tanh;
    ens.critics[0].layers[0].act = Activation::tanh;

    const auto batch = random_batch(ens.layout, 16, 52);
    const auto g = actor_policy_gradient(ens, batch, 0);

    auto objective = [&](const LayeredNet& actor) {
        double total = 0.0;
        for (const auto& t : batch) {
            const auto a = naive_forward(actor, {t.x[0]});
            const double q = naive_forward(ens.critics[0], {t.x[0], a[0]})[0];
            total += q;
        }
        return total / static_cast<double>(batch.size());
    };

    const double h = 1e-5;
    for (std::size_t k = 0; k < ens.actors[0].layers.size(); ++k) {
        auto probe = [&](std::vector<double>& params, const std::vector<double>& grad) {
            for (std::size_t i = 0; i < params.size(); ++i) {
                const double keep = params[i];
                params[i] = keep + h;
                const double up = objective(ens.actors[0]);
                params[i] = keep - h;
                const double dn = objective(ens.actors[0]);
                params[i] = keep;
                const double fd = (up - dn) / (2 * h);
                const double diff = std::fabs(grad[i] - fd);
                const bool ok =
                    diff <= 1e-7 ||
                    diff <= 1e-4 * std::max(std::fabs(grad[i]), std::fabs(fd));
                CHECK(ok);
            }
        };
        probe(ens.actors[0].layers[k].w, g.layers[k].w);
        probe(ens.actors[0].layers[k].b, g.layers[k].b);
    }
}

TEST_CASE("v0 gradients agree across agent choices on a symmetric batch") {
    const auto spec = toy_spec(2);
    auto ens = make_ensemble(spec, toy_cfg(Variant::v0, 61));
    // mirror the critic's first-layer columns across the two agents
    auto& first = ens.critics[0].layers[0];
    for (int r = 0; r < first.out; ++r) {
        first.wat(r, 1) = first.wat(r, 0); // o2 column := o1 column
        first.wat(r, 3) = first.wat(r, 2); // a2 column := a1 column
    }

    auto batch = random_batch(ens.layout, 6, 62);
    for (auto& t : batch) {
        t.x[1] = t.x[0];
        t.a[1] = t.a[0];
        t.r[1] = t.r[0];
        t.x_next[1] = t.x_next[0];
    }
    const auto g0 = actor_policy_gradient(ens, batch, 0);
    const auto g1 = actor_policy_gradient(ens, batch, 1);
    CHECK(grads_close(g0, g1, 0.0));
}

TEST_CASE("actor ascent increases the batch Q under a concave critic") {
    const auto spec = toy_spec(1);
    TrainConfig cfg = toy_cfg(Variant::maddpg, 71);
    cfg.lr_actor = 1e-4;
    auto ens = make_ensemble(spec, cfg);

    // Q(x, a) = -|a - 0.5|, a relu tent frozen in place of the critic
    const double peak = 0.5;
    LayeredNet tent;
    tent.input_dim = 2;
    tent.output_dim = 1;
    tent.layers.push_back({2, 2, Activation::relu, {0.0, 1.0, 0.0, -1.0}, {-peak, peak}});
    tent.layers.push_back({2, 1, Activation::identity, {-1.0, -1.0}, {0.0}});
    ens.critics[0] = tent;

    const auto batch = random_batch(ens.layout, 8, 72);
    auto mean_q = [&]() {
        double total = 0.0;
        for (const auto& t : batch) {
            const auto a = naive_forward(ens.actors[0], {t.x[0]});
            total += naive_forward(ens.critics[0], {t.x[0], a[0]})[0];
        }
        return total / static_cast<double>(batch.size());
    };

    const double before = mean_q();
    actor_update(ens, batch, cfg, 0);
    CHECK(mean_q() > before);
}

TEST_CASE("train_step waits for warmup, then reports per-variant update counts") {
    const auto spec = toy_spec(3);
    std::mt19937_64 rng(81);
    const auto stream = random_batch(AgentLayout::from_spec(spec), 40, 82);

    const std::pair<Variant, int> expected[] = {
        {Variant::maddpg, 6}, {Variant::v0, 2}, {Variant::v1, 4}, {Variant::v2, 2}};
    for (const auto& [variant, nets] : expected) {
        TrainConfig cfg = toy_cfg(variant, 83);
        cfg.batch_size = 4;
        cfg.warmup = 10;
        auto ens = make_ensemble(spec, cfg);
        ReplayMemory mem(64, ens.layout.obs_total, ens.layout.act_total, 3);

        const auto before = ensemble_fingerprint(ens);
        for (int k = 0; k < 9; ++k) {
            const auto rep = train_step(ens, mem, stream[k], cfg, rng);
            CHECK_FALSE(rep.updated);
            CHECK(rep.nets_updated == 0);
        }
        CHECK(ensemble_fingerprint(ens) == before); // memory grows, nothing learns
        const auto rep = train_step(ens, mem, stream[9], cfg, rng);
        CHECK(rep.updated);
        CHECK(rep.nets_updated == nets);
        CHECK(ens.nets_updated_per_step() == nets);
        if (variant == Variant::v0) {
            CHECK(rep.chosen_agent >= 0);
            CHECK(rep.chosen_agent < 3);
        }
        CHECK(ensemble_fingerprint(ens) != before);
    }
}

TEST_CASE("targets start equal to online nets and lag afterwards") {
    const auto spec = toy_spec(2);
    TrainConfig cfg = toy_cfg(Variant::v1, 91);
    cfg.batch_size = 4;
    cfg.warmup = 4;
    auto ens = make_ensemble(spec, cfg);

    std::ostringstream on, tg;
    for (const auto& n : ens.actors) save_net(on, n);
    for (const auto& n : ens.target_actors) save_net(tg, n);
    for (const auto& n : ens.critics) save_net(on, n);
    for (const auto& n : ens.target_critics) save_net(tg, n);
    CHECK(on.str() == tg.str());

    std::mt19937_64 rng(92);
    const auto stream = random_batch(ens.layout, 12, 93);
    ReplayMemory mem(64, ens.layout.obs_total, ens.layout.act_total, 2);
    for (const auto& t : stream) train_step(ens, mem, t, cfg, rng);

    bool any_gap = false;
    for (std::size_t k = 0; k < ens.actors.size() && !any_gap; ++k)
        any_gap = ens.actors[k].layers[0].w != ens.target_actors[k].layers[0].w;
    for (std::size_t k = 0; k < ens.critics.size() && !any_gap; ++k)
        any_gap = ens.critics[k].layers[0].w != ens.target_critics[k].layers[0].w;
    CHECK(any_gap);
}

TEST_CASE("shared actors answer identical observations identically") {
    const auto spec = toy_spec(3, 4, 2);
    std::mt19937_64 rng(101);
    const std::vector<double> obs{0.1, -0.2, 0.3, -0.4};
    for (Variant v : {Variant::v0, Variant::v1, Variant::v2}) {
        const auto ens = make_ensemble(spec, toy_cfg(v, 102));
        const auto a0 = select_action(ens.actor_for(0), obs, 0.0, rng);
        const auto a1 = select_action(ens.actor_for(1), obs, 0.0, rng);
        const auto a2 = select_action(ens.actor_for(2), obs, 0.0, rng);
        CHECK(a0 == a1);
        CHECK(a0 == a2);
    }
    const auto maddpg = make_ensemble(spec, toy_cfg(Variant::maddpg, 103));
    CHECK(select_action(maddpg.actor_for(0), obs, 0.0, rng) !=
          select_action(maddpg.actor_for(1), obs, 0.0, rng));
}

TEST_CASE("shared variants reject non-uniform agent dimensions") {
    EnvSpec uneven = toy_spec(2);
    uneven.obs_dims = {1, 2};
    for (Variant v : {Variant::v0, Variant::v1, Variant::v2})
        CHECK_THROWS_AS(make_ensemble(uneven, toy_cfg(v)), InvalidSpecError);
    CHECK_NOTHROW(make_ensemble(uneven, toy_cfg(Variant::maddpg)));
}

TEST_CASE("training is deterministic end to end") {
    const ParticleEnv env(EnvKind::coop_spread, 2, 10);
    TrainConfig cfg = toy_cfg(Variant::v0, 111);
    cfg.total_steps = 220;
    cfg.batch_size = 8;
    cfg.warmup = 32;
    cfg.eps_decay_steps = 100;
    const auto a = train(env, cfg);
    const auto b = train(env, cfg);
    REQUIRE(a.episodes.size() == b.episodes.size());
    for (std::size_t k = 0; k < a.episodes.size(); ++k) {
        CHECK(a.episodes[k].total == b.episodes[k].total);
        CHECK(a.episodes[k].agent_returns == b.episodes[k].agent_returns);
    }
    CHECK(ensemble_fingerprint(a.ensemble) == ensemble_fingerprint(b.ensemble));
}

TEST_CASE("zero total_steps trains nothing") {
    const ParticleEnv env(EnvKind::coop_spread, 2, 10);
    TrainConfig cfg = toy_cfg(Variant::v0, 121);
    cfg.total_steps = 0;
    const auto run = train(env, cfg);
    CHECK(run.episodes.empty());
    CHECK(ensemble_fingerprint(run.ensemble) ==
          ensemble_fingerprint(make_ensemble(env.spec(), cfg)));
}

TEST_CASE("v0 on per-agent rewards runs with a warning") {
    const ParticleEnv env(EnvKind::assigned_targets, 2, 10);
    TrainConfig cfg = toy_cfg(Variant::v0, 131);
    cfg.total_steps = 40;
    cfg.warmup = 16;
    cfg.batch_size = 8;
    const auto run = train(env, cfg);
    REQUIRE(run.warnings.size() == 1);
    CHECK(run.warnings[0].find("reward sharing") != std::string::npos);
    const auto v1_run = train(env, [&] {
        TrainConfig c = cfg;
        c.variant = Variant::v1;
        return c;
    }());
    CHECK(v1_run.warnings.empty());
}

TEST_CASE("ensemble serialization round trips") {
    const auto spec = toy_spec(2, 3, 2);
    for (Variant v : {Variant::maddpg, Variant::v0, Variant::v1, Variant::v2}) {
        const auto ens = make_ensemble(spec, toy_cfg(v, 141));
        std::stringstream ss;
        save_ensemble(ss, ens, 0.99, 0.01);
        const auto loaded = load_ensemble(ss);
        CHECK(loaded.gamma == 0.99);
        CHECK(loaded.tau == 0.01);
        CHECK(loaded.ensemble.variant == v);
        CHECK(ensemble_fingerprint(loaded.ensemble) == ensemble_fingerprint(ens));
    }
}
