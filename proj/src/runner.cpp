#include "psdpg/runner.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "psdpg/eval.hpp"

namespace psdpg {

namespace fs = std::filesystem;

namespace {

std::string fmt_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + path.string());
    os << content;
    if (!os) throw std::runtime_error("failed writing " + path.string());
}

struct MetricsBlock {
    std::vector<EpisodeRecord> records; // episode indices already 0..k-1
    std::vector<double> epsilons;       // one per record
};

void append_rows(std::ostringstream& os, const MetricsBlock& block, const char* phase) {
    std::vector<double> totals;
    totals.reserve(block.records.size());
    for (const auto& r : block.records) totals.push_back(r.total);
    const auto ma = moving_average(totals, 100);
    for (std::size_t k = 0; k < block.records.size(); ++k) {
        const auto& r = block.records[k];
        for (std::size_t i = 0; i < r.agent_returns.size(); ++i)
            os << r.episode << "," << i << "," << fmt_real(r.agent_returns[i]) << ","
               << fmt_real(r.total) << "," << fmt_real(ma[k]) << ","
               << fmt_real(block.epsilons[k]) << "," << phase << "\n";
    }
}

void dump_trajectories_csv(const fs::path& path, const ParticleEnv& env,
                           const AgentEnsemble& ens, int episodes, std::mt19937_64& rng) {
    std::ostringstream os;
    os << "episode,step,agent,ox,oy,ax,ay,reward\n";
    const int n = env.spec().n_agents;
    std::vector<std::vector<double>> actions(n);
    for (int e = 0; e < episodes; ++e) {
        auto [state, obs] = env.reset(rng);
        int step = 0;
        while (true) {
            for (int i = 0; i < n; ++i)
                actions[i] = select_action(ens.actor_for(i), obs[i], 0.0, rng);
            auto sr = env.step(state, actions, rng);
            for (int i = 0; i < n; ++i)
                os << e << "," << step << "," << i << "," << fmt_real(sr.state.pos[i].x)
                   << "," << fmt_real(sr.state.pos[i].y) << "," << fmt_real(actions[i][0])
                   << "," << fmt_real(actions[i][1]) << "," << fmt_real(sr.rewards[i])
                   << "\n";
            ++step;
            state = std::move(sr.state);
            obs = std::move(sr.obs);
            if (sr.done) break;
        }
    }
    write_file(path, os.str());
}

void run_train(const RunSpec& spec, const fs::path& dir, std::ostream& diag) {
    const ParticleEnv env = make_env(spec.env_name, spec.n_agents,
                                     spec.train.max_episode_length, spec.obs_noise);

    MetricsBlock train_block, eval_block;
    // Evaluation sweeps use their own stream so they cannot perturb training.
    std::mt19937_64 eval_rng(spec.train.seed + 0xA5A5A5A5A5A5A5A5ull);
    long cumulative_steps = 0;
    int eval_counter = 0;

    auto sweep = [&](const AgentEnsemble& ens) {
        auto records = evaluate(ens, env, spec.eval_episodes, eval_rng);
        for (auto& r : records) {
            r.episode = eval_counter++;
            eval_block.records.push_back(std::move(r));
            eval_block.epsilons.push_back(0.0);
        }
    };

    EpisodeObserver observer = [&](const AgentEnsemble& ens, const EpisodeRecord& rec) {
        cumulative_steps += rec.steps;
        train_block.records.push_back(rec);
        train_block.epsilons.push_back(exploration_epsilon(cumulative_steps - 1, spec.train));
        if (spec.eval_every > 0 && spec.eval_episodes > 0 &&
            (rec.episode + 1) % spec.eval_every == 0)
            sweep(ens);
    };

    TrainRun run = train(env, spec.train, observer);
    for (const auto& w : run.warnings) diag << "warning: " << w << "\n";
    if (spec.eval_episodes > 0) sweep(run.ensemble);

    std::ostringstream metrics;
    metrics << "episode,agent,return,total,ma100,epsilon,phase\n";
    append_rows(metrics, eval_block, "eval");   // "eval" < "train"
    append_rows(metrics, train_block, "train");
    write_file(dir / "metrics.csv", metrics.str());

    std::ostringstream nets;
    save_ensemble(nets, run.ensemble, spec.train.gamma, spec.train.tau);
    write_file(dir / "ensemble.nets", nets.str());

    if (spec.dump_trajectories) {
        std::mt19937_64 traj_rng(spec.train.seed + 0x5A5A5A5A5A5A5A5Aull);
        dump_trajectories_csv(dir / "trajectories.csv", env, run.ensemble,
                              std::max(spec.eval_episodes, 1), traj_rng);
    }
}

void run_compare(const RunSpec& spec, const fs::path& dir, std::ostream& diag) {
    const ParticleEnv env = make_env(spec.env_name, spec.n_agents,
                                     spec.train.max_episode_length, spec.obs_noise);
    std::vector<TrainConfig> cfgs;
    for (Variant v : {Variant::maddpg, Variant::v0, Variant::v1, Variant::v2}) {
        TrainConfig c = spec.train;
        c.variant = v;
        cfgs.push_back(c);
    }
    const auto report = structural_report(cfgs, env);

    std::ostringstream os;
    os << report.to_text();
    const auto& v0 = report.row(Variant::v0);
    os << "param_ratio_maddpg_over_v0 "
       << fmt_real(static_cast<double>(report.row(Variant::maddpg).total_params) /
                   static_cast<double>(v0.total_params))
       << "\n";
    os << "param_ratio_v1_over_v0 "
       << fmt_real(static_cast<double>(report.row(Variant::v1).total_params) /
                   static_cast<double>(v0.total_params))
       << "\n";
    os << "param_ratio_v2_over_v0 "
       << fmt_real(static_cast<double>(report.row(Variant::v2).total_params) /
                   static_cast<double>(v0.total_params))
       << "\n";
    write_file(dir / "structural.txt", os.str());
    diag << "structural comparison written for n_agents=" << spec.n_agents << "\n";
}

} // namespace

void run(const RunSpec& spec, RunMode mode, std::ostream& diag) {
    const fs::path dir(spec.out_dir);
    if (!fs::is_directory(dir))
        throw ConfigError("output directory '" + spec.out_dir + "' does not exist");

    RunSpec resolved = spec;
    write_file(dir / "config.echo", echo_config(resolved));

    if (mode == RunMode::train)
        run_train(resolved, dir, diag);
    else
        run_compare(resolved, dir, diag);
}

namespace {

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) throw ConfigError("empty entry in --seeds");
        try {
            seeds.push_back(std::stoull(item));
        } catch (const std::exception&) {
            throw ConfigError("bad seed '" + item + "' in --seeds");
        }
    }
    if (seeds.empty()) throw ConfigError("--seeds given but empty");
    return seeds;
}

} // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::string config_path, mode_str = "train", seeds_str, out_dir;

    try {
        for (std::size_t k = 0; k < args.size(); ++k) {
            const std::string& a = args[k];
            auto value = [&](const char* flag) -> const std::string& {
                if (k + 1 >= args.size())
                    throw ConfigError(std::string(flag) + " needs a value");
                return args[++k];
            };
            if (a == "--config") config_path = value("--config");
            else if (a == "--mode") mode_str = value("--mode");
            else if (a == "--seeds") seeds_str = value("--seeds");
            else if (a == "--out") out_dir = value("--out");
            else if (a == "--help" || a == "-h") {
                out << "usage: psdpg [--config <path>] [--mode train|compare]"
                       " [--seeds a,b,c] [--out <dir>]\n";
                return 0;
            } else {
                throw ConfigError("unknown flag '" + a + "'");
            }
        }

        RunMode mode;
        if (mode_str == "train") mode = RunMode::train;
        else if (mode_str == "compare") mode = RunMode::compare;
        else throw ConfigError("--mode must be 'train' or 'compare'");

        std::string text;
        if (!config_path.empty()) {
            std::ifstream is(config_path, std::ios::binary);
            if (!is) throw ConfigError("cannot read config file '" + config_path + "'");
            std::ostringstream buf;
            buf << is.rdbuf();
            text = buf.str();
        }
        RunSpec spec = parse_config(text);
        if (!out_dir.empty()) spec.out_dir = out_dir;

        if (seeds_str.empty()) {
            run(spec, mode, out);
        } else {
            const fs::path base(spec.out_dir);
            if (!fs::is_directory(base))
                throw ConfigError("output directory '" + spec.out_dir + "' does not exist");
            for (std::uint64_t s : parse_seed_list(seeds_str)) {
                RunSpec sub = spec;
                sub.train.seed = s;
                const fs::path sub_dir = base / ("seed_" + std::to_string(s));
                fs::create_directory(sub_dir);
                sub.out_dir = sub_dir.string();
                run(sub, mode, out);
            }
        }
        return 0;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace psdpg
