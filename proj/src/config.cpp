#include "psdpg/config.hpp"

#include <climits>
#include <cstdio>
#include <map>
#include <sstream>

namespace psdpg {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& v, int line) {
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        throw ConfigError("expected a real number, got '" + v + "'", line);
    }
    if (used != v.size()) throw ConfigError("trailing characters in number '" + v + "'", line);
    return x;
}

long parse_long(const std::string& v, int line) {
    std::size_t used = 0;
    long x = 0;
    try {
        x = std::stol(v, &used);
    } catch (const std::exception&) {
        throw ConfigError("expected an integer, got '" + v + "'", line);
    }
    if (used != v.size()) throw ConfigError("trailing characters in integer '" + v + "'", line);
    return x;
}

int parse_int(const std::string& v, int line) {
    const long x = parse_long(v, line);
    if (x < INT_MIN || x > INT_MAX) throw ConfigError("integer out of range", line);
    return static_cast<int>(x);
}

bool parse_bool(const std::string& v, int line) {
    if (v == "1" || v == "true" || v == "on") return true;
    if (v == "0" || v == "false" || v == "off") return false;
    throw ConfigError("expected a boolean, got '" + v + "'", line);
}

std::vector<int> parse_int_list(const std::string& v, int line) {
    std::vector<int> out;
    if (v == "none") return out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError("empty list element", line);
        out.push_back(parse_int(item, line));
    }
    return out;
}

std::string fmt_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fmt_list(const std::vector<int>& v) {
    if (v.empty()) return "none";
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(v[i]);
    }
    return out;
}

} // namespace

RunSpec parse_config(const std::string& text) {
    RunSpec spec;
    std::map<std::string, int> seen; // key -> line, also drives validation lines
    bool shapes_paper = false;
    int shapes_line = 0;

    std::istringstream is(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected 'key = value'", line_no);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("missing key", line_no);
        if (value.empty()) throw ConfigError("missing value for '" + key + "'", line_no);
        if (seen.count(key)) throw ConfigError("duplicate key '" + key + "'", line_no);
        seen[key] = line_no;

        TrainConfig& t = spec.train;
        if (key == "variant") {
            try {
                t.variant = variant_from_name(value);
            } catch (const InvalidSpecError& e) {
                throw ConfigError(e.what(), line_no);
            }
        } else if (key == "gamma") t.gamma = parse_double(value, line_no);
        else if (key == "tau") t.tau = parse_double(value, line_no);
        else if (key == "lr_actor") t.lr_actor = parse_double(value, line_no);
        else if (key == "lr_critic") t.lr_critic = parse_double(value, line_no);
        else if (key == "batch_size") t.batch_size = parse_int(value, line_no);
        else if (key == "warmup") t.warmup = parse_int(value, line_no);
        else if (key == "eps_start") t.eps_start = parse_double(value, line_no);
        else if (key == "eps_end") t.eps_end = parse_double(value, line_no);
        else if (key == "eps_decay_steps") t.eps_decay_steps = parse_long(value, line_no);
        else if (key == "total_steps") t.total_steps = parse_long(value, line_no);
        else if (key == "max_episode_length") t.max_episode_length = parse_int(value, line_no);
        else if (key == "seed") t.seed = static_cast<std::uint64_t>(parse_long(value, line_no));
        else if (key == "replay_capacity") t.replay_capacity = parse_long(value, line_no);
        else if (key == "actor_hidden") t.actor_hidden = parse_int_list(value, line_no);
        else if (key == "critic_hidden") t.critic_hidden = parse_int_list(value, line_no);
        else if (key == "v2_shared_sizes") t.v2_shared_sizes = parse_int_list(value, line_no);
        else if (key == "v2_head_sizes") t.v2_head_sizes = parse_int_list(value, line_no);
        else if (key == "env") spec.env_name = value;
        else if (key == "n_agents") spec.n_agents = parse_int(value, line_no);
        else if (key == "out_dir") spec.out_dir = value;
        else if (key == "eval_every") spec.eval_every = parse_int(value, line_no);
        else if (key == "eval_episodes") spec.eval_episodes = parse_int(value, line_no);
        else if (key == "obs_noise") spec.obs_noise = parse_double(value, line_no);
        else if (key == "dump_trajectories") spec.dump_trajectories = parse_bool(value, line_no);
        else if (key == "shapes") {
            if (value == "paper") shapes_paper = true;
            else if (value == "desk") shapes_paper = false;
            else throw ConfigError("shapes must be 'desk' or 'paper'", line_no);
            shapes_line = line_no;
        } else {
            throw ConfigError("unknown key '" + key + "'", line_no);
        }
    }

    if (shapes_paper) {
        if (!seen.count("actor_hidden")) spec.train.actor_hidden = {500, 128};
        if (!seen.count("critic_hidden")) spec.train.critic_hidden = {500, 300, 128};
        if (!seen.count("v2_shared_sizes")) spec.train.v2_shared_sizes = {500, 300};
        if (!seen.count("v2_head_sizes")) spec.train.v2_head_sizes = {128};
        (void)shapes_line;
    }

    auto line_of = [&](const char* a, const char* b = nullptr) {
        int l = 0;
        if (seen.count(a)) l = seen[a];
        if (b && seen.count(b)) l = std::max(l, seen[b]);
        return l;
    };

    const TrainConfig& t = spec.train;
    if (t.gamma < 0.0 || t.gamma > 1.0)
        throw ConfigError("gamma must lie in [0,1]", line_of("gamma"));
    if (t.tau <= 0.0 || t.tau > 1.0)
        throw ConfigError("tau must lie in (0,1]", line_of("tau"));
    if (t.lr_actor <= 0.0) throw ConfigError("lr_actor must be positive", line_of("lr_actor"));
    if (t.lr_critic <= 0.0)
        throw ConfigError("lr_critic must be positive", line_of("lr_critic"));
    if (t.batch_size < 1)
        throw ConfigError("batch_size must be positive", line_of("batch_size"));
    if (t.warmup < 0) throw ConfigError("warmup must be non-negative", line_of("warmup"));
    if (!(t.eps_start >= t.eps_end && t.eps_end >= 0.0))
        throw ConfigError("need eps_start >= eps_end >= 0", line_of("eps_start", "eps_end"));
    if (t.eps_decay_steps < 1)
        throw ConfigError("eps_decay_steps must be positive", line_of("eps_decay_steps"));
    if (t.total_steps < 0)
        throw ConfigError("total_steps must be non-negative", line_of("total_steps"));
    if (t.max_episode_length < 1)
        throw ConfigError("max_episode_length must be positive", line_of("max_episode_length"));
    if (t.replay_capacity < 1)
        throw ConfigError("replay_capacity must be positive", line_of("replay_capacity"));
    for (int h : t.actor_hidden)
        if (h < 1) throw ConfigError("actor_hidden widths must be positive", line_of("actor_hidden"));
    for (int h : t.critic_hidden)
        if (h < 1) throw ConfigError("critic_hidden widths must be positive", line_of("critic_hidden"));
    for (int h : t.v2_shared_sizes)
        if (h < 1) throw ConfigError("v2_shared_sizes widths must be positive", line_of("v2_shared_sizes"));
    for (int h : t.v2_head_sizes)
        if (h < 1) throw ConfigError("v2_head_sizes widths must be positive", line_of("v2_head_sizes"));
    if (t.variant == Variant::v2 && t.v2_shared_sizes.empty())
        throw ConfigError("v2 needs at least one shared trunk layer", line_of("v2_shared_sizes", "variant"));
    if (spec.n_agents < 1)
        throw ConfigError("n_agents must be positive", line_of("n_agents"));
    if (spec.env_name != "coop_spread" && spec.env_name != "assigned_targets" &&
        spec.env_name != "id_tagged_spread")
        throw ConfigError("unknown env '" + spec.env_name + "'", line_of("env"));
    if (spec.eval_every < 0)
        throw ConfigError("eval_every must be non-negative", line_of("eval_every"));
    if (spec.eval_episodes < 0)
        throw ConfigError("eval_episodes must be non-negative", line_of("eval_episodes"));
    if (spec.obs_noise < 0.0)
        throw ConfigError("obs_noise must be non-negative", line_of("obs_noise"));

    return spec;
}

std::string echo_config(const RunSpec& spec) {
    const TrainConfig& t = spec.train;
    std::ostringstream os;
    os << "variant = " << variant_name(t.variant) << "\n";
    os << "env = " << spec.env_name << "\n";
    os << "n_agents = " << spec.n_agents << "\n";
    os << "gamma = " << fmt_real(t.gamma) << "\n";
    os << "tau = " << fmt_real(t.tau) << "\n";
    os << "lr_actor = " << fmt_real(t.lr_actor) << "\n";
    os << "lr_critic = " << fmt_real(t.lr_critic) << "\n";
    os << "batch_size = " << t.batch_size << "\n";
    os << "warmup = " << t.warmup << "\n";
    os << "eps_start = " << fmt_real(t.eps_start) << "\n";
    os << "eps_end = " << fmt_real(t.eps_end) << "\n";
    os << "eps_decay_steps = " << t.eps_decay_steps << "\n";
    os << "total_steps = " << t.total_steps << "\n";
    os << "max_episode_length = " << t.max_episode_length << "\n";
    os << "seed = " << t.seed << "\n";
    os << "replay_capacity = " << t.replay_capacity << "\n";
    os << "actor_hidden = " << fmt_list(t.actor_hidden) << "\n";
    os << "critic_hidden = " << fmt_list(t.critic_hidden) << "\n";
    os << "v2_shared_sizes = " << fmt_list(t.v2_shared_sizes) << "\n";
    os << "v2_head_sizes = " << fmt_list(t.v2_head_sizes) << "\n";
    os << "out_dir = " << spec.out_dir << "\n";
    os << "eval_every = " << spec.eval_every << "\n";
    os << "eval_episodes = " << spec.eval_episodes << "\n";
    os << "obs_noise = " << fmt_real(spec.obs_noise) << "\n";
    os << "dump_trajectories = " << (spec.dump_trajectories ? 1 : 0) << "\n";
    return os.str();
}

} // namespace psdpg
