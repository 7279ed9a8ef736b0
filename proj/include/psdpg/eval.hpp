#pragma once

#include <random>
#include <string>
#include <vector>

#include "psdpg/metrics.hpp"
#include "psdpg/trainer.hpp"

namespace psdpg {

/// Deterministic-policy rollouts (eps = 0): no learning, no memory writes,
/// no mutation of the ensemble.
std::vector<EpisodeRecord> evaluate(const AgentEnsemble& ens, const ParticleEnv& env,
                                    int episodes, std::mt19937_64& rng);

struct StructuralRow {
    Variant variant = Variant::v0;
    long actor_params = 0;
    long critic_params = 0;
    long total_params = 0;
    int nets_updated_per_step = 0;
    double ms_per_1000_steps = 0.0;
};

/// Side-by-side structural comparison of variants on one environment:
/// exact parameter counts, exact per-step update counts, and measured
/// train_step wall-clock (environment time excluded) scaled to 1000 steps.
struct StructuralReport {
    int n_agents = 0;
    std::vector<StructuralRow> rows;

    const StructuralRow& row(Variant v) const;
    std::string to_text() const;
};

/// timing_steps train_steps per variant drive the wall-clock column; pass 0
/// to skip timing (counts and parameters only).
StructuralReport structural_report(const std::vector<TrainConfig>& cfgs,
                                   const ParticleEnv& env, int timing_steps = 200);

} // namespace psdpg
