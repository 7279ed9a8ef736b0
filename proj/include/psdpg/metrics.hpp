#pragma once

#include <vector>

namespace psdpg {

/// One finished (or truncated) episode.
struct EpisodeRecord {
    int episode = 0;
    std::vector<double> agent_returns;
    double total = 0.0;
    int steps = 0;
};

/// Trailing-window mean; element k averages the last min(k+1, window)
/// values, so the warm-up prefix uses what is available.
std::vector<double> moving_average(const std::vector<double>& series, int window);

} // namespace psdpg
