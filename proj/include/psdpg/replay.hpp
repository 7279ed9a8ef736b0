#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "psdpg/errors.hpp"

namespace psdpg {

/// One replay record. x and x_next concatenate all agents' local
/// observations, a concatenates all agents' actions, r holds one reward per
/// agent (identical entries under reward sharing).
struct Transition {
    std::vector<double> x;
    std::vector<double> a;
    std::vector<double> r;
    std::vector<double> x_next;
    bool terminal = false;
};

/// Bounded ring buffer of transitions with uniform without-replacement
/// mini-batch sampling. Single writer; no concurrent push/sample.
class ReplayMemory {
public:
    ReplayMemory(long capacity, int x_dim, int a_dim, int n_agents);

    /// Appends t, evicting the oldest transition once at capacity.
    /// Shape mismatches throw ShapeError; non-finite entries NumericError.
    /// The memory is unchanged on error.
    void push(Transition t);

    /// Draws s distinct transitions uniformly; deterministic for a fixed rng
    /// state. Throws InsufficientDataError when s > size().
    std::vector<Transition> sample(int s, std::mt19937_64& rng) const;

    long size() const { return static_cast<long>(buffer_.size()); }
    long capacity() const { return capacity_; }

    /// Stored transitions in insertion order, oldest first.
    const Transition& at(long i) const;

private:
    long capacity_;
    int x_dim_, a_dim_, n_agents_;
    std::vector<Transition> buffer_;
    long head_ = 0; // index of the oldest entry once the ring is full
};

} // namespace psdpg
