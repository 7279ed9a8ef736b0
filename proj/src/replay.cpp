#include "psdpg/replay.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace psdpg {

ReplayMemory::ReplayMemory(long capacity, int x_dim, int a_dim, int n_agents)
    : capacity_(capacity), x_dim_(x_dim), a_dim_(a_dim), n_agents_(n_agents) {
    if (capacity <= 0) throw InvalidSpecError("ReplayMemory: capacity must be positive");
    if (x_dim <= 0 || a_dim <= 0 || n_agents <= 0)
        throw InvalidSpecError("ReplayMemory: dimensions must be positive");
}

namespace {

bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

} // namespace

void ReplayMemory::push(Transition t) {
    if (static_cast<int>(t.x.size()) != x_dim_ || static_cast<int>(t.x_next.size()) != x_dim_)
        throw ShapeError("push: observation length != " + std::to_string(x_dim_));
    if (static_cast<int>(t.a.size()) != a_dim_)
        throw ShapeError("push: action length != " + std::to_string(a_dim_));
    if (static_cast<int>(t.r.size()) != n_agents_)
        throw ShapeError("push: reward length != " + std::to_string(n_agents_));
    if (!all_finite(t.x) || !all_finite(t.a) || !all_finite(t.r) || !all_finite(t.x_next))
        throw NumericError("push: non-finite transition entries");

    if (static_cast<long>(buffer_.size()) < capacity_) {
        buffer_.push_back(std::move(t));
    } else {
        buffer_[head_] = std::move(t);
        head_ = (head_ + 1) % capacity_;
    }
}

const Transition& ReplayMemory::at(long i) const {
    return buffer_[(head_ + i) % static_cast<long>(buffer_.size())];
}

std::vector<Transition> ReplayMemory::sample(int s, std::mt19937_64& rng) const {
    if (s <= 0) throw InvalidSpecError("sample: batch size must be positive");
    if (s > size())
        throw InsufficientDataError("sample: requested " + std::to_string(s) +
                                    " of " + std::to_string(size()) + " stored");

    // Partial Fisher-Yates gives s distinct uniform indices.
    std::vector<long> idx(buffer_.size());
    std::iota(idx.begin(), idx.end(), 0L);
    std::vector<Transition> batch;
    batch.reserve(s);
    for (int i = 0; i < s; ++i) {
        std::uniform_int_distribution<long> pick(i, static_cast<long>(idx.size()) - 1);
        std::swap(idx[i], idx[pick(rng)]);
        batch.push_back(buffer_[idx[i]]);
    }
    return batch;
}

} // namespace psdpg
