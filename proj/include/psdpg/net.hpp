#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "psdpg/errors.hpp"

namespace psdpg {

enum class Activation { relu, tanh, identity };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

/// One fully-connected layer: y = act(W x + b), W row-major (out x in).
struct Layer {
    int in = 0;
    int out = 0;
    Activation act = Activation::identity;
    std::vector<double> w; // out * in, row-major
    std::vector<double> b; // out

    double& wat(int r, int c) { return w[static_cast<std::size_t>(r) * in + c]; }
    double wat(int r, int c) const { return w[static_cast<std::size_t>(r) * in + c]; }
};

/// Feed-forward multilayer perceptron. Consecutive layers chain:
/// layers[k].in == layers[k-1].out.
struct LayeredNet {
    std::vector<Layer> layers;
    int input_dim = 0;
    int output_dim = 0;
};

/// Per-layer gradients, shape-congruent with a LayeredNet.
struct GradientSet {
    struct LayerGrad {
        std::vector<double> w;
        std::vector<double> b;
    };
    std::vector<LayerGrad> layers;

    void zero();
    bool finite() const;
};

enum class StepDirection { ascend, descend };

/// Adam first/second-moment accumulators, shape-congruent with the net they
/// optimize. step increases by exactly one per successful adam_step.
struct AdamState {
    struct LayerMoments {
        std::vector<double> m_w, v_w;
        std::vector<double> m_b, v_b;
    };
    std::vector<LayerMoments> layers;
    long step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Builds a net with the given layer widths. Weights are uniform in
/// [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases zero; deterministic per seed.
LayeredNet init_net(const std::vector<int>& layer_sizes,
                    const std::vector<Activation>& activations,
                    std::uint64_t seed);

std::vector<double> forward(const LayeredNet& net, const std::vector<double>& input);

struct BackwardResult {
    GradientSet grads;
    std::vector<double> input_grad;
};

/// Exact gradients of dot(upstream, forward(net, input)) with respect to all
/// parameters and to the input.
BackwardResult backward(const LayeredNet& net,
                        const std::vector<double>& input,
                        const std::vector<double>& upstream);

GradientSet make_zero_gradients(const LayeredNet& net);
AdamState make_adam_state(const LayeredNet& net);

/// One bias-corrected Adam update. ascend negates the gradient (gradient
/// ascent); non-finite gradient entries abort without touching net or state.
void adam_step(LayeredNet& net, const GradientSet& grads, AdamState& state,
               double lr, StepDirection direction);

/// target := tau * online + (1 - tau) * target, elementwise.
void soft_update(LayeredNet& target, const LayeredNet& online, double tau);

long param_count(const LayeredNet& net);

/// Scratch buffers for repeated forward/backward passes over one net shape.
/// Keeps the hot training loops allocation-free.
class Workspace {
public:
    const std::vector<double>& output() const { return acts_.empty() ? empty_ : acts_.back(); }

    std::vector<std::vector<double>> acts_; // acts_[0] = input, acts_[k] = layer k output
    std::vector<double> delta_, delta_prev_;

private:
    std::vector<double> empty_;
};

/// forward() that records post-activations into ws for a later backward_ws().
const std::vector<double>& forward_ws(const LayeredNet& net,
                                      const std::vector<double>& input, Workspace& ws);
const std::vector<double>& forward_ws(const LayeredNet& net, const double* input,
                                      int input_len, Workspace& ws);

/// Accumulates scale * grad(dot(upstream, output)) into acc using the
/// activations recorded by the matching forward_ws call. acc may be null
/// when only input_grad is wanted; input_grad, when non-null, is
/// overwritten (not accumulated).
void backward_ws(const LayeredNet& net, Workspace& ws, const std::vector<double>& upstream,
                 double scale, GradientSet* acc, std::vector<double>* input_grad);

/// Flat text format: "layers k", then per layer "out in activation" followed
/// by row-major weights and biases, 17 significant digits (round-trip exact).
void save_net(std::ostream& os, const LayeredNet& net);
LayeredNet load_net(std::istream& is);

} // namespace psdpg
