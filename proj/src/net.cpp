#include "psdpg/net.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>

namespace psdpg {

std::string activation_name(Activation a) {
    switch (a) {
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::identity: return "identity";
    }
    return "identity";
}

Activation activation_from_name(const std::string& name) {
    if (name == "relu") return Activation::relu;
    if (name == "tanh") return Activation::tanh;
    if (name == "identity") return Activation::identity;
    throw InvalidSpecError("unknown activation '" + name + "'");
}

void GradientSet::zero() {
    for (auto& l : layers) {
        std::fill(l.w.begin(), l.w.end(), 0.0);
        std::fill(l.b.begin(), l.b.end(), 0.0);
    }
}

bool GradientSet::finite() const {
    for (const auto& l : layers) {
        for (double g : l.w)
            if (!std::isfinite(g)) return false;
        for (double g : l.b)
            if (!std::isfinite(g)) return false;
    }
    return true;
}

LayeredNet init_net(const std::vector<int>& layer_sizes,
                    const std::vector<Activation>& activations,
                    std::uint64_t seed) {
    if (layer_sizes.size() < 2)
        throw InvalidSpecError("init_net: need at least an input and an output size");
    if (activations.size() != layer_sizes.size() - 1)
        throw InvalidSpecError("init_net: expected one activation per layer");
    for (int s : layer_sizes)
        if (s <= 0) throw InvalidSpecError("init_net: layer sizes must be positive");

    LayeredNet net;
    net.input_dim = layer_sizes.front();
    net.output_dim = layer_sizes.back();

    std::mt19937_64 rng(seed);
    for (std::size_t k = 0; k + 1 < layer_sizes.size(); ++k) {
        Layer layer;
        layer.in = layer_sizes[k];
        layer.out = layer_sizes[k + 1];
        layer.act = activations[k];
        const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
        std::uniform_real_distribution<double> dist(-bound, bound);
        layer.w.resize(static_cast<std::size_t>(layer.out) * layer.in);
        for (double& x : layer.w) x = dist(rng);
        layer.b.assign(layer.out, 0.0);
        net.layers.push_back(std::move(layer));
    }
    return net;
}

namespace {

inline double apply_act(Activation act, double z) {
    switch (act) {
    case Activation::relu: return z > 0.0 ? z : 0.0;
    case Activation::tanh: return std::tanh(z);
    case Activation::identity: return z;
    }
    return z;
}

// Derivative expressed through the post-activation value.
inline double act_deriv(Activation act, double a) {
    switch (act) {
    case Activation::relu: return a > 0.0 ? 1.0 : 0.0;
    case Activation::tanh: return 1.0 - a * a;
    case Activation::identity: return 1.0;
    }
    return 1.0;
}

// y += W x on top of the bias already placed in y. Four independent partial
// sums per row keep the reduction pipelined at -O2/-O3.
void matvec_addbias(const Layer& l, const double* x, double* y) {
    const double* w = l.w.data();
    for (int r = 0; r < l.out; ++r) {
        const double* row = w + static_cast<std::size_t>(r) * l.in;
        double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
        int c = 0;
        for (; c + 4 <= l.in; c += 4) {
            s0 += row[c] * x[c];
            s1 += row[c + 1] * x[c + 1];
            s2 += row[c + 2] * x[c + 2];
            s3 += row[c + 3] * x[c + 3];
        }
        for (; c < l.in; ++c) s0 += row[c] * x[c];
        y[r] = l.b[r] + ((s0 + s1) + (s2 + s3));
    }
}

} // namespace

const std::vector<double>& forward_ws(const LayeredNet& net, const double* input,
                                      int input_len, Workspace& ws) {
    if (net.layers.empty()) throw InvalidSpecError("forward: net has no layers");
    if (input_len != net.input_dim)
        throw ShapeError("forward: input length " + std::to_string(input_len) +
                         " != input_dim " + std::to_string(net.input_dim));

    ws.acts_.resize(net.layers.size() + 1);
    ws.acts_[0].assign(input, input + input_len);
    for (std::size_t k = 0; k < net.layers.size(); ++k) {
        const Layer& l = net.layers[k];
        auto& out = ws.acts_[k + 1];
        out.resize(l.out);
        matvec_addbias(l, ws.acts_[k].data(), out.data());
        if (l.act != Activation::identity)
            for (double& v : out) v = apply_act(l.act, v);
    }
    return ws.acts_.back();
}

const std::vector<double>& forward_ws(const LayeredNet& net,
                                      const std::vector<double>& input, Workspace& ws) {
    return forward_ws(net, input.data(), static_cast<int>(input.size()), ws);
}

std::vector<double> forward(const LayeredNet& net, const std::vector<double>& input) {
    Workspace ws;
    return forward_ws(net, input, ws);
}

void backward_ws(const LayeredNet& net, Workspace& ws, const std::vector<double>& upstream,
                 double scale, GradientSet* acc, std::vector<double>* input_grad) {
    const std::size_t n_layers = net.layers.size();
    if (ws.acts_.size() != n_layers + 1)
        throw ShapeError("backward: workspace does not match a forward pass");
    if (static_cast<int>(upstream.size()) != net.output_dim)
        throw ShapeError("backward: upstream length != output_dim");
    if (acc && acc->layers.size() != n_layers)
        throw ShapeError("backward: gradient accumulator does not match net");

    auto& delta = ws.delta_;
    auto& delta_prev = ws.delta_prev_;

    delta.resize(net.output_dim);
    {
        const Layer& last = net.layers.back();
        const auto& a = ws.acts_.back();
        for (int r = 0; r < last.out; ++r)
            delta[r] = upstream[r] * act_deriv(last.act, a[r]);
    }

    for (std::size_t k = n_layers; k-- > 0;) {
        const Layer& l = net.layers[k];
        const auto& a_in = ws.acts_[k];

        if (acc) {
            auto& gl = acc->layers[k];
            double* gw = gl.w.data();
            const double* ain = a_in.data();
            for (int r = 0; r < l.out; ++r) {
                const double d = scale * delta[r];
                gl.b[r] += d;
                double* grow = gw + static_cast<std::size_t>(r) * l.in;
                for (int c = 0; c < l.in; ++c) grow[c] += d * ain[c];
            }
        }

        const bool need_prev = k > 0 || input_grad != nullptr;
        if (!need_prev) break;

        delta_prev.assign(l.in, 0.0);
        const double* w = l.w.data();
        for (int r = 0; r < l.out; ++r) {
            const double d = delta[r];
            const double* row = w + static_cast<std::size_t>(r) * l.in;
            for (int c = 0; c < l.in; ++c) delta_prev[c] += row[c] * d;
        }
        if (k > 0) {
            const Layer& below = net.layers[k - 1];
            if (below.act != Activation::identity)
                for (int c = 0; c < l.in; ++c)
                    delta_prev[c] *= act_deriv(below.act, a_in[c]);
        }
        std::swap(delta, delta_prev);
    }

    if (input_grad) *input_grad = delta;
}

BackwardResult backward(const LayeredNet& net, const std::vector<double>& input,
                        const std::vector<double>& upstream) {
    Workspace ws;
    forward_ws(net, input, ws);
    BackwardResult res;
    res.grads = make_zero_gradients(net);
    backward_ws(net, ws, upstream, 1.0, &res.grads, &res.input_grad);
    return res;
}

GradientSet make_zero_gradients(const LayeredNet& net) {
    GradientSet g;
    g.layers.resize(net.layers.size());
    for (std::size_t k = 0; k < net.layers.size(); ++k) {
        g.layers[k].w.assign(net.layers[k].w.size(), 0.0);
        g.layers[k].b.assign(net.layers[k].b.size(), 0.0);
    }
    return g;
}

AdamState make_adam_state(const LayeredNet& net) {
    AdamState st;
    st.layers.resize(net.layers.size());
    for (std::size_t k = 0; k < net.layers.size(); ++k) {
        auto& m = st.layers[k];
        m.m_w.assign(net.layers[k].w.size(), 0.0);
        m.v_w.assign(net.layers[k].w.size(), 0.0);
        m.m_b.assign(net.layers[k].b.size(), 0.0);
        m.v_b.assign(net.layers[k].b.size(), 0.0);
    }
    return st;
}

namespace {

void adam_update_span(double* p, const double* g, double* m, double* v, std::size_t n,
                      double sign, double lr, double c1, double c2,
                      double beta1, double beta2, double eps) {
    for (std::size_t i = 0; i < n; ++i) {
        const double gi = sign * g[i];
        m[i] = beta1 * m[i] + (1.0 - beta1) * gi;
        v[i] = beta2 * v[i] + (1.0 - beta2) * gi * gi;
        const double mhat = m[i] * c1;
        const double vhat = v[i] * c2;
        p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

} // namespace

void adam_step(LayeredNet& net, const GradientSet& grads, AdamState& state,
               double lr, StepDirection direction) {
    if (lr <= 0.0) throw InvalidSpecError("adam_step: lr must be positive");
    if (grads.layers.size() != net.layers.size() || state.layers.size() != net.layers.size())
        throw ShapeError("adam_step: gradient/state do not match net");
    for (std::size_t k = 0; k < net.layers.size(); ++k)
        if (grads.layers[k].w.size() != net.layers[k].w.size() ||
            grads.layers[k].b.size() != net.layers[k].b.size())
            throw ShapeError("adam_step: gradient shapes do not match net");
    if (!grads.finite())
        throw NumericError("adam_step: non-finite gradient entries");

    const double sign = direction == StepDirection::ascend ? -1.0 : 1.0;
    state.step += 1;
    const double c1 = 1.0 / (1.0 - std::pow(state.beta1, static_cast<double>(state.step)));
    const double c2 = 1.0 / (1.0 - std::pow(state.beta2, static_cast<double>(state.step)));

    for (std::size_t k = 0; k < net.layers.size(); ++k) {
        Layer& l = net.layers[k];
        const auto& g = grads.layers[k];
        auto& mo = state.layers[k];
        adam_update_span(l.w.data(), g.w.data(), mo.m_w.data(), mo.v_w.data(), l.w.size(),
                         sign, lr, c1, c2, state.beta1, state.beta2, state.eps);
        adam_update_span(l.b.data(), g.b.data(), mo.m_b.data(), mo.v_b.data(), l.b.size(),
                         sign, lr, c1, c2, state.beta1, state.beta2, state.eps);
    }
}

void soft_update(LayeredNet& target, const LayeredNet& online, double tau) {
    if (tau < 0.0 || tau > 1.0)
        throw InvalidSpecError("soft_update: tau must lie in [0,1]");
    if (target.layers.size() != online.layers.size())
        throw ShapeError("soft_update: nets differ in depth");
    for (std::size_t k = 0; k < target.layers.size(); ++k) {
        Layer& t = target.layers[k];
        const Layer& o = online.layers[k];
        if (t.in != o.in || t.out != o.out)
            throw ShapeError("soft_update: layer " + std::to_string(k) + " shape mismatch");
        for (std::size_t i = 0; i < t.w.size(); ++i)
            t.w[i] = tau * o.w[i] + (1.0 - tau) * t.w[i];
        for (std::size_t i = 0; i < t.b.size(); ++i)
            t.b[i] = tau * o.b[i] + (1.0 - tau) * t.b[i];
    }
}

long param_count(const LayeredNet& net) {
    long total = 0;
    for (const auto& l : net.layers)
        total += static_cast<long>(l.out) * l.in + l.out;
    return total;
}

namespace {

void write_token(std::ostream& os, double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    os << buf;
}

} // namespace

void save_net(std::ostream& os, const LayeredNet& net) {
    os << "layers " << net.layers.size() << "\n";
    for (const auto& l : net.layers) {
        os << l.out << " " << l.in << " " << activation_name(l.act) << "\n";
        for (int r = 0; r < l.out; ++r) {
            for (int c = 0; c < l.in; ++c) {
                if (c) os << " ";
                write_token(os, l.wat(r, c));
            }
            os << "\n";
        }
        for (int r = 0; r < l.out; ++r) {
            if (r) os << " ";
            write_token(os, l.b[r]);
        }
        os << "\n";
    }
}

LayeredNet load_net(std::istream& is) {
    std::string tag;
    std::size_t n_layers = 0;
    if (!(is >> tag >> n_layers) || tag != "layers")
        throw InvalidSpecError("load_net: expected 'layers k' header");
    if (n_layers == 0) throw InvalidSpecError("load_net: zero layers");

    LayeredNet net;
    for (std::size_t k = 0; k < n_layers; ++k) {
        Layer l;
        std::string act_name;
        if (!(is >> l.out >> l.in >> act_name))
            throw InvalidSpecError("load_net: truncated layer header");
        if (l.out <= 0 || l.in <= 0)
            throw InvalidSpecError("load_net: non-positive layer shape");
        l.act = activation_from_name(act_name);
        l.w.resize(static_cast<std::size_t>(l.out) * l.in);
        for (double& x : l.w)
            if (!(is >> x)) throw InvalidSpecError("load_net: truncated weights");
        l.b.resize(l.out);
        for (double& x : l.b)
            if (!(is >> x)) throw InvalidSpecError("load_net: truncated biases");
        if (k > 0 && l.in != net.layers.back().out)
            throw InvalidSpecError("load_net: layer shapes do not chain");
        net.layers.push_back(std::move(l));
    }
    net.input_dim = net.layers.front().in;
    net.output_dim = net.layers.back().out;
    return net;
}

} // namespace psdpg
