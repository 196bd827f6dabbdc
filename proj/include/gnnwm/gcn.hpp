#pragma once

// Graph convolutional network on a LayoutGraph:
//   H(l+1) = act( A H(l) W(l) + b(l) ),  A = D^-1/2 (Adj + I) D^-1/2
// with ReLU on hidden layers and a sigmoid on the scalar output. Training is
// mini-batch SGD on sampled neighborhoods with a hand-written backward pass.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gnnwm/error.hpp"
#include "gnnwm/graph.hpp"
#include "gnnwm/rng.hpp"

namespace gnnwm {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Activation : std::uint8_t { relu = 0, identity = 1 };

struct GcnLayer {
    Mat weight;             // in x out
    Eigen::RowVectorXd bias;  // out
};

struct GcnModel {
    std::vector<GcnLayer> layers;
    Activation activation = Activation::relu;  // hidden layers

    std::size_t depth() const { return layers.size(); }
    int in_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.front().weight.rows()); }

    std::size_t num_parameters() const {
        std::size_t n = 0;
        for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
        return n;
    }

    /// Glorot-uniform weights, zero biases.
    static GcnModel create(int depth, int hidden, std::uint64_t seed, int in_dim = kFeatureDim) {
        GcnModel m = zeros(depth, hidden, in_dim);
        Rng rng(seed);
        for (auto& l : m.layers) {
            const double a = std::sqrt(6.0 / static_cast<double>(l.weight.rows() + l.weight.cols()));
            for (Eigen::Index i = 0; i < l.weight.rows(); ++i)
                for (Eigen::Index j = 0; j < l.weight.cols(); ++j) l.weight(i, j) = rng.uniform_real(-a, a);
        }
        return m;
    }

    static GcnModel zeros(int depth, int hidden, int in_dim = kFeatureDim) {
        if (depth < 1) throw InvalidArgument("model depth must be >= 1");
        if (hidden < 1 || in_dim < 1) throw InvalidArgument("layer widths must be >= 1");
        GcnModel m;
        for (int l = 0; l < depth; ++l) {
            const int in = l == 0 ? in_dim : hidden;
            const int out = l == depth - 1 ? 1 : hidden;
            m.layers.push_back({Mat::Zero(in, out), Eigen::RowVectorXd::Zero(out)});
        }
        return m;
    }

    template <typename F>
    void for_each_parameter(F&& fn) {
        for (auto& l : layers) {
            for (Eigen::Index i = 0; i < l.weight.size(); ++i) fn(l.weight.data()[i]);
            for (Eigen::Index i = 0; i < l.bias.size(); ++i) fn(l.bias.data()[i]);
        }
    }
};

/// Sparse row operator: out.row(i) = sum_k coef[k] * in.row(index[k]).
struct Aggregation {
    std::size_t rows = 0, cols = 0;
    std::vector<std::size_t> offset{0};
    std::vector<int> index;
    std::vector<double> coef;

    Mat apply(const Mat& h) const {
        Mat out = Mat::Zero(static_cast<Eigen::Index>(rows), h.cols());
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t k = offset[i]; k < offset[i + 1]; ++k)
                out.row(static_cast<Eigen::Index>(i)) += coef[k] * h.row(index[k]);
        return out;
    }

    Mat apply_transpose(const Mat& g) const {
        Mat out = Mat::Zero(static_cast<Eigen::Index>(cols), g.cols());
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t k = offset[i]; k < offset[i + 1]; ++k)
                out.row(index[k]) += coef[k] * g.row(static_cast<Eigen::Index>(i));
        return out;
    }
};

/// Symmetric-normalized adjacency with self-loops over the whole graph.
inline Aggregation full_aggregation(const LayoutGraph& g) {
    Aggregation a;
    a.rows = a.cols = g.num_nodes;
    for (std::size_t i = 0; i < g.num_nodes; ++i) {
        const double di = static_cast<double>(g.degree(static_cast<int>(i))) + 1.0;
        a.index.push_back(static_cast<int>(i));
        a.coef.push_back(1.0 / di);
        for (const int* it = g.neighbors_begin(static_cast<int>(i)); it != g.neighbors_end(static_cast<int>(i)); ++it) {
            const double dj = static_cast<double>(g.degree(*it)) + 1.0;
            a.index.push_back(*it);
            a.coef.push_back(1.0 / std::sqrt(di * dj));
        }
        a.offset.push_back(a.index.size());
    }
    return a;
}

/// Layered neighborhood sample. layers[0] are the seeds; layers[k] starts
/// with layers[k-1] followed by newly reached nodes. blocks[k] maps features
/// of layers[k+1] to layers[k].
struct SampledSubgraph {
    std::vector<std::vector<int>> layers;
    std::vector<Aggregation> blocks;
};

/// Each node of hop k-1 keeps min(deg, fanouts[k-1]) neighbors, drawn without
/// replacement. Sampled neighbors are reweighted by deg/kept so the block is
/// an unbiased estimate of the full aggregation.
inline SampledSubgraph sample_neighbors(const LayoutGraph& g, const std::vector<int>& seeds,
                                        const std::vector<int>& fanouts, std::uint64_t seed) {
    for (int f : fanouts)
        if (f < 1) throw InvalidArgument("fanouts must be positive");
    SampledSubgraph s;
    Rng rng(seed);
    std::vector<int> pos(g.num_nodes, -1);
    std::vector<int> current;
    for (int v : seeds) {
        if (v < 0 || static_cast<std::size_t>(v) >= g.num_nodes) throw InvalidArgument("invalid seed node");
        if (pos[static_cast<std::size_t>(v)] < 0) {
            pos[static_cast<std::size_t>(v)] = static_cast<int>(current.size());
            current.push_back(v);
        }
    }
    s.layers.push_back(current);
    for (int f : fanouts) {
        std::vector<int> next = current;
        Aggregation a;
        a.rows = current.size();
        for (int v : current) {
            const auto deg = g.degree(v);
            const double di = static_cast<double>(deg) + 1.0;
            a.index.push_back(pos[static_cast<std::size_t>(v)]);
            a.coef.push_back(1.0 / di);
            const auto keep = std::min<std::size_t>(deg, static_cast<std::size_t>(f));
            std::vector<std::size_t> pick;
            if (keep == deg) {
                pick.resize(deg);
                for (std::size_t k = 0; k < deg; ++k) pick[k] = k;
            } else {
                pick = rng.sample_without_replacement(deg, keep);
                std::sort(pick.begin(), pick.end());
            }
            const double scale = keep > 0 ? static_cast<double>(deg) / static_cast<double>(keep) : 0.0;
            for (std::size_t k : pick) {
                const int u = g.neighbors_begin(v)[k];
                if (pos[static_cast<std::size_t>(u)] < 0) {
                    pos[static_cast<std::size_t>(u)] = static_cast<int>(next.size());
                    next.push_back(u);
                }
                const double dj = static_cast<double>(g.degree(u)) + 1.0;
                a.index.push_back(pos[static_cast<std::size_t>(u)]);
                a.coef.push_back(scale / std::sqrt(di * dj));
            }
            a.offset.push_back(a.index.size());
        }
        a.cols = next.size();
        s.blocks.push_back(std::move(a));
        s.layers.push_back(next);
        current = std::move(next);
    }
    // positions index into the next layer, which extends the current one
    return s;
}

namespace detail {

struct ForwardCache {
    std::vector<Mat> inputs;      // H(l), per layer
    std::vector<Mat> aggregated;  // A H(l)
    std::vector<Mat> pre;         // A H(l) W + b
    Mat output;                   // sigmoid of the last pre-activation
};

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// ops[l] is the aggregation used by model layer l.
inline Mat propagate(const GcnModel& model, Mat h, const std::vector<const Aggregation*>& ops,
                     ForwardCache* cache) {
    if (model.layers.empty()) throw InvalidArgument("empty model");
    if (h.cols() != model.layers.front().weight.rows())
        throw InvalidArgument("feature width " + std::to_string(h.cols()) + " does not match model input " +
                              std::to_string(model.layers.front().weight.rows()));
    const std::size_t depth = model.layers.size();
    for (std::size_t l = 0; l < depth; ++l) {
        const auto& layer = model.layers[l];
        Mat agg = ops[l]->apply(h);
        Mat z = agg * layer.weight;
        z.rowwise() += layer.bias;
        if (cache) {
            cache->inputs.push_back(std::move(h));
            cache->aggregated.push_back(agg);
            cache->pre.push_back(z);
        }
        if (l + 1 < depth) {
            h = model.activation == Activation::relu ? Mat(z.cwiseMax(0.0)) : z;
        } else {
            h = z.unaryExpr([](double v) { return sigmoid(v); });
        }
    }
    if (cache) cache->output = h;
    return h;
}

inline Mat gather_features(const LayoutGraph& g, const std::vector<int>& nodes) {
    Mat x(static_cast<Eigen::Index>(nodes.size()), g.features.cols());
    for (std::size_t i = 0; i < nodes.size(); ++i) x.row(static_cast<Eigen::Index>(i)) = g.features.row(nodes[i]);
    return x;
}

}  // namespace detail

/// Scores of every node, full-neighborhood aggregation.
inline std::vector<double> forward_all(const GcnModel& model, const LayoutGraph& g) {
    const Aggregation a = full_aggregation(g);
    std::vector<const Aggregation*> ops(model.depth(), &a);
    const Mat out = detail::propagate(model, Mat(g.features), ops, nullptr);
    return std::vector<double>(out.data(), out.data() + out.rows());
}

/// Scores of the given nodes, full-neighborhood aggregation.
inline std::vector<double> forward(const GcnModel& model, const LayoutGraph& g, const std::vector<int>& nodes) {
    for (int v : nodes)
        if (v < 0 || static_cast<std::size_t>(v) >= g.num_nodes) throw InvalidArgument("invalid node id");
    const auto all = forward_all(model, g);
    std::vector<double> out;
    out.reserve(nodes.size());
    for (int v : nodes) out.push_back(all[static_cast<std::size_t>(v)]);
    return out;
}

/// Scores of the sampled seeds (layers[0]).
inline std::vector<double> forward(const GcnModel& model, const LayoutGraph& g, const SampledSubgraph& s) {
    if (s.blocks.size() != model.depth()) throw InvalidArgument("sample depth does not match the model");
    std::vector<const Aggregation*> ops;
    for (std::size_t l = 0; l < model.depth(); ++l) ops.push_back(&s.blocks[model.depth() - 1 - l]);
    const Mat out = detail::propagate(model, detail::gather_features(g, s.layers.back()), ops, nullptr);
    return std::vector<double>(out.data(), out.data() + out.rows());
}

struct Gradients {
    std::vector<Mat> weight;
    std::vector<Eigen::RowVectorXd> bias;
};

namespace detail {

/// Mean squared error over the output rows and its gradient.
inline double backward(const GcnModel& model, const std::vector<const Aggregation*>& ops, const ForwardCache& c,
                       const std::vector<double>& targets, Gradients* grads) {
    const auto n = c.output.rows();
    double loss = 0.0;
    Mat dz(n, 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double y = c.output(i, 0), e = y - targets[static_cast<std::size_t>(i)];
        loss += e * e;
        dz(i, 0) = 2.0 * e / static_cast<double>(n) * y * (1.0 - y);
    }
    loss /= static_cast<double>(n);
    if (!grads) return loss;
    const std::size_t depth = model.depth();
    grads->weight.assign(depth, Mat());
    grads->bias.assign(depth, Eigen::RowVectorXd());
    for (std::size_t l = depth; l-- > 0;) {
        grads->weight[l] = c.aggregated[l].transpose() * dz;
        grads->bias[l] = dz.colwise().sum();
        if (l == 0) break;
        const Mat dagg = dz * model.layers[l].weight.transpose();
        Mat dh = ops[l]->apply_transpose(dagg);
        if (model.activation == Activation::relu) dh = dh.cwiseProduct(Mat((c.pre[l - 1].array() > 0.0).cast<double>()));
        dz = std::move(dh);
    }
    return loss;
}

}  // namespace detail

namespace detail {

/// Full-graph loss of `nodes`; the last layer only aggregates into those rows.
/// `relu_pattern` receives the sign pattern of every hidden pre-activation.
inline double full_loss(const GcnModel& model, const LayoutGraph& g, const std::vector<int>& nodes,
                        const std::vector<double>& targets, Gradients* grads, std::vector<char>* relu_pattern) {
    if (nodes.empty() || nodes.size() != targets.size()) throw InvalidArgument("nodes and targets must match");
    for (int v : nodes)
        if (v < 0 || static_cast<std::size_t>(v) >= g.num_nodes) throw InvalidArgument("invalid node id");
    const Aggregation a = full_aggregation(g);
    Aggregation last;
    last.rows = nodes.size();
    last.cols = g.num_nodes;
    for (int v : nodes) {
        const auto i = static_cast<std::size_t>(v);
        for (std::size_t k = a.offset[i]; k < a.offset[i + 1]; ++k) {
            last.index.push_back(a.index[k]);
            last.coef.push_back(a.coef[k]);
        }
        last.offset.push_back(last.index.size());
    }
    std::vector<const Aggregation*> ops(model.depth(), &a);
    ops.back() = &last;
    ForwardCache cache;
    propagate(model, Mat(g.features), ops, &cache);
    if (relu_pattern) {
        relu_pattern->clear();
        for (std::size_t l = 0; l + 1 < cache.pre.size(); ++l)
            for (Eigen::Index i = 0; i < cache.pre[l].size(); ++i) relu_pattern->push_back(cache.pre[l].data()[i] > 0.0);
    }
    return backward(model, ops, cache, targets, grads);
}

}  // namespace detail

/// Loss of the given nodes under full aggregation, with its gradient.
inline double loss_and_gradient(const GcnModel& model, const LayoutGraph& g, const std::vector<int>& nodes,
                                const std::vector<double>& targets, Gradients* grads) {
    return detail::full_loss(model, g, nodes, targets, grads, nullptr);
}

/// Loss over the sampled seeds with its gradient.
inline double loss_and_gradient(const GcnModel& model, const LayoutGraph& g, const SampledSubgraph& s,
                                const std::vector<double>& targets, Gradients* grads) {
    if (s.blocks.size() != model.depth()) throw InvalidArgument("sample depth does not match the model");
    if (s.layers.front().size() != targets.size()) throw InvalidArgument("seeds and targets must match");
    std::vector<const Aggregation*> ops;
    for (std::size_t l = 0; l < model.depth(); ++l) ops.push_back(&s.blocks[model.depth() - 1 - l]);
    detail::ForwardCache cache;
    detail::propagate(model, detail::gather_features(g, s.layers.back()), ops, &cache);
    return detail::backward(model, ops, cache, targets, grads);
}

struct TrainConfig {
    double learning_rate = 0.01;
    double weight_decay = 0.001;
    double momentum = 0.9;
    int epochs = 30;
    std::size_t batch_size = 1280;
    std::vector<int> fanouts{15, 20, 35, 50, 100, 200, 500};
    std::uint64_t seed = 1;
};

struct Labels {
    std::vector<int> nodes;
    std::vector<double> values;
};

struct TrainResult {
    GcnModel model;
    std::vector<double> loss_history;  // mean loss per epoch
};

/// Mini-batch SGD with momentum and weight decay (decay added to the gradient).
inline TrainResult train(GcnModel model, const LayoutGraph& g, const Labels& labels, const TrainConfig& cfg) {
    if (labels.nodes.empty() || labels.nodes.size() != labels.values.size())
        throw InvalidArgument("labels must be non-empty and match their nodes");
    for (double v : labels.values)
        if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("label values must lie in [0,1]");
    if (cfg.fanouts.size() != model.depth()) throw InvalidArgument("fanout list length must equal model depth");
    if (cfg.batch_size < 1 || cfg.epochs < 0) throw InvalidArgument("invalid batch size or epoch count");

    Rng rng(cfg.seed);
    GcnModel velocity = model;
    velocity.for_each_parameter([](double& p) { p = 0.0; });
    TrainResult res;
    std::vector<std::size_t> order(labels.nodes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double total = 0.0;
        for (std::size_t b = 0; b < order.size(); b += cfg.batch_size) {
            const std::size_t e = std::min(order.size(), b + cfg.batch_size);
            std::vector<int> seeds;
            std::vector<double> targets;
            for (std::size_t i = b; i < e; ++i) {
                seeds.push_back(labels.nodes[order[i]]);
                targets.push_back(labels.values[order[i]]);
            }
            const auto sub = sample_neighbors(g, seeds, cfg.fanouts, rng.next());
            // duplicate seeds collapse in the sample; keep the first target of each
            std::vector<double> t;
            {
                std::vector<char> seen(g.num_nodes, 0);
                for (std::size_t i = 0; i < seeds.size(); ++i)
                    if (!seen[static_cast<std::size_t>(seeds[i])]) {
                        seen[static_cast<std::size_t>(seeds[i])] = 1;
                        t.push_back(targets[i]);
                    }
            }
            Gradients grads;
            const double loss = loss_and_gradient(model, g, sub, t, &grads);
            if (!std::isfinite(loss))
                throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                                    std::to_string(b / cfg.batch_size));
            total += loss * static_cast<double>(t.size());
            for (std::size_t l = 0; l < model.depth(); ++l) {
                auto& layer = model.layers[l];
                auto& vel = velocity.layers[l];
                const Mat gw = grads.weight[l] + cfg.weight_decay * layer.weight;
                const Eigen::RowVectorXd gb = grads.bias[l] + cfg.weight_decay * layer.bias;
                vel.weight = cfg.momentum * vel.weight + gw;
                vel.bias = cfg.momentum * vel.bias + gb;
                layer.weight -= cfg.learning_rate * vel.weight;
                layer.bias -= cfg.learning_rate * vel.bias;
                if (!layer.weight.allFinite() || !layer.bias.allFinite())
                    throw TrainingError("non-finite weights at epoch " + std::to_string(epoch));
            }
        }
        const double mean = total / static_cast<double>(order.size());
        if (!std::isfinite(mean)) throw TrainingError("non-finite loss at epoch " + std::to_string(epoch));
        res.loss_history.push_back(mean);
    }
    res.model = std::move(model);
    return res;
}

/// Largest relative error between the analytic gradient of the full-graph MSE
/// loss and a central finite difference, over every weight and bias (or only
/// those of `layer` when given). Relative error: |a - n| / max(|a|, |n|, 1e-6).
/// A difference whose two evaluations see different ReLU sign patterns
/// straddles a kink; it is retried with the step shrunk by 10 (down to 1e-10).
inline double grad_check(const GcnModel& model, const LayoutGraph& g, const Labels& labels, double epsilon,
                         std::optional<std::size_t> layer = std::nullopt) {
    Gradients grads;
    std::vector<char> base, up_pattern, down_pattern;
    detail::full_loss(model, g, labels.nodes, labels.values, &grads, &base);
    GcnModel m = model;
    double worst = 0.0;
    auto check = [&](double& param, double analytic) {
        const double saved = param;
        double numeric = 0.0;
        for (double eps = epsilon;; eps *= 0.1) {
            param = saved + eps;
            const double up = detail::full_loss(m, g, labels.nodes, labels.values, nullptr, &up_pattern);
            param = saved - eps;
            const double down = detail::full_loss(m, g, labels.nodes, labels.values, nullptr, &down_pattern);
            param = saved;
            numeric = (up - down) / (2.0 * eps);
            if ((up_pattern == base && down_pattern == base) || eps < 1e-10) break;
        }
        const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
        worst = std::max(worst, std::abs(analytic - numeric) / denom);
    };
    for (std::size_t l = 0; l < m.depth(); ++l) {
        if (layer && *layer != l) continue;
        auto& L = m.layers[l];
        for (Eigen::Index i = 0; i < L.weight.size(); ++i) check(L.weight.data()[i], grads.weight[l].data()[i]);
        for (Eigen::Index i = 0; i < L.bias.size(); ++i) check(L.bias.data()[i], grads.bias[l].data()[i]);
    }
    return worst;
}

// Model file (little-endian):
//   "GNNWMGCN" | u32 version | u32 depth | u8 activation
//   per layer: u32 in | u32 out | in*out f64 weights (row-major) | out f64 bias
inline constexpr char kModelMagic[8] = {'G', 'N', 'N', 'W', 'M', 'G', 'C', 'N'};
inline constexpr std::uint32_t kModelVersion = 1;

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_f64(std::string& out, double d) {
    std::uint64_t v;
    std::memcpy(&v, &d, sizeof v);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

struct ByteReader {
    const std::string& data;
    std::size_t pos = 0;

    void need(std::size_t n) const {
        if (pos + n > data.size()) throw IoError("model file is truncated");
    }
    std::uint64_t uint(int bytes) {
        need(static_cast<std::size_t>(bytes));
        std::uint64_t v = 0;
        for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data[pos++])) << (8 * i);
        return v;
    }
    double f64() {
        const std::uint64_t v = uint(8);
        double d;
        std::memcpy(&d, &v, sizeof d);
        return d;
    }
};

}  // namespace detail

inline std::string serialize_model(const GcnModel& m) {
    std::string out(kModelMagic, sizeof kModelMagic);
    detail::put_u32(out, kModelVersion);
    detail::put_u32(out, static_cast<std::uint32_t>(m.depth()));
    out.push_back(static_cast<char>(m.activation));
    for (const auto& l : m.layers) {
        detail::put_u32(out, static_cast<std::uint32_t>(l.weight.rows()));
        detail::put_u32(out, static_cast<std::uint32_t>(l.weight.cols()));
        for (Eigen::Index i = 0; i < l.weight.size(); ++i) detail::put_f64(out, l.weight.data()[i]);
        for (Eigen::Index i = 0; i < l.bias.size(); ++i) detail::put_f64(out, l.bias[i]);
    }
    return out;
}

inline GcnModel deserialize_model(const std::string& data) {
    if (data.size() < sizeof kModelMagic || std::memcmp(data.data(), kModelMagic, sizeof kModelMagic) != 0)
        throw IoError("not a model file (bad magic)");
    detail::ByteReader r{data, sizeof kModelMagic};
    const auto version = r.uint(4);
    if (version != kModelVersion)
        throw IoError("model file version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(kModelVersion) + ")");
    const auto depth = r.uint(4);
    const auto act = r.uint(1);
    if (act > 1) throw IoError("model file has an unknown activation");
    if (depth == 0 || depth > 1024) throw IoError("model file has an invalid depth");
    GcnModel m;
    m.activation = static_cast<Activation>(act);
    for (std::uint64_t l = 0; l < depth; ++l) {
        const auto in = r.uint(4), out = r.uint(4);
        if (in == 0 || out == 0 || in > 1u << 16 || out > 1u << 16) throw IoError("model file has invalid layer dims");
        r.need(static_cast<std::size_t>((in * out + out) * 8));
        GcnLayer layer{Mat(static_cast<Eigen::Index>(in), static_cast<Eigen::Index>(out)),
                       Eigen::RowVectorXd(static_cast<Eigen::Index>(out))};
        for (Eigen::Index i = 0; i < layer.weight.size(); ++i) layer.weight.data()[i] = r.f64();
        for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias[i] = r.f64();
        if (!m.layers.empty() && m.layers.back().weight.cols() != layer.weight.rows())
            throw IoError("model file layer dims do not chain");
        m.layers.push_back(std::move(layer));
    }
    if (m.layers.back().weight.cols() != 1) throw IoError("model file output width must be 1");
    if (r.pos != data.size()) throw IoError("model file has trailing bytes");
    return m;
}

inline void save_model(const GcnModel& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    const std::string bytes = serialize_model(m);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

inline GcnModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_model(bytes);
}

}  // namespace gnnwm
