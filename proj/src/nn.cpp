#include "dqhfnn/nn.hpp"

#include <algorithm>
#include <cmath>

#include "dqhfnn/rng.hpp"

namespace dqhfnn::nn {

DenseLayer DenseLayer::zeros(int in, int out, Activation act) {
    DenseLayer l;
    l.in = in;
    l.out = out;
    l.W.assign(static_cast<size_t>(in) * static_cast<size_t>(out), 0.0);
    l.b.assign(static_cast<size_t>(out), 0.0);
    l.activation = act;
    return l;
}

DenseLayer DenseLayer::glorot(int in, int out, Activation act, uint64_t seed) {
    DenseLayer l = zeros(in, out, act);
    Rng rng(seed);
    const double bound = std::sqrt(6.0 / (in + out));
    for (auto &w : l.W) {
        w = rng.uniform(-bound, bound);
    }
    return l;
}

std::vector<double> dense_forward(const DenseLayer &layer, std::span<const double> x,
                                  DenseCache *cache) {
    if (static_cast<int>(x.size()) != layer.in) {
        throw UsageError("dense_forward: input size mismatch");
    }
    std::vector<double> pre(static_cast<size_t>(layer.out));
    for (int o = 0; o < layer.out; ++o) {
        double s = layer.b[static_cast<size_t>(o)];
        const double *row = layer.W.data() + static_cast<size_t>(o) * layer.in;
        for (int i = 0; i < layer.in; ++i) {
            s += row[i] * x[static_cast<size_t>(i)];
        }
        pre[static_cast<size_t>(o)] = s;
    }
    std::vector<double> y = pre;
    if (layer.activation == Activation::relu) {
        for (auto &v : y) {
            v = std::max(v, 0.0);
        }
    }
    if (cache) {
        cache->input.assign(x.begin(), x.end());
        cache->pre = std::move(pre);
    }
    return y;
}

std::vector<double> dense_backward(const DenseLayer &layer, const DenseCache &cache,
                                   std::span<const double> grad_out, std::vector<double> &grad_W,
                                   std::vector<double> &grad_b) {
    if (static_cast<int>(grad_out.size()) != layer.out) {
        throw UsageError("dense_backward: gradient size mismatch");
    }
    grad_W.resize(layer.W.size(), 0.0);
    grad_b.resize(layer.b.size(), 0.0);
    std::vector<double> grad_in(static_cast<size_t>(layer.in), 0.0);
    for (int o = 0; o < layer.out; ++o) {
        double g = grad_out[static_cast<size_t>(o)];
        if (layer.activation == Activation::relu && cache.pre[static_cast<size_t>(o)] <= 0.0) {
            g = 0.0;
        }
        grad_b[static_cast<size_t>(o)] += g;
        const double *row = layer.W.data() + static_cast<size_t>(o) * layer.in;
        double *grow = grad_W.data() + static_cast<size_t>(o) * layer.in;
        for (int i = 0; i < layer.in; ++i) {
            grow[i] += g * cache.input[static_cast<size_t>(i)];
            grad_in[static_cast<size_t>(i)] += g * row[i];
        }
    }
    return grad_in;
}

std::vector<double> dropout(std::span<const double> x, const DropoutSpec &spec, uint64_t seed,
                            std::vector<double> *mask_out) {
    if (spec.rate < 0.0 || spec.rate >= 1.0) {
        throw UsageError("dropout rate must lie in [0, 1)");
    }
    std::vector<double> y(x.begin(), x.end());
    std::vector<double> mask(x.size(), 1.0);
    if (spec.train_mode && spec.rate > 0.0) {
        Rng rng(seed);
        const double keep = 1.0 - spec.rate;
        for (size_t i = 0; i < y.size(); ++i) {
            if (rng.next_double() < spec.rate) {
                mask[i] = 0.0;
                y[i] = 0.0;
            } else {
                mask[i] = 1.0 / keep;
                y[i] *= mask[i];
            }
        }
    }
    if (mask_out) {
        *mask_out = std::move(mask);
    }
    return y;
}

std::vector<double> fuse(std::span<const double> h_classical, std::span<const double> h_fuzzy,
                         const FusionLayer &fusion, DenseCache *cache) {
    std::vector<double> projected = dense_forward(fusion.proj, h_fuzzy, cache);
    if (projected.size() != h_classical.size()) {
        throw UsageError("fuse: dimension mismatch between branches");
    }
    for (size_t i = 0; i < projected.size(); ++i) {
        projected[i] += h_classical[i];
    }
    return projected;
}

std::vector<double> softmax(std::span<const double> logits) {
    const double m = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double z = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        p[i] = std::exp(logits[i] - m);
        z += p[i];
    }
    for (auto &v : p) {
        v /= z;
    }
    return p;
}

double cross_entropy(std::span<const std::vector<double>> probs_batch,
                     std::span<const int> labels) {
    if (probs_batch.size() != labels.size() || probs_batch.empty()) {
        throw UsageError("cross_entropy: batch size mismatch");
    }
    double loss = 0.0;
    for (size_t i = 0; i < probs_batch.size(); ++i) {
        const double p = std::max(probs_batch[i][static_cast<size_t>(labels[i])], 1e-12);
        loss -= std::log(p);
    }
    return loss / static_cast<double>(probs_batch.size());
}

MacroMetrics macro_metrics(std::span<const int> predicted, std::span<const int> truth,
                           int n_classes) {
    if (predicted.size() != truth.size() || predicted.empty()) {
        throw UsageError("macro_metrics: label size mismatch");
    }
    std::vector<long> tp(static_cast<size_t>(n_classes), 0);
    std::vector<long> fp(static_cast<size_t>(n_classes), 0);
    std::vector<long> fn(static_cast<size_t>(n_classes), 0);
    long correct = 0;
    for (size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] == truth[i]) {
            ++correct;
            ++tp[static_cast<size_t>(truth[i])];
        } else {
            ++fp[static_cast<size_t>(predicted[i])];
            ++fn[static_cast<size_t>(truth[i])];
        }
    }
    MacroMetrics m;
    m.accuracy = static_cast<double>(correct) / static_cast<double>(predicted.size());
    for (int c = 0; c < n_classes; ++c) {
        // Division-by-zero convention: empty denominators contribute 0.
        const double p = tp[static_cast<size_t>(c)] + fp[static_cast<size_t>(c)] > 0
                             ? static_cast<double>(tp[static_cast<size_t>(c)]) /
                                   (tp[static_cast<size_t>(c)] + fp[static_cast<size_t>(c)])
                             : 0.0;
        const double r = tp[static_cast<size_t>(c)] + fn[static_cast<size_t>(c)] > 0
                             ? static_cast<double>(tp[static_cast<size_t>(c)]) /
                                   (tp[static_cast<size_t>(c)] + fn[static_cast<size_t>(c)])
                             : 0.0;
        const double f1 = p + r > 0 ? 2.0 * p * r / (p + r) : 0.0;
        m.macro_precision += p;
        m.macro_recall += r;
        m.macro_f1 += f1;
    }
    m.macro_precision /= n_classes;
    m.macro_recall /= n_classes;
    m.macro_f1 /= n_classes;
    return m;
}

double prediction_divergence(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) {
        throw UsageError("prediction_divergence: length mismatch");
    }
    double kl = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        const double pi = std::max(p[i], 1e-12);
        const double qi = std::max(q[i], 1e-12);
        kl += pi * std::log(pi / qi);
    }
    return kl < 0.0 ? 0.0 : kl;
}

} // namespace dqhfnn::nn
