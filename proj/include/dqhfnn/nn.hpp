#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dqhfnn/qsim.hpp"

namespace dqhfnn::nn {

using qsim::UsageError;

enum class Activation { relu, none };

/// Fully connected layer y = act(W x + b); W is out x in, row-major.
struct DenseLayer {
    int in = 0, out = 0;
    std::vector<double> W; // out*in
    std::vector<double> b; // out
    Activation activation = Activation::none;

    static DenseLayer zeros(int in, int out, Activation act);
    /// Glorot-uniform init: +/- sqrt(6 / (fan_in + fan_out)).
    static DenseLayer glorot(int in, int out, Activation act, uint64_t seed);
};

struct DenseCache {
    std::vector<double> input;
    std::vector<double> pre; // W x + b before activation
};

std::vector<double> dense_forward(const DenseLayer &layer, std::span<const double> x,
                                  DenseCache *cache = nullptr);

/// Backprop through one dense layer. Accumulates into grad_W / grad_b and
/// returns dL/dx.
std::vector<double> dense_backward(const DenseLayer &layer, const DenseCache &cache,
                                   std::span<const double> grad_out, std::vector<double> &grad_W,
                                   std::vector<double> &grad_b);

struct DropoutSpec {
    double rate = 0.0;
    bool train_mode = false;
};

/// Inverted dropout; eval mode and rate 0 are the identity. The mask is
/// deterministic in the seed and reused by the backward pass.
std::vector<double> dropout(std::span<const double> x, const DropoutSpec &spec, uint64_t seed,
                            std::vector<double> *mask_out = nullptr);

/// Fusion: h_classical + (W_f h_fuzzy + b_f). W_f is D x C.
struct FusionLayer {
    DenseLayer proj; // C -> D, no activation
};

std::vector<double> fuse(std::span<const double> h_classical, std::span<const double> h_fuzzy,
                         const FusionLayer &fusion, DenseCache *cache = nullptr);

std::vector<double> softmax(std::span<const double> logits);

/// Mean categorical cross-entropy over a batch, probabilities clamped at 1e-12.
double cross_entropy(std::span<const std::vector<double>> probs_batch,
                     std::span<const int> labels);

struct MacroMetrics {
    double accuracy = 0.0;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
};

MacroMetrics macro_metrics(std::span<const int> predicted, std::span<const int> truth,
                           int n_classes);

/// KL(p || q) with 1e-12 smoothing on both arguments.
double prediction_divergence(std::span<const double> p, std::span<const double> q);

} // namespace dqhfnn::nn
