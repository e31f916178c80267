#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dqhfnn/circuits.hpp"
#include "dqhfnn/data.hpp"
#include "dqhfnn/fuzzy.hpp"
#include "dqhfnn/nn.hpp"
#include "dqhfnn/pairing.hpp"

namespace dqhfnn::model {

using qsim::UsageError;

enum class BranchMode { hybrid, quantum_only, classical_only };

BranchMode branch_from_string(const std::string &name);
std::string branch_name(BranchMode mode);

struct ModelConfig {
    std::string arch = "C";
    int n_classes = 0;
    int input_dim = 0;
    int hidden_dim = 128;
    int fusion_dim = 64;
    double dropout_rate = 0.3;
    double clamp_eps = 1e-12;
    BranchMode branch = BranchMode::hybrid;
};

/// The full two-branch classifier: quantum fuzzy pair features fused
/// additively with a dense classical head.
struct Model {
    ModelConfig config;
    fuzzy::QuantumFuzzyLayer quantum;
    nn::DenseLayer dense1;     // input -> hidden, relu
    nn::DenseLayer dense2;     // hidden -> D
    nn::FusionLayer fusion;    // C -> D projection of fuzzy features
    nn::DenseLayer classifier; // D -> C
    pairing::PairingPlan plan;
    circuits::FeatureRange angle_range{0.0, 1.0};
    data::FeatureStats stats; // train-split standardization

    int quantum_param_count() const {
        return config.n_classes * quantum.arch.param_count;
    }
};

Model build_model(const ModelConfig &config, const pairing::PairingPlan &plan,
                  const circuits::FeatureRange &angle_range, uint64_t seed);

/// Gradient holder mirroring every trainable tensor.
struct Gradients {
    std::vector<double> quantum; // C*P, class-major
    std::vector<double> d1_W, d1_b, d2_W, d2_b, fu_W, fu_b, cl_W, cl_b;

    void reset(const Model &m);
    void add(const Gradients &other);
    void scale(double s);
    double classical_norm() const;
    double quantum_norm() const;
};

struct ForwardTrace {
    fuzzy::PairValues angles;
    std::vector<double> h_fuzzy;
    std::vector<double> h_classical;
    std::vector<double> fused;
    std::vector<double> logits;
    std::vector<double> probs;
    nn::DenseCache c1, c2, cfu, ccl;
    std::vector<double> dropout_mask;
};

/// Standardized sample features -> class probabilities.
ForwardTrace forward(const Model &m, std::span<const double> features, bool train_mode,
                     uint64_t dropout_seed);

/// Accumulates dL/dparams for one sample given its forward trace.
void backward(const Model &m, const ForwardTrace &trace, int label, Gradients &grads);

/// Per-sample loss and gradient over a batch; fixed reduction order.
struct BatchResult {
    double loss = 0.0;
    int correct = 0;
    Gradients grads;
};

BatchResult batch_forward_backward(const Model &m, const data::Dataset &ds,
                                   std::span<const int> indices, bool train_mode,
                                   uint64_t dropout_seed, int n_workers = 1);

/// Evaluation without dropout; returns predictions and mean loss.
struct EvalResult {
    std::vector<int> predicted;
    std::vector<std::vector<double>> probs;
    double loss = 0.0;
    double accuracy = 0.0;
};

EvalResult evaluate(const Model &m, const data::Dataset &ds, int n_workers = 1);

/// Textual checkpoint: ordered `tensor <name> <ndims> <dims...>` records with
/// row-major values, plus the metadata needed to rebuild the model.
void save_checkpoint(const Model &m, const std::string &path);
Model load_checkpoint(const std::string &path);

/// Normalized pair angles for one standardized sample.
fuzzy::PairValues sample_angles(const Model &m, std::span<const double> features);

} // namespace dqhfnn::model
