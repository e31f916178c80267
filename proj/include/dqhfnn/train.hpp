#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dqhfnn/data.hpp"
#include "dqhfnn/model.hpp"
#include "dqhfnn/nn.hpp"

namespace dqhfnn::train {

using qsim::UsageError;

/// Non-finite loss or other numeric breakdown during training.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class OptimizerKind { sgd_momentum, adamw };

OptimizerKind optimizer_from_string(const std::string &name);

/// Buffers mirror each tensor's flat layout.
struct OptimizerState {
    OptimizerKind kind = OptimizerKind::sgd_momentum;
    double lr = 1e-2;
    double momentum = 0.9;
    double beta1 = 0.9, beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;
    long step_count = 0;
    std::vector<double> buf; // momentum (SGD) or first moment (AdamW)
    std::vector<double> buf2; // second moment (AdamW)

    static OptimizerState sgd(double lr, double momentum = 0.9);
    static OptimizerState adamw(double lr, double weight_decay = 1e-2);
};

/// v <- momentum*v + g; p <- p - lr*v.
void sgd_step(std::vector<double> &params, std::span<const double> grads, OptimizerState &state);

/// Bias-corrected Adam with decoupled weight decay p <- p - lr*wd*p.
void adamw_step(std::vector<double> &params, std::span<const double> grads, OptimizerState &state);

enum class ScheduleKind { multistep, warmup_cosine };

struct Schedule {
    ScheduleKind kind = ScheduleKind::multistep;
    double base_lr = 1e-2;
    std::vector<int> milestones{56, 78}; // multistep
    double factor = 0.1;
    int warmup_epochs = 3; // warmup_cosine
    int total_epochs = 60;

    void validate() const;
};

double lr_at(const Schedule &schedule, double epoch);

std::vector<std::vector<double>> init_quantum_params(const circuits::CircuitArchitecture &arch,
                                                     int n_classes, uint64_t seed);

struct EpochRow {
    int epoch = 0;
    double train_loss = 0.0;
    double train_acc = 0.0;
    double val_acc = 0.0;
    double lr = 0.0;
    double grad_norm_quantum = 0.0;
    double grad_norm_classical = 0.0;
};

struct TrainReport {
    std::vector<EpochRow> rows;
    nn::MacroMetrics test_metrics;
    uint64_t seed = 0;

    std::string to_csv(const std::string &comment = "") const;
};

struct TrainConfig {
    OptimizerKind optimizer = OptimizerKind::sgd_momentum;
    Schedule schedule;
    int epochs = 80;
    int batch_size = 32;
    double weight_decay = 1e-2; // classical tensors only, AdamW only
    uint64_t seed = 0;
    int n_workers = 1;
};

/// The full training loop: seeded per-epoch shuffle, batched
/// forward/backward, scheduled optimizer steps, per-epoch metrics.
/// Throws NumericError when the loss leaves the finite range.
TrainReport fit(model::Model &m, const data::Dataset &train_set, const data::Dataset &val_set,
                const data::Dataset &test_set, const TrainConfig &config);

struct GradCheckResult {
    bool pass = false;
    double max_deviation = 0.0;
};

/// Central-difference check (step 1e-4) of every analytic partial on the
/// first few samples of `ds`. Runs with dropout disabled.
GradCheckResult gradient_check(model::Model &m, const data::Dataset &ds, double tolerance,
                               int n_samples = 4);

struct Fold {
    std::vector<int> train, val;
};

std::vector<Fold> kfold_split(int n, int k, uint64_t seed);

} // namespace dqhfnn::train
