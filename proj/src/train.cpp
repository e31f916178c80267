#include "dqhfnn/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dqhfnn/rng.hpp"

namespace dqhfnn::train {

OptimizerKind optimizer_from_string(const std::string &name) {
    if (name == "sgd" || name == "sgd_momentum") return OptimizerKind::sgd_momentum;
    if (name == "adamw") return OptimizerKind::adamw;
    throw UsageError("optimizer_from_string: unknown optimizer '" + name + "'");
}

OptimizerState OptimizerState::sgd(double lr, double momentum) {
    OptimizerState s;
    s.kind = OptimizerKind::sgd_momentum;
    s.lr = lr;
    s.momentum = momentum;
    return s;
}

OptimizerState OptimizerState::adamw(double lr, double weight_decay) {
    OptimizerState s;
    s.kind = OptimizerKind::adamw;
    s.lr = lr;
    s.weight_decay = weight_decay;
    return s;
}

void sgd_step(std::vector<double> &params, std::span<const double> grads, OptimizerState &state) {
    if (params.size() != grads.size())
        throw UsageError("sgd_step: parameter/gradient shape mismatch");
    if (state.buf.empty()) state.buf.assign(params.size(), 0.0);
    if (state.buf.size() != params.size())
        throw UsageError("sgd_step: state buffer shape mismatch");
    for (size_t i = 0; i < params.size(); ++i) {
        state.buf[i] = state.momentum * state.buf[i] + grads[i];
        params[i] -= state.lr * state.buf[i];
    }
    ++state.step_count;
}

void adamw_step(std::vector<double> &params, std::span<const double> grads,
                OptimizerState &state) {
    if (params.size() != grads.size())
        throw UsageError("adamw_step: parameter/gradient shape mismatch");
    if (state.buf.empty()) {
        state.buf.assign(params.size(), 0.0);
        state.buf2.assign(params.size(), 0.0);
    }
    if (state.buf.size() != params.size() || state.buf2.size() != params.size())
        throw UsageError("adamw_step: state buffer shape mismatch");
    ++state.step_count;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));
    for (size_t i = 0; i < params.size(); ++i) {
        state.buf[i] = state.beta1 * state.buf[i] + (1.0 - state.beta1) * grads[i];
        state.buf2[i] = state.beta2 * state.buf2[i] + (1.0 - state.beta2) * grads[i] * grads[i];
        const double m_hat = state.buf[i] / bc1;
        const double v_hat = state.buf2[i] / bc2;
        // Decoupled decay: shrink the parameter before the adaptive step.
        params[i] -= state.lr * state.weight_decay * params[i];
        params[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
}

void Schedule::validate() const {
    if (base_lr < 0.0) throw UsageError("Schedule: base_lr must be non-negative");
    if (kind == ScheduleKind::multistep) {
        if (!std::is_sorted(milestones.begin(), milestones.end()) ||
            std::adjacent_find(milestones.begin(), milestones.end()) != milestones.end())
            throw UsageError("Schedule: milestones must be strictly increasing");
        if (factor <= 0.0) throw UsageError("Schedule: decay factor must be positive");
    } else {
        if (warmup_epochs < 0 || warmup_epochs >= total_epochs)
            throw UsageError("Schedule: warmup_epochs must be < total_epochs");
    }
}

double lr_at(const Schedule &schedule, double epoch) {
    schedule.validate();
    if (epoch < 1.0) throw UsageError("lr_at: epoch must be >= 1");
    if (schedule.kind == ScheduleKind::multistep) {
        int passed = 0;
        for (int ms : schedule.milestones)
            if (epoch >= static_cast<double>(ms)) ++passed;
        return schedule.base_lr * std::pow(schedule.factor, passed);
    }
    if (schedule.warmup_epochs > 0 && epoch <= static_cast<double>(schedule.warmup_epochs))
        return schedule.base_lr * epoch / static_cast<double>(schedule.warmup_epochs);
    const double progress = (epoch - schedule.warmup_epochs) /
                            static_cast<double>(schedule.total_epochs - schedule.warmup_epochs);
    return schedule.base_lr * 0.5 * (1.0 + std::cos(M_PI * std::min(progress, 1.0)));
}

std::vector<std::vector<double>> init_quantum_params(const circuits::CircuitArchitecture &arch,
                                                     int n_classes, uint64_t seed) {
    if (n_classes <= 0) throw UsageError("init_quantum_params: n_classes must be positive");
    Rng rng(seed);
    std::vector<std::vector<double>> thetas(static_cast<size_t>(n_classes));
    for (auto &theta : thetas) {
        theta.resize(static_cast<size_t>(arch.param_count));
        for (auto &t : theta) t = rng.uniform(0.0, 2.0 * M_PI);
    }
    return thetas;
}

std::string TrainReport::to_csv(const std::string &comment) const {
    std::ostringstream os;
    if (!comment.empty()) os << "# " << comment << '\n';
    os << "epoch,train_loss,train_acc,val_acc,lr,grad_norm_quantum,grad_norm_classical\n";
    os.precision(6);
    os << std::fixed;
    for (const auto &r : rows)
        os << r.epoch << ',' << r.train_loss << ',' << r.train_acc << ',' << r.val_acc << ','
           << r.lr << ',' << r.grad_norm_quantum << ',' << r.grad_norm_classical << '\n';
    return os.str();
}

namespace {

/// Flat views of every trainable tensor, in a fixed order.
struct TensorBinding {
    std::vector<double> *param;
    const std::vector<double> *grad; // into a Gradients instance
    bool decay;                      // eligible for AdamW weight decay
};

std::vector<TensorBinding> bind_tensors(model::Model &m, const model::Gradients &g,
                                        std::vector<double> &quantum_flat) {
    using model::BranchMode;
    std::vector<TensorBinding> out;
    const bool train_quantum = m.config.branch != BranchMode::classical_only;
    const bool train_classical = m.config.branch != BranchMode::quantum_only;
    if (train_quantum) {
        out.push_back({&quantum_flat, &g.quantum, false});
        out.push_back({&m.fusion.proj.W, &g.fu_W, true});
        out.push_back({&m.fusion.proj.b, &g.fu_b, true});
    }
    if (train_classical) {
        out.push_back({&m.dense1.W, &g.d1_W, true});
        out.push_back({&m.dense1.b, &g.d1_b, true});
        out.push_back({&m.dense2.W, &g.d2_W, true});
        out.push_back({&m.dense2.b, &g.d2_b, true});
    }
    out.push_back({&m.classifier.W, &g.cl_W, true});
    out.push_back({&m.classifier.b, &g.cl_b, true});
    return out;
}

std::vector<double> flatten_thetas(const model::Model &m) {
    std::vector<double> flat;
    for (const auto &t : m.quantum.thetas) flat.insert(flat.end(), t.begin(), t.end());
    return flat;
}

void unflatten_thetas(model::Model &m, const std::vector<double> &flat) {
    const int P = m.quantum.arch.param_count;
    for (size_t c = 0; c < m.quantum.thetas.size(); ++c)
        std::copy_n(flat.begin() + static_cast<long>(c) * P, P, m.quantum.thetas[c].begin());
}

} // namespace

TrainReport fit(model::Model &m, const data::Dataset &train_set, const data::Dataset &val_set,
                const data::Dataset &test_set, const TrainConfig &config) {
    if (config.batch_size < 1) throw UsageError("fit: batch size must be >= 1");
    if (config.epochs < 0) throw UsageError("fit: epoch count must be non-negative");
    if (train_set.size() == 0) throw UsageError("fit: empty training set");
    config.schedule.validate();

    TrainReport report;
    report.seed = config.seed;

    model::Gradients grads;
    grads.reset(m);
    std::vector<double> quantum_flat = flatten_thetas(m);
    auto bindings = bind_tensors(m, grads, quantum_flat);
    std::vector<OptimizerState> states(bindings.size());
    for (size_t t = 0; t < states.size(); ++t) {
        states[t].kind = config.optimizer;
        states[t].momentum = 0.9;
        if (config.optimizer == OptimizerKind::adamw && bindings[t].decay)
            states[t].weight_decay = config.weight_decay;
    }

    std::vector<int> order(static_cast<size_t>(train_set.size()));
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        const double lr = lr_at(config.schedule, static_cast<double>(epoch));
        Rng shuffle_rng(Rng::substream_seed(config.seed, 1000 + static_cast<uint64_t>(epoch)));
        for (size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[shuffle_rng.next_below(i)]);

        double loss_sum = 0.0;
        int correct = 0, n_batches = 0;
        double qnorm_sum = 0.0, cnorm_sum = 0.0;
        for (size_t start = 0; start < order.size(); start += config.batch_size) {
            const size_t end = std::min(order.size(), start + config.batch_size);
            std::span<const int> batch(order.data() + start, end - start);
            const uint64_t drop_seed =
                Rng::substream_seed(config.seed, 7000 + static_cast<uint64_t>(epoch) * 10007 +
                                                static_cast<uint64_t>(n_batches));
            auto result = model::batch_forward_backward(m, train_set, batch, true, drop_seed,
                                                        config.n_workers);
            if (!std::isfinite(result.loss))
                throw NumericError("fit: non-finite loss at epoch " + std::to_string(epoch));
            loss_sum += result.loss * static_cast<double>(batch.size());
            correct += result.correct;
            qnorm_sum += result.grads.quantum_norm();
            cnorm_sum += result.grads.classical_norm();
            ++n_batches;

            grads = result.grads; // bindings view these member vectors
            for (size_t t = 0; t < bindings.size(); ++t) {
                states[t].lr = lr;
                if (config.optimizer == OptimizerKind::sgd_momentum)
                    sgd_step(*bindings[t].param, *bindings[t].grad, states[t]);
                else
                    adamw_step(*bindings[t].param, *bindings[t].grad, states[t]);
            }
            unflatten_thetas(m, quantum_flat);
        }

        EpochRow row;
        row.epoch = epoch;
        row.train_loss = loss_sum / static_cast<double>(train_set.size());
        row.train_acc = static_cast<double>(correct) / train_set.size();
        row.val_acc = val_set.size() > 0 ? model::evaluate(m, val_set, config.n_workers).accuracy
                                         : 0.0;
        row.lr = lr;
        row.grad_norm_quantum = n_batches > 0 ? qnorm_sum / n_batches : 0.0;
        row.grad_norm_classical = n_batches > 0 ? cnorm_sum / n_batches : 0.0;
        report.rows.push_back(row);
    }

    if (test_set.size() > 0) {
        auto eval = model::evaluate(m, test_set, config.n_workers);
        report.test_metrics = nn::macro_metrics(eval.predicted, test_set.labels,
                                                m.config.n_classes);
    }
    return report;
}

namespace {

double mean_loss(const model::Model &m, const data::Dataset &ds, int n_samples) {
    double total = 0.0;
    for (int s = 0; s < n_samples; ++s) {
        auto trace = model::forward(m, ds.features[static_cast<size_t>(s)], false, 0);
        total -= std::log(
            std::max(trace.probs[static_cast<size_t>(ds.labels[static_cast<size_t>(s)])], 1e-12));
    }
    return total / n_samples;
}

} // namespace

GradCheckResult gradient_check(model::Model &m, const data::Dataset &ds, double tolerance,
                               int n_samples) {
    n_samples = std::min(n_samples, ds.size());
    if (n_samples < 1) throw UsageError("gradient_check: need at least one sample");

    // Analytic gradient of the mean loss, dropout disabled.
    model::Gradients analytic;
    analytic.reset(m);
    for (int s = 0; s < n_samples; ++s) {
        auto trace = model::forward(m, ds.features[static_cast<size_t>(s)], false, 0);
        model::backward(m, trace, ds.labels[static_cast<size_t>(s)], analytic);
    }
    analytic.scale(1.0 / n_samples);

    std::vector<double> quantum_flat;
    for (const auto &t : m.quantum.thetas) quantum_flat.insert(quantum_flat.end(), t.begin(),
                                                               t.end());
    auto bindings = bind_tensors(m, analytic, quantum_flat);

    const double h = 1e-4;
    const bool has_quantum = m.config.branch != model::BranchMode::classical_only;
    GradCheckResult res;
    for (size_t t = 0; t < bindings.size(); ++t) {
        auto &param = *bindings[t].param;
        const auto &grad = *bindings[t].grad;
        const bool is_quantum = has_quantum && t == 0;
        for (size_t i = 0; i < param.size(); ++i) {
            const double saved = param[i];
            param[i] = saved + h;
            if (is_quantum) {
                const int P = m.quantum.arch.param_count;
                m.quantum.thetas[i / P][i % P] = param[i];
            }
            const double up = mean_loss(m, ds, n_samples);
            param[i] = saved - h;
            if (is_quantum) {
                const int P = m.quantum.arch.param_count;
                m.quantum.thetas[i / P][i % P] = param[i];
            }
            const double down = mean_loss(m, ds, n_samples);
            param[i] = saved;
            if (is_quantum) {
                const int P = m.quantum.arch.param_count;
                m.quantum.thetas[i / P][i % P] = saved;
            }
            const double numeric = (up - down) / (2.0 * h);
            res.max_deviation = std::max(res.max_deviation, std::abs(numeric - grad[i]));
        }
    }
    res.pass = res.max_deviation < tolerance;
    return res;
}

std::vector<Fold> kfold_split(int n, int k, uint64_t seed) {
    if (k < 2) throw UsageError("kfold_split: k must be >= 2");
    if (n < k) throw UsageError("kfold_split: need n >= k");
    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    for (size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng.next_below(i)]);

    // The first n % k folds take one extra index.
    std::vector<Fold> folds(static_cast<size_t>(k));
    const int base = n / k, extra = n % k;
    int pos = 0;
    for (int f = 0; f < k; ++f) {
        const int len = base + (f < extra ? 1 : 0);
        auto &fold = folds[static_cast<size_t>(f)];
        fold.val.assign(order.begin() + pos, order.begin() + pos + len);
        pos += len;
    }
    for (int f = 0; f < k; ++f) {
        auto &fold = folds[static_cast<size_t>(f)];
        for (int g = 0; g < k; ++g)
            if (g != f)
                fold.train.insert(fold.train.end(), folds[static_cast<size_t>(g)].val.begin(),
                                  folds[static_cast<size_t>(g)].val.end());
    }
    return folds;
}

} // namespace dqhfnn::train
