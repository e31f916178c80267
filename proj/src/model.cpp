#include "dqhfnn/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "dqhfnn/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dqhfnn::model {

BranchMode branch_from_string(const std::string &name) {
    if (name == "hybrid") return BranchMode::hybrid;
    if (name == "quantum_only") return BranchMode::quantum_only;
    if (name == "classical_only") return BranchMode::classical_only;
    throw UsageError("branch_from_string: unknown branch mode '" + name + "'");
}

std::string branch_name(BranchMode mode) {
    switch (mode) {
    case BranchMode::hybrid: return "hybrid";
    case BranchMode::quantum_only: return "quantum_only";
    case BranchMode::classical_only: return "classical_only";
    }
    throw UsageError("branch_name: bad mode");
}

Model build_model(const ModelConfig &config, const pairing::PairingPlan &plan,
                  const circuits::FeatureRange &angle_range, uint64_t seed) {
    if (config.n_classes < 2) throw UsageError("build_model: need at least two classes");
    if (config.input_dim <= 0) throw UsageError("build_model: input_dim must be positive");
    if (config.hidden_dim <= 0 || config.fusion_dim <= 0)
        throw UsageError("build_model: layer widths must be positive");
    if (config.dropout_rate < 0.0 || config.dropout_rate >= 1.0)
        throw UsageError("build_model: dropout rate must lie in [0, 1)");

    Model m;
    m.config = config;
    m.plan = plan;
    m.angle_range = angle_range;

    m.quantum.arch = circuits::registry_lookup(config.arch);
    if (m.quantum.arch.excluded_from_training)
        throw UsageError("build_model: architecture '" + config.arch +
                         "' is characterization-only");
    m.quantum.clamp_eps = config.clamp_eps;
    const int P = m.quantum.arch.param_count;
    Rng rng(Rng::substream_seed(seed, 17));
    m.quantum.thetas.resize(config.n_classes);
    for (auto &theta : m.quantum.thetas) {
        theta.resize(P);
        for (auto &t : theta) t = rng.uniform(0.0, 2.0 * M_PI);
    }

    m.dense1 = nn::DenseLayer::glorot(config.input_dim, config.hidden_dim, nn::Activation::relu,
                                      Rng::substream_seed(seed, 1));
    m.dense2 = nn::DenseLayer::glorot(config.hidden_dim, config.fusion_dim, nn::Activation::none,
                                      Rng::substream_seed(seed, 2));
    m.fusion.proj = nn::DenseLayer::glorot(config.n_classes, config.fusion_dim,
                                           nn::Activation::none, Rng::substream_seed(seed, 3));
    m.classifier = nn::DenseLayer::glorot(config.fusion_dim, config.n_classes,
                                          nn::Activation::none, Rng::substream_seed(seed, 4));
    if (config.branch == BranchMode::quantum_only) {
        // The classical path is inert: zero weights stay zero (never updated).
        m.dense1 = nn::DenseLayer::zeros(config.input_dim, config.hidden_dim,
                                         nn::Activation::relu);
        m.dense2 = nn::DenseLayer::zeros(config.hidden_dim, config.fusion_dim,
                                         nn::Activation::none);
    } else if (config.branch == BranchMode::classical_only) {
        m.fusion.proj = nn::DenseLayer::zeros(config.n_classes, config.fusion_dim,
                                              nn::Activation::none);
    }
    return m;
}

void Gradients::reset(const Model &m) {
    quantum.assign(static_cast<size_t>(m.quantum_param_count()), 0.0);
    d1_W.assign(m.dense1.W.size(), 0.0);
    d1_b.assign(m.dense1.b.size(), 0.0);
    d2_W.assign(m.dense2.W.size(), 0.0);
    d2_b.assign(m.dense2.b.size(), 0.0);
    fu_W.assign(m.fusion.proj.W.size(), 0.0);
    fu_b.assign(m.fusion.proj.b.size(), 0.0);
    cl_W.assign(m.classifier.W.size(), 0.0);
    cl_b.assign(m.classifier.b.size(), 0.0);
}

namespace {
void axpy(std::vector<double> &dst, const std::vector<double> &src) {
    for (size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}
double sq_norm(const std::vector<double> &v) {
    return std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
}
} // namespace

void Gradients::add(const Gradients &other) {
    axpy(quantum, other.quantum);
    axpy(d1_W, other.d1_W);
    axpy(d1_b, other.d1_b);
    axpy(d2_W, other.d2_W);
    axpy(d2_b, other.d2_b);
    axpy(fu_W, other.fu_W);
    axpy(fu_b, other.fu_b);
    axpy(cl_W, other.cl_W);
    axpy(cl_b, other.cl_b);
}

void Gradients::scale(double s) {
    for (auto *v : {&quantum, &d1_W, &d1_b, &d2_W, &d2_b, &fu_W, &fu_b, &cl_W, &cl_b})
        for (auto &x : *v) x *= s;
}

double Gradients::classical_norm() const {
    double total = sq_norm(d1_W) + sq_norm(d1_b) + sq_norm(d2_W) + sq_norm(d2_b) +
                   sq_norm(fu_W) + sq_norm(fu_b) + sq_norm(cl_W) + sq_norm(cl_b);
    return std::sqrt(total);
}

double Gradients::quantum_norm() const { return std::sqrt(sq_norm(quantum)); }

fuzzy::PairValues sample_angles(const Model &m, std::span<const double> features) {
    auto raw = pairing::extract_pairs(features, m.plan);
    fuzzy::PairValues angles(raw.size());
    for (size_t p = 0; p < raw.size(); ++p) {
        angles[p].first = circuits::normalize_feature(raw[p].first, m.angle_range);
        angles[p].second = circuits::normalize_feature(raw[p].second, m.angle_range);
    }
    return angles;
}

ForwardTrace forward(const Model &m, std::span<const double> features, bool train_mode,
                     uint64_t dropout_seed) {
    if (static_cast<int>(features.size()) != m.config.input_dim)
        throw UsageError("forward: feature dimension mismatch");
    ForwardTrace t;

    // Quantum branch.
    if (m.config.branch != BranchMode::classical_only) {
        t.angles = sample_angles(m, features);
        t.h_fuzzy = fuzzy::forward(m.quantum, t.angles);
    } else {
        t.h_fuzzy.assign(static_cast<size_t>(m.config.n_classes), 0.0);
    }

    // Classical branch.
    auto h1 = nn::dense_forward(m.dense1, features, &t.c1);
    nn::DropoutSpec spec{m.config.dropout_rate, train_mode};
    auto h1d = nn::dropout(h1, spec, dropout_seed, &t.dropout_mask);
    t.h_classical = nn::dense_forward(m.dense2, h1d, &t.c2);

    t.fused = nn::fuse(t.h_classical, t.h_fuzzy, m.fusion, &t.cfu);
    t.logits = nn::dense_forward(m.classifier, t.fused, &t.ccl);
    t.probs = nn::softmax(t.logits);
    return t;
}

void backward(const Model &m, const ForwardTrace &trace, int label, Gradients &grads) {
    const int C = m.config.n_classes;
    if (label < 0 || label >= C) throw UsageError("backward: label out of range");

    // dL/dlogits for softmax + cross-entropy.
    std::vector<double> g_logits(trace.probs);
    g_logits[static_cast<size_t>(label)] -= 1.0;

    auto g_fused = nn::dense_backward(m.classifier, trace.ccl, g_logits, grads.cl_W, grads.cl_b);

    // The fused vector splits additively between the two branches.
    if (m.config.branch != BranchMode::classical_only) {
        auto g_fuzzy =
            nn::dense_backward(m.fusion.proj, trace.cfu, g_fused, grads.fu_W, grads.fu_b);
        auto qg = fuzzy::backward_parameter_shift(m.quantum, trace.angles, g_fuzzy);
        axpy(grads.quantum, qg);
    }
    if (m.config.branch != BranchMode::quantum_only) {
        auto g_h1d = nn::dense_backward(m.dense2, trace.c2, g_fused, grads.d2_W, grads.d2_b);
        if (!trace.dropout_mask.empty())
            for (size_t i = 0; i < g_h1d.size(); ++i) g_h1d[i] *= trace.dropout_mask[i];
        nn::dense_backward(m.dense1, trace.c1, g_h1d, grads.d1_W, grads.d1_b);
    }
}

BatchResult batch_forward_backward(const Model &m, const data::Dataset &ds,
                                   std::span<const int> indices, bool train_mode,
                                   uint64_t dropout_seed, int n_workers) {
    const int B = static_cast<int>(indices.size());
    if (B == 0) throw UsageError("batch_forward_backward: empty batch");
    std::vector<BatchResult> partial(static_cast<size_t>(B));

#pragma omp parallel for schedule(static) num_threads(n_workers > 0 ? n_workers : 1)
    for (int s = 0; s < B; ++s) {
        const int idx = indices[static_cast<size_t>(s)];
        auto trace = forward(m, ds.features[static_cast<size_t>(idx)], train_mode,
                             Rng::substream_seed(dropout_seed, static_cast<uint64_t>(idx)));
        BatchResult r;
        r.grads.reset(m);
        const int label = ds.labels[static_cast<size_t>(idx)];
        backward(m, trace, label, r.grads);
        double p = std::max(trace.probs[static_cast<size_t>(label)], 1e-12);
        r.loss = -std::log(p);
        int argmax = static_cast<int>(
            std::max_element(trace.probs.begin(), trace.probs.end()) - trace.probs.begin());
        r.correct = (argmax == label) ? 1 : 0;
        partial[static_cast<size_t>(s)] = std::move(r);
    }

    // Deterministic reduction in batch order, independent of worker count.
    BatchResult total;
    total.grads.reset(m);
    for (auto &r : partial) {
        total.loss += r.loss;
        total.correct += r.correct;
        total.grads.add(r.grads);
    }
    total.loss /= B;
    total.grads.scale(1.0 / B);
    return total;
}

EvalResult evaluate(const Model &m, const data::Dataset &ds, int n_workers) {
    const int n = ds.size();
    EvalResult res;
    res.predicted.resize(static_cast<size_t>(n));
    res.probs.resize(static_cast<size_t>(n));
    std::vector<double> losses(static_cast<size_t>(n), 0.0);

#pragma omp parallel for schedule(static) num_threads(n_workers > 0 ? n_workers : 1)
    for (int s = 0; s < n; ++s) {
        auto trace = forward(m, ds.features[static_cast<size_t>(s)], false, 0);
        const int label = ds.labels[static_cast<size_t>(s)];
        losses[static_cast<size_t>(s)] =
            -std::log(std::max(trace.probs[static_cast<size_t>(label)], 1e-12));
        res.predicted[static_cast<size_t>(s)] = static_cast<int>(
            std::max_element(trace.probs.begin(), trace.probs.end()) - trace.probs.begin());
        res.probs[static_cast<size_t>(s)] = std::move(trace.probs);
    }
    int correct = 0;
    for (int s = 0; s < n; ++s) {
        res.loss += losses[static_cast<size_t>(s)];
        if (res.predicted[static_cast<size_t>(s)] == ds.labels[static_cast<size_t>(s)]) ++correct;
    }
    if (n > 0) {
        res.loss /= n;
        res.accuracy = static_cast<double>(correct) / n;
    }
    return res;
}

namespace {

void write_tensor(std::ostream &os, const std::string &name, std::span<const double> values,
                  std::span<const int> dims) {
    os << "tensor " << name << ' ' << dims.size();
    for (int d : dims) os << ' ' << d;
    os << '\n';
    os.precision(17);
    for (size_t i = 0; i < values.size(); ++i) os << values[i] << (i + 1 == values.size() ? '\n' : ' ');
    if (values.empty()) os << '\n';
}

std::vector<double> read_tensor(std::istream &is, const std::string &expect_name,
                                std::vector<int> &dims_out) {
    std::string kw, name;
    size_t ndims = 0;
    if (!(is >> kw >> name >> ndims) || kw != "tensor" || name != expect_name)
        throw data::FormatError("checkpoint: expected tensor '" + expect_name + "'");
    dims_out.resize(ndims);
    size_t count = 1;
    for (auto &d : dims_out) {
        if (!(is >> d) || d < 0) throw data::FormatError("checkpoint: bad tensor dims");
        count *= static_cast<size_t>(d);
    }
    std::vector<double> values(count);
    for (auto &v : values)
        if (!(is >> v)) throw data::FormatError("checkpoint: truncated tensor values");
    return values;
}

} // namespace

void save_checkpoint(const Model &m, const std::string &path) {
    std::ofstream os(path);
    if (!os) throw data::FormatError("checkpoint: cannot open '" + path + "' for writing");
    os << "dqhfnn-checkpoint 1\n";
    os << "arch " << m.config.arch << '\n';
    os << "branch " << branch_name(m.config.branch) << '\n';
    os << "n_classes " << m.config.n_classes << '\n';
    os << "input_dim " << m.config.input_dim << '\n';
    os << "hidden_dim " << m.config.hidden_dim << '\n';
    os << "fusion_dim " << m.config.fusion_dim << '\n';
    os.precision(17);
    os << "dropout_rate " << m.config.dropout_rate << '\n';
    os << "clamp_eps " << m.config.clamp_eps << '\n';
    os << "angle_range " << m.angle_range.lo << ' ' << m.angle_range.hi << '\n';
    os << "plan_mode " << (m.plan.mode == pairing::PlanMode::grid_image ? "grid_image"
                                                                        : "vector_index")
       << '\n';
    os << "plan_shape " << m.plan.height << ' ' << m.plan.width << ' ' << m.plan.channels << ' '
       << m.plan.vector_length << '\n';
    os << "plan_grid " << m.plan.grid_rows << ' ' << m.plan.grid_cols << '\n';
    os << "plan_counts " << m.plan.n_fixed << ' ' << m.plan.n_random << ' ' << m.plan.seed << '\n';
    os << "plan_pairs " << m.plan.pairs.size() << '\n';
    for (const auto &p : m.plan.pairs)
        os << p.i << ' ' << p.j << ' ' << (p.origin == pairing::PairOrigin::fixed ? 'f' : 'r')
           << '\n';

    const int C = m.config.n_classes, P = m.quantum.arch.param_count;
    std::vector<double> theta_flat;
    theta_flat.reserve(static_cast<size_t>(C) * P);
    for (const auto &t : m.quantum.thetas) theta_flat.insert(theta_flat.end(), t.begin(), t.end());
    write_tensor(os, "quantum.theta", theta_flat, std::array<int, 2>{C, P});
    write_tensor(os, "dense1.W", m.dense1.W, std::array<int, 2>{m.dense1.out, m.dense1.in});
    write_tensor(os, "dense1.b", m.dense1.b, std::array<int, 1>{m.dense1.out});
    write_tensor(os, "dense2.W", m.dense2.W, std::array<int, 2>{m.dense2.out, m.dense2.in});
    write_tensor(os, "dense2.b", m.dense2.b, std::array<int, 1>{m.dense2.out});
    write_tensor(os, "fusion.W", m.fusion.proj.W,
                 std::array<int, 2>{m.fusion.proj.out, m.fusion.proj.in});
    write_tensor(os, "fusion.b", m.fusion.proj.b, std::array<int, 1>{m.fusion.proj.out});
    write_tensor(os, "classifier.W", m.classifier.W,
                 std::array<int, 2>{m.classifier.out, m.classifier.in});
    write_tensor(os, "classifier.b", m.classifier.b, std::array<int, 1>{m.classifier.out});
    write_tensor(os, "stats.mean", m.stats.mean,
                 std::array<int, 1>{static_cast<int>(m.stats.mean.size())});
    write_tensor(os, "stats.stddev", m.stats.stddev,
                 std::array<int, 1>{static_cast<int>(m.stats.stddev.size())});
    if (!os) throw data::FormatError("checkpoint: write to '" + path + "' failed");
}

Model load_checkpoint(const std::string &path) {
    std::ifstream is(path);
    if (!is) throw data::FormatError("checkpoint: cannot open '" + path + "'");
    std::string magic;
    int version = 0;
    if (!(is >> magic >> version) || magic != "dqhfnn-checkpoint" || version != 1)
        throw data::FormatError("checkpoint: bad header in '" + path + "'");

    auto expect_key = [&](const std::string &key) {
        std::string k;
        if (!(is >> k) || k != key)
            throw data::FormatError("checkpoint: expected key '" + key + "'");
    };

    ModelConfig cfg;
    std::string branch_str, mode_str;
    expect_key("arch");
    is >> cfg.arch;
    expect_key("branch");
    is >> branch_str;
    cfg.branch = branch_from_string(branch_str);
    expect_key("n_classes");
    is >> cfg.n_classes;
    expect_key("input_dim");
    is >> cfg.input_dim;
    expect_key("hidden_dim");
    is >> cfg.hidden_dim;
    expect_key("fusion_dim");
    is >> cfg.fusion_dim;
    expect_key("dropout_rate");
    is >> cfg.dropout_rate;
    expect_key("clamp_eps");
    is >> cfg.clamp_eps;

    circuits::FeatureRange range;
    double lo = 0, hi = 1;
    expect_key("angle_range");
    is >> lo >> hi;
    range = circuits::FeatureRange(lo, hi);

    pairing::PairingPlan plan;
    expect_key("plan_mode");
    is >> mode_str;
    plan.mode = (mode_str == "grid_image") ? pairing::PlanMode::grid_image
                                           : pairing::PlanMode::vector_index;
    expect_key("plan_shape");
    is >> plan.height >> plan.width >> plan.channels >> plan.vector_length;
    expect_key("plan_grid");
    is >> plan.grid_rows >> plan.grid_cols;
    expect_key("plan_counts");
    is >> plan.n_fixed >> plan.n_random >> plan.seed;
    expect_key("plan_pairs");
    size_t n_pairs = 0;
    is >> n_pairs;
    plan.pairs.resize(n_pairs);
    for (auto &p : plan.pairs) {
        char origin = 'f';
        if (!(is >> p.i >> p.j >> origin)) throw data::FormatError("checkpoint: truncated pairs");
        p.origin = (origin == 'f') ? pairing::PairOrigin::fixed : pairing::PairOrigin::random;
    }
    if (!is) throw data::FormatError("checkpoint: truncated metadata in '" + path + "'");

    Model m = build_model(cfg, plan, range, /*seed=*/0);

    std::vector<int> dims;
    auto theta_flat = read_tensor(is, "quantum.theta", dims);
    const int P = m.quantum.arch.param_count;
    if (dims != std::vector<int>{cfg.n_classes, P})
        throw data::FormatError("checkpoint: quantum.theta shape mismatch");
    for (int c = 0; c < cfg.n_classes; ++c)
        std::copy_n(theta_flat.begin() + static_cast<long>(c) * P, P,
                    m.quantum.thetas[static_cast<size_t>(c)].begin());

    auto load_dense = [&](nn::DenseLayer &layer, const std::string &name) {
        layer.W = read_tensor(is, name + ".W", dims);
        if (dims != std::vector<int>{layer.out, layer.in})
            throw data::FormatError("checkpoint: " + name + ".W shape mismatch");
        layer.b = read_tensor(is, name + ".b", dims);
        if (dims != std::vector<int>{layer.out})
            throw data::FormatError("checkpoint: " + name + ".b shape mismatch");
    };
    load_dense(m.dense1, "dense1");
    load_dense(m.dense2, "dense2");
    load_dense(m.fusion.proj, "fusion");
    load_dense(m.classifier, "classifier");
    m.stats.mean = read_tensor(is, "stats.mean", dims);
    m.stats.stddev = read_tensor(is, "stats.stddev", dims);
    return m;
}

} // namespace dqhfnn::model
