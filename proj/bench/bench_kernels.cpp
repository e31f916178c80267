// Compares the serial reference kernels against the OpenMP-parallel ones and
// verifies that both produce identical results.
#include <chrono>
#include <cstdio>
#include <numeric>
#include <string>

#include "dqhfnn/characterize.hpp"
#include "dqhfnn/model.hpp"

using namespace dqhfnn;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void print_row(const std::string &label, double serial_ms, double parallel_ms, bool identical) {
    std::printf("%-34s %12.1f %12.1f %9.2fx %10s\n", label.c_str(), serial_ms, parallel_ms,
                serial_ms / parallel_ms, identical ? "identical" : "DIFFERS");
}

} // namespace

int main(int argc, char **argv) {
    const int workers = argc > 1 ? std::atoi(argv[1]) : 4;
    const int pairs = 4000, bins = 75, ent_samples = 2000;

    std::printf("%-34s %12s %12s %10s %10s\n", "kernel", "serial (ms)", "parallel (ms)", "speedup",
                "equal");
    std::printf("parallel workers: %d\n", workers);

    for (const auto &name : {"A", "C", "D"}) {
        const auto &arch = circuits::registry_lookup(name);

        auto t0 = Clock::now();
        auto s = characterize::reference::expressibility(arch, pairs, bins, 1);
        const double serial_ms = ms_since(t0);
        t0 = Clock::now();
        auto p = characterize::expressibility(arch, pairs, bins, 1, true, workers);
        print_row("expressibility arch " + std::string(name), serial_ms, ms_since(t0),
                  s.kl_value == p.kl_value);

        t0 = Clock::now();
        auto se = characterize::reference::entangling_capability(arch, ent_samples, 1);
        const double serial_ent_ms = ms_since(t0);
        t0 = Clock::now();
        auto pe = characterize::entangling_capability(arch, ent_samples, 1, true, workers);
        print_row("entanglement arch " + std::string(name), serial_ent_ms, ms_since(t0),
                  se.mean_q == pe.mean_q);
    }

    // Batch gradient kernel on the synthetic parity task.
    auto task = data::synth_pair_parity(512, 4, 1);
    auto stats = data::compute_stats(task.dataset);
    auto ds = data::standardize(task.dataset, stats);
    pairing::PairingConfig pcfg;
    pcfg.total_pairs = 4;
    pcfg.seed = 1;
    pcfg.must_include = {{task.pixel_a, task.pixel_b}};
    auto plan = pairing::build_plan(pcfg, pairing::ImageShape{4, 4, 1});
    double lo = 1e300, hi = -1e300;
    for (const auto &row : ds.features)
        for (const double v : row) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    model::ModelConfig cfg;
    cfg.arch = "C";
    cfg.n_classes = 2;
    cfg.input_dim = 16;
    cfg.hidden_dim = 64;
    cfg.fusion_dim = 32;
    auto m = model::build_model(cfg, plan, circuits::FeatureRange{lo, hi}, 1);
    std::vector<int> idx(static_cast<size_t>(ds.size()));
    std::iota(idx.begin(), idx.end(), 0);

    auto t0 = Clock::now();
    auto r1 = model::batch_forward_backward(m, ds, idx, true, 3, 1);
    const double serial_ms = ms_since(t0);
    t0 = Clock::now();
    auto rw = model::batch_forward_backward(m, ds, idx, true, 3, workers);
    print_row("batch grad 512 samples", serial_ms, ms_since(t0),
              r1.loss == rw.loss && r1.grads.quantum == rw.grads.quantum);
    return 0;
}
