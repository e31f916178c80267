#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dqhfnn::data {

/// Malformed or inconsistent input files.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Dataset {
    std::vector<std::vector<double>> features;
    std::vector<int> labels;
    int n_classes = 0;
    int height = 0, width = 0, channels = 1; // 0x0 means flat vectors
    std::string split_tag;
    std::vector<double> mean, stddev; // train-split statistics, once computed

    int feature_dim() const {
        return features.empty() ? 0 : static_cast<int>(features.front().size());
    }
    int size() const { return static_cast<int>(features.size()); }
};

/// Parses the big-endian IDX container (magic 0x803 images / 0x801 labels);
/// bytes scale to [0, 1].
Dataset load_idx(const std::string &images_path, const std::string &labels_path);

/// Writes features (scaled back to bytes) and labels in IDX form; test helper
/// for the round-trip contract.
void save_idx(const Dataset &ds, const std::string &images_path, const std::string &labels_path);

/// Rectangular numeric CSV; a non-numeric first row is treated as a header.
Dataset load_csv(const std::string &path, const std::string &label_column);

struct FeatureStats {
    std::vector<double> mean, stddev; // stddev guarded to 1 for constants
};

FeatureStats compute_stats(const Dataset &train);
Dataset standardize(const Dataset &ds, const FeatureStats &stats);

/// Binary images whose label is the XOR of a hidden pixel pair.
struct ParityTask {
    Dataset dataset;
    int pixel_a = 0, pixel_b = 0; // the informative pair
};

ParityTask synth_pair_parity(int n_samples, int image_side, uint64_t seed);

enum class PerturbationKind { brightness, contrast, local_shuffle, global_shuffle };

struct Perturbation {
    PerturbationKind kind = PerturbationKind::brightness;
    double magnitude = 0.0; // delta, alpha, or window size
    uint64_t seed = 0;
    double clamp_lo = 0.0, clamp_hi = 1.0; // raw value range
};

std::vector<double> perturb(std::span<const double> image, int height, int width,
                            const Perturbation &p);

/// Deterministic contiguous split after a seeded shuffle.
struct SplitIndices {
    std::vector<int> train, val, test;
};

SplitIndices split_dataset(int n, double train_frac, double val_frac, uint64_t seed);
Dataset take(const Dataset &ds, std::span<const int> indices, const std::string &tag);

} // namespace dqhfnn::data
