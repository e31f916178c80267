#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "dqhfnn/qsim.hpp"

namespace dqhfnn::pairing {

using qsim::UsageError;

enum class PairOrigin { fixed, random };

struct Pair {
    int i = 0;
    int j = 0; // channel-local flat indices, i != j
    PairOrigin origin = PairOrigin::fixed;
};

enum class PlanMode { grid_image, vector_index };

struct PairingPlan {
    PlanMode mode = PlanMode::vector_index;
    int height = 0, width = 0, channels = 1; // grid_image
    int vector_length = 0;                   // vector_index
    int grid_rows = 1, grid_cols = 1;
    int n_fixed = 0, n_random = 0; // per channel
    uint64_t seed = 0;
    std::vector<Pair> pairs; // one channel's worth; replicated per channel

    int pairs_per_channel() const { return static_cast<int>(pairs.size()); }
    int total_pairs() const { return pairs_per_channel() * channels; }
    int total_features() const { return total_pairs() * 2; }
};

struct PairingConfig {
    std::optional<int> total_pairs;       // exactly one of these two is set
    std::optional<double> sampling_ratio; // in (0, 1]
    double random_fraction = 1.0;
    int grid_rows = 0, grid_cols = 0; // 0 = derive from shape
    bool center_bias = true;
    uint64_t seed = 0;
    std::vector<std::pair<int, int>> must_include; // always placed first

    void validate() const;
};

struct ImageShape {
    int height = 0, width = 0, channels = 1;
};

/// floor((n^2 / 2) * ratio) pairs per channel for an n x n image.
int pair_budget(int side, double ratio);

PairingPlan build_plan(const PairingConfig &config, const ImageShape &shape);
PairingPlan build_plan(const PairingConfig &config, int vector_length);

/// Gathers raw value pairs in plan order; length = pairs * channels.
std::vector<std::pair<double, double>> extract_pairs(std::span<const double> sample,
                                                     const PairingPlan &plan);

/// CSV `channel,i,j,origin(fixed|random)` with channel-local indices.
std::string plan_to_csv(const PairingPlan &plan, const std::string &comment = "");
std::vector<std::tuple<int, int, int, PairOrigin>> parse_plan_csv(const std::string &csv);

} // namespace dqhfnn::pairing
