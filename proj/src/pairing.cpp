#include "dqhfnn/pairing.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <tuple>

#include "dqhfnn/rng.hpp"

namespace dqhfnn::pairing {

void PairingConfig::validate() const {
    if (total_pairs.has_value() == sampling_ratio.has_value()) {
        throw UsageError("exactly one of total_pairs / sampling_ratio must be set");
    }
    if (total_pairs && *total_pairs < 1) {
        throw UsageError("total_pairs must be >= 1");
    }
    if (sampling_ratio && !(*sampling_ratio > 0.0 && *sampling_ratio <= 1.0)) {
        throw UsageError("sampling_ratio must lie in (0, 1]");
    }
    if (random_fraction < 0.0 || random_fraction > 1.0) {
        throw UsageError("random_fraction must lie in [0, 1]");
    }
}

int pair_budget(int side, double ratio) {
    if (side < 2) {
        throw UsageError("pair_budget requires side >= 2");
    }
    return static_cast<int>(std::floor(side * side / 2.0 * ratio));
}

namespace {

struct Cell {
    int row, col;
    std::vector<int> indices; // channel-local flat indices
};

using PairKey = std::pair<int, int>;

PairKey canonical(int i, int j) { return {std::min(i, j), std::max(i, j)}; }

// Triangular weight peaking at the central cells.
double cell_weight(int r, int c, int rows, int cols, bool center_bias) {
    if (!center_bias) {
        return 1.0;
    }
    const double wr = std::min(r + 1, rows - r);
    const double wc = std::min(c + 1, cols - c);
    return wr * wc;
}

size_t weighted_pick(Rng &rng, const std::vector<double> &weights) {
    double total = 0.0;
    for (const double w : weights) {
        total += w;
    }
    double u = rng.next_double() * total;
    for (size_t k = 0; k < weights.size(); ++k) {
        u -= weights[k];
        if (u <= 0.0) {
            return k;
        }
    }
    return weights.size() - 1;
}

struct Builder {
    int n_indices;
    std::vector<Cell> cells;
    bool center_bias;
    Rng rng;
    std::set<PairKey> used;
    std::vector<Pair> pairs;

    bool add(int i, int j, PairOrigin origin) {
        if (i == j) {
            return false;
        }
        const auto key = canonical(i, j);
        if (!used.insert(key).second) {
            return false;
        }
        pairs.push_back({i, j, origin});
        return true;
    }

    std::vector<double> cell_weights(int rows, int cols, int min_size) const {
        std::vector<double> w(cells.size());
        for (size_t k = 0; k < cells.size(); ++k) {
            w[k] = static_cast<int>(cells[k].indices.size()) >= min_size
                       ? cell_weight(cells[k].row, cells[k].col, rows, cols, center_bias)
                       : 0.0;
        }
        return w;
    }
};

void draw_within_image(Builder &b, int count, int rows, int cols) {
    const auto weights = b.cell_weights(rows, cols, 2);
    int attempts = 0;
    while (count > 0) {
        if (++attempts > 100000) {
            throw UsageError("pairing budget exceeds available distinct within-cell pairs");
        }
        const Cell &cell = b.cells[weighted_pick(b.rng, weights)];
        const int n = static_cast<int>(cell.indices.size());
        const int a = static_cast<int>(b.rng.next_below(static_cast<uint64_t>(n)));
        int c = static_cast<int>(b.rng.next_below(static_cast<uint64_t>(n - 1)));
        if (c >= a) {
            ++c;
        }
        if (b.add(cell.indices[static_cast<size_t>(a)], cell.indices[static_cast<size_t>(c)],
                  PairOrigin::fixed)) {
            --count;
        }
    }
}

void draw_across_image(Builder &b, int count, int rows, int cols) {
    const auto base = b.cell_weights(rows, cols, 1);
    int attempts = 0;
    while (count > 0) {
        if (++attempts > 100000) {
            throw UsageError("pairing budget exceeds available distinct cross-cell pairs");
        }
        const size_t first = weighted_pick(b.rng, base);
        // Prefer maximal cell distance: weight partners by squared grid distance.
        std::vector<double> partner(b.cells.size(), 0.0);
        for (size_t k = 0; k < b.cells.size(); ++k) {
            if (k == first || base[k] == 0.0) {
                continue;
            }
            const double dr = b.cells[k].row - b.cells[first].row;
            const double dc = b.cells[k].col - b.cells[first].col;
            partner[k] = dr * dr + dc * dc;
        }
        const size_t second = weighted_pick(b.rng, partner);
        if (second == first) {
            continue;
        }
        const auto &ia = b.cells[first].indices;
        const auto &ib = b.cells[second].indices;
        const int i = ia[static_cast<size_t>(b.rng.next_below(ia.size()))];
        const int j = ib[static_cast<size_t>(b.rng.next_below(ib.size()))];
        if (b.add(i, j, PairOrigin::fixed)) {
            --count;
        }
    }
}

// Vector mode: fixed local pairs are adjacent index pairs inside each window,
// enumerated in order; cross-window pairs sit half the length apart.
void draw_fixed_vector(Builder &b, int within, int across, int length) {
    const int half = length / 2;
    for (int k = 0; across > 0 && k + half < length; ++k) {
        if (b.add(k, k + half, PairOrigin::fixed)) {
            --across;
        }
    }
    within += across; // degenerate lengths: remainder becomes local pairs
    for (int k = 0; within > 0 && 2 * k + 1 < length; ++k) {
        if (b.add(2 * k, 2 * k + 1, PairOrigin::fixed)) {
            --within;
        }
    }
    for (int i = 0; within > 0 && i < length; ++i) { // last resort: any adjacent
        for (int j = i + 1; within > 0 && j < length; ++j) {
            if (b.add(i, j, PairOrigin::fixed)) {
                --within;
            }
        }
    }
    if (within > 0 || across > 0) {
        throw UsageError("pairing budget exceeds available distinct pairs");
    }
}

void draw_random(Builder &b, int count) {
    const int n = b.n_indices;
    const long max_pairs = static_cast<long>(n) * (n - 1) / 2;
    if (static_cast<long>(b.pairs.size()) + count > max_pairs) {
        throw UsageError("pairing budget exceeds available distinct pairs");
    }
    int attempts = 0;
    while (count > 0) {
        if (++attempts > 200000) {
            // Dense budget: enumerate the remaining pairs and draw from them.
            std::vector<PairKey> remaining;
            for (int i = 0; i < n; ++i) {
                for (int j = i + 1; j < n; ++j) {
                    if (!b.used.count({i, j})) {
                        remaining.push_back({i, j});
                    }
                }
            }
            while (count > 0) {
                const size_t k = static_cast<size_t>(b.rng.next_below(remaining.size()));
                b.add(remaining[k].first, remaining[k].second, PairOrigin::random);
                remaining.erase(remaining.begin() + static_cast<long>(k));
                --count;
            }
            return;
        }
        const int i = static_cast<int>(b.rng.next_below(static_cast<uint64_t>(n)));
        int j = static_cast<int>(b.rng.next_below(static_cast<uint64_t>(n - 1)));
        if (j >= i) {
            ++j;
        }
        if (b.add(i, j, PairOrigin::random)) {
            --count;
        }
    }
}

PairingPlan build_common(const PairingConfig &config, PlanMode mode, int height, int width,
                         int channels, int vector_length) {
    config.validate();
    const int n_indices = mode == PlanMode::grid_image ? height * width : vector_length;
    if (n_indices < 2) {
        throw UsageError("shape too small to pair");
    }

    int total;
    if (config.total_pairs) {
        total = *config.total_pairs;
    } else if (mode == PlanMode::grid_image) {
        if (height != width) {
            total = static_cast<int>(std::floor(n_indices / 2.0 * *config.sampling_ratio));
        } else {
            total = pair_budget(height, *config.sampling_ratio);
        }
    } else {
        total = static_cast<int>(std::floor(vector_length / 2.0 * *config.sampling_ratio));
    }
    if (total < 1) {
        throw UsageError("pair budget is empty for this shape");
    }

    int n_random = static_cast<int>(std::floor(total * config.random_fraction));
    int n_fixed = total - n_random; // fixed count absorbs the rounding remainder

    PairingPlan plan;
    plan.mode = mode;
    plan.height = height;
    plan.width = width;
    plan.channels = channels;
    plan.vector_length = vector_length;
    plan.seed = config.seed;

    Builder b{n_indices, {}, config.center_bias, Rng(config.seed), {}, {}};

    int rows, cols;
    if (mode == PlanMode::grid_image) {
        rows = config.grid_rows > 0 ? config.grid_rows : std::min(4, height);
        cols = config.grid_cols > 0 ? config.grid_cols : std::min(4, width);
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                Cell cell{r, c, {}};
                const int y0 = r * height / rows, y1 = (r + 1) * height / rows;
                const int x0 = c * width / cols, x1 = (c + 1) * width / cols;
                for (int y = y0; y < y1; ++y) {
                    for (int x = x0; x < x1; ++x) {
                        cell.indices.push_back(y * width + x);
                    }
                }
                if (!cell.indices.empty()) {
                    b.cells.push_back(std::move(cell));
                }
            }
        }
    } else {
        const int window = std::max(2, vector_length / 16);
        rows = 1;
        cols = config.grid_cols > 0 ? config.grid_cols
                                    : (vector_length + window - 1) / window;
    }
    plan.grid_rows = rows;
    plan.grid_cols = cols;

    // Must-include pairs come first and count against the fixed budget. They
    // are deduplicated as ordered pairs: the circuits are asymmetric in
    // (x_i, x_j), so an explicitly requested reversed orientation is a
    // distinct feature. Randomly drawn pairs never repeat an unordered pair.
    int included = 0;
    std::set<PairKey> ordered_seen;
    for (const auto &[i, j] : config.must_include) {
        if (i < 0 || j < 0 || i >= n_indices || j >= n_indices) {
            throw UsageError("must_include index out of range");
        }
        if (i == j || !ordered_seen.insert({i, j}).second) {
            continue;
        }
        b.used.insert(canonical(i, j)); // block random redraws of this pair
        b.pairs.push_back({i, j, PairOrigin::fixed});
        ++included;
    }
    if (included > total) {
        throw UsageError("must_include exceeds the pair budget");
    }
    int fixed_left = std::max(0, n_fixed - included);
    const int random_left = total - included - fixed_left;
    n_fixed = fixed_left + included;
    n_random = random_left;

    const bool multi_cell =
        mode == PlanMode::grid_image ? b.cells.size() > 1 : cols > 1;
    bool can_within = mode != PlanMode::grid_image;
    for (const auto &cell : b.cells) {
        can_within = can_within || cell.indices.size() >= 2;
    }
    int across = multi_cell ? fixed_left / 2 : 0;
    if (!can_within) { // single-pixel cells: all fixed pairs cross cells
        across = fixed_left;
    }
    const int within = fixed_left - across;
    if (mode == PlanMode::grid_image) {
        draw_within_image(b, within, rows, cols);
        draw_across_image(b, across, rows, cols);
    } else {
        draw_fixed_vector(b, within, across, vector_length);
    }
    draw_random(b, random_left);

    plan.n_fixed = n_fixed;
    plan.n_random = n_random;
    plan.pairs = std::move(b.pairs);
    return plan;
}

} // namespace

PairingPlan build_plan(const PairingConfig &config, const ImageShape &shape) {
    if (shape.height < 1 || shape.width < 1 || shape.channels < 1) {
        throw UsageError("invalid image shape");
    }
    return build_common(config, PlanMode::grid_image, shape.height, shape.width, shape.channels,
                        0);
}

PairingPlan build_plan(const PairingConfig &config, int vector_length) {
    return build_common(config, PlanMode::vector_index, 0, 0, 1, vector_length);
}

std::vector<std::pair<double, double>> extract_pairs(std::span<const double> sample,
                                                     const PairingPlan &plan) {
    const int plane = plan.mode == PlanMode::grid_image ? plan.height * plan.width
                                                        : plan.vector_length;
    if (static_cast<int>(sample.size()) != plane * plan.channels) {
        throw UsageError("sample shape does not match the pairing plan");
    }
    std::vector<std::pair<double, double>> out;
    out.reserve(static_cast<size_t>(plan.total_pairs()));
    for (int ch = 0; ch < plan.channels; ++ch) {
        const int off = ch * plane;
        for (const auto &p : plan.pairs) {
            out.emplace_back(sample[static_cast<size_t>(off + p.i)],
                             sample[static_cast<size_t>(off + p.j)]);
        }
    }
    return out;
}

std::string plan_to_csv(const PairingPlan &plan, const std::string &comment) {
    std::ostringstream os;
    if (!comment.empty()) {
        os << "# " << comment << "\n";
    }
    os << "channel,i,j,origin\n";
    for (int ch = 0; ch < plan.channels; ++ch) {
        for (const auto &p : plan.pairs) {
            os << ch << "," << p.i << "," << p.j << ","
               << (p.origin == PairOrigin::fixed ? "fixed" : "random") << "\n";
        }
    }
    return os.str();
}

std::vector<std::tuple<int, int, int, PairOrigin>> parse_plan_csv(const std::string &csv) {
    std::vector<std::tuple<int, int, int, PairOrigin>> rows;
    std::istringstream is(csv);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("channel,", 0) == 0) {
            continue;
        }
        std::istringstream ls(line);
        std::string ch, i, j, origin;
        std::getline(ls, ch, ',');
        std::getline(ls, i, ',');
        std::getline(ls, j, ',');
        std::getline(ls, origin, ',');
        rows.emplace_back(std::stoi(ch), std::stoi(i), std::stoi(j),
                          origin == "fixed" ? PairOrigin::fixed : PairOrigin::random);
    }
    return rows;
}

} // namespace dqhfnn::pairing
