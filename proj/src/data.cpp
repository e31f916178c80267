#include "dqhfnn/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>

#include "dqhfnn/rng.hpp"

namespace dqhfnn::data {

namespace {

uint32_t read_be32(std::istream &is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char *>(b), 4);
    if (!is) {
        throw FormatError("IDX file truncated");
    }
    return (uint32_t(b[0]) << 24) | (uint32_t(b[1]) << 16) | (uint32_t(b[2]) << 8) | uint32_t(b[3]);
}

void write_be32(std::ostream &os, uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                                static_cast<unsigned char>(v >> 16),
                                static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v)};
    os.write(reinterpret_cast<const char *>(b), 4);
}

} // namespace

Dataset load_idx(const std::string &images_path, const std::string &labels_path) {
    std::ifstream img(images_path, std::ios::binary);
    if (!img) {
        throw FormatError("cannot open " + images_path);
    }
    if (read_be32(img) != 0x00000803u) {
        throw FormatError("bad IDX image magic in " + images_path);
    }
    const uint32_t count = read_be32(img);
    const uint32_t rows = read_be32(img);
    const uint32_t cols = read_be32(img);

    std::ifstream lab(labels_path, std::ios::binary);
    if (!lab) {
        throw FormatError("cannot open " + labels_path);
    }
    if (read_be32(lab) != 0x00000801u) {
        throw FormatError("bad IDX label magic in " + labels_path);
    }
    if (read_be32(lab) != count) {
        throw FormatError("IDX image/label count mismatch");
    }

    Dataset ds;
    ds.height = static_cast<int>(rows);
    ds.width = static_cast<int>(cols);
    ds.channels = 1;
    const size_t pixels = static_cast<size_t>(rows) * cols;
    std::vector<unsigned char> buf(pixels);
    int max_label = -1;
    for (uint32_t n = 0; n < count; ++n) {
        img.read(reinterpret_cast<char *>(buf.data()), static_cast<std::streamsize>(pixels));
        if (!img) {
            throw FormatError("IDX image payload truncated");
        }
        std::vector<double> f(pixels);
        for (size_t k = 0; k < pixels; ++k) {
            f[k] = buf[k] / 255.0;
        }
        ds.features.push_back(std::move(f));
        char lb;
        lab.read(&lb, 1);
        if (!lab) {
            throw FormatError("IDX label payload truncated");
        }
        const int label = static_cast<unsigned char>(lb);
        ds.labels.push_back(label);
        max_label = std::max(max_label, label);
    }
    ds.n_classes = max_label + 1;
    return ds;
}

void save_idx(const Dataset &ds, const std::string &images_path, const std::string &labels_path) {
    std::ofstream img(images_path, std::ios::binary);
    write_be32(img, 0x00000803u);
    write_be32(img, static_cast<uint32_t>(ds.size()));
    write_be32(img, static_cast<uint32_t>(ds.height));
    write_be32(img, static_cast<uint32_t>(ds.width));
    for (const auto &f : ds.features) {
        for (const double v : f) {
            const auto byte = static_cast<unsigned char>(std::lround(v * 255.0));
            img.write(reinterpret_cast<const char *>(&byte), 1);
        }
    }
    std::ofstream lab(labels_path, std::ios::binary);
    write_be32(lab, 0x00000801u);
    write_be32(lab, static_cast<uint32_t>(ds.size()));
    for (const int l : ds.labels) {
        const auto byte = static_cast<unsigned char>(l);
        lab.write(reinterpret_cast<const char *>(&byte), 1);
    }
}

namespace {

bool parse_double(const std::string &s, double &out) {
    try {
        size_t pos = 0;
        out = std::stod(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) {
            ++pos;
        }
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

std::vector<std::string> split_csv_line(const std::string &line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        cells.push_back(cell);
    }
    return cells;
}

} // namespace

Dataset load_csv(const std::string &path, const std::string &label_column) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open " + path);
    }
    std::string line;
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        rows.push_back(split_csv_line(line));
    }
    if (rows.empty()) {
        throw FormatError("empty CSV: " + path);
    }
    const size_t n_cols = rows.front().size();
    for (const auto &r : rows) {
        if (r.size() != n_cols) {
            throw FormatError("ragged CSV row in " + path);
        }
    }
    // Header auto-detection: a first row with any non-numeric cell.
    size_t first_data = 0;
    std::vector<std::string> header;
    double tmp;
    for (const auto &cell : rows.front()) {
        if (!parse_double(cell, tmp)) {
            first_data = 1;
            header = rows.front();
            break;
        }
    }
    long label_idx = static_cast<long>(n_cols) - 1;
    if (!header.empty() && !label_column.empty()) {
        const auto it = std::find(header.begin(), header.end(), label_column);
        if (it == header.end()) {
            throw FormatError("label column '" + label_column + "' not found in " + path);
        }
        label_idx = it - header.begin();
    }

    Dataset ds;
    int max_label = -1;
    for (size_t r = first_data; r < rows.size(); ++r) {
        std::vector<double> f;
        f.reserve(n_cols - 1);
        int label = 0;
        for (size_t c = 0; c < n_cols; ++c) {
            double v;
            if (!parse_double(rows[r][c], v)) {
                throw FormatError("non-numeric cell in " + path);
            }
            if (static_cast<long>(c) == label_idx) {
                label = static_cast<int>(std::lround(v));
            } else {
                f.push_back(v);
            }
        }
        ds.features.push_back(std::move(f));
        ds.labels.push_back(label);
        max_label = std::max(max_label, label);
    }
    ds.n_classes = max_label + 1;
    return ds;
}

FeatureStats compute_stats(const Dataset &train) {
    const int d = train.feature_dim();
    FeatureStats st;
    st.mean.assign(static_cast<size_t>(d), 0.0);
    st.stddev.assign(static_cast<size_t>(d), 0.0);
    for (const auto &f : train.features) {
        for (int k = 0; k < d; ++k) {
            st.mean[static_cast<size_t>(k)] += f[static_cast<size_t>(k)];
        }
    }
    for (auto &m : st.mean) {
        m /= train.size();
    }
    for (const auto &f : train.features) {
        for (int k = 0; k < d; ++k) {
            const double dev = f[static_cast<size_t>(k)] - st.mean[static_cast<size_t>(k)];
            st.stddev[static_cast<size_t>(k)] += dev * dev;
        }
    }
    for (auto &s : st.stddev) {
        s = std::sqrt(s / train.size());
        if (s <= 0.0) {
            s = 1.0; // constant feature guard
        }
    }
    return st;
}

Dataset standardize(const Dataset &ds, const FeatureStats &stats) {
    Dataset out = ds;
    out.mean = stats.mean;
    out.stddev = stats.stddev;
    for (auto &f : out.features) {
        for (size_t k = 0; k < f.size(); ++k) {
            f[k] = (f[k] - stats.mean[k]) / stats.stddev[k];
        }
    }
    return out;
}

ParityTask synth_pair_parity(int n_samples, int image_side, uint64_t seed) {
    if (image_side < 2) {
        throw FormatError("synth_pair_parity requires side >= 2");
    }
    const int n_pix = image_side * image_side;
    Rng rng(seed);
    ParityTask task;
    task.pixel_a = static_cast<int>(rng.next_below(static_cast<uint64_t>(n_pix)));
    task.pixel_b = static_cast<int>(rng.next_below(static_cast<uint64_t>(n_pix - 1)));
    if (task.pixel_b >= task.pixel_a) {
        ++task.pixel_b;
    }
    Dataset &ds = task.dataset;
    ds.height = image_side;
    ds.width = image_side;
    ds.channels = 1;
    ds.n_classes = 2;
    for (int n = 0; n < n_samples; ++n) {
        std::vector<double> f(static_cast<size_t>(n_pix));
        for (auto &v : f) {
            v = rng.next_double() < 0.5 ? 0.0 : 1.0;
        }
        const int a = f[static_cast<size_t>(task.pixel_a)] > 0.5 ? 1 : 0;
        const int b = f[static_cast<size_t>(task.pixel_b)] > 0.5 ? 1 : 0;
        ds.features.push_back(std::move(f));
        ds.labels.push_back(a ^ b);
    }
    return task;
}

std::vector<double> perturb(std::span<const double> image, int height, int width,
                            const Perturbation &p) {
    std::vector<double> out(image.begin(), image.end());
    const auto clamp = [&](double v) { return std::clamp(v, p.clamp_lo, p.clamp_hi); };
    switch (p.kind) {
    case PerturbationKind::brightness:
        for (auto &v : out) {
            v = clamp(v + p.magnitude);
        }
        break;
    case PerturbationKind::contrast: {
        const double mean = std::accumulate(out.begin(), out.end(), 0.0) / out.size();
        for (auto &v : out) {
            v = clamp(mean + (v - mean) * p.magnitude);
        }
        break;
    }
    case PerturbationKind::local_shuffle: {
        const int w = std::max(2, static_cast<int>(p.magnitude));
        Rng rng(p.seed);
        for (int ty = 0; ty < height; ty += w) {
            for (int tx = 0; tx < width; tx += w) {
                std::vector<int> idx;
                for (int y = ty; y < std::min(ty + w, height); ++y) {
                    for (int x = tx; x < std::min(tx + w, width); ++x) {
                        idx.push_back(y * width + x);
                    }
                }
                // Fisher-Yates inside the tile
                for (size_t k = idx.size(); k > 1; --k) {
                    const size_t j = static_cast<size_t>(rng.next_below(k));
                    std::swap(out[static_cast<size_t>(idx[k - 1])],
                              out[static_cast<size_t>(idx[j])]);
                }
            }
        }
        break;
    }
    case PerturbationKind::global_shuffle: {
        Rng rng(p.seed);
        for (size_t k = out.size(); k > 1; --k) {
            const size_t j = static_cast<size_t>(rng.next_below(k));
            std::swap(out[k - 1], out[j]);
        }
        break;
    }
    }
    return out;
}

SplitIndices split_dataset(int n, double train_frac, double val_frac, uint64_t seed) {
    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    for (size_t k = order.size(); k > 1; --k) {
        const size_t j = static_cast<size_t>(rng.next_below(k));
        std::swap(order[k - 1], order[j]);
    }
    const int n_train = static_cast<int>(std::floor(n * train_frac));
    const int n_val = static_cast<int>(std::floor(n * val_frac));
    SplitIndices s;
    s.train.assign(order.begin(), order.begin() + n_train);
    s.val.assign(order.begin() + n_train, order.begin() + n_train + n_val);
    s.test.assign(order.begin() + n_train + n_val, order.end());
    return s;
}

Dataset take(const Dataset &ds, std::span<const int> indices, const std::string &tag) {
    Dataset out;
    out.n_classes = ds.n_classes;
    out.height = ds.height;
    out.width = ds.width;
    out.channels = ds.channels;
    out.split_tag = tag;
    for (const int i : indices) {
        out.features.push_back(ds.features[static_cast<size_t>(i)]);
        out.labels.push_back(ds.labels[static_cast<size_t>(i)]);
    }
    return out;
}

} // namespace dqhfnn::data
