// dqhfnn — command-line front end: training, evaluation, circuit
// characterization, noise sweeps, pairing audits, robustness reports.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dqhfnn/characterize.hpp"
#include "dqhfnn/circuits.hpp"
#include "dqhfnn/data.hpp"
#include "dqhfnn/model.hpp"
#include "dqhfnn/noise.hpp"
#include "dqhfnn/pairing.hpp"
#include "dqhfnn/rng.hpp"
#include "dqhfnn/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dqhfnn;

namespace {

constexpr const char *kVersion = "0.1.0";
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

std::string csv_header(const std::string &command, uint64_t seed) {
    return "dqhfnn " + command + " " + kVersion + " seed=" + std::to_string(seed);
}

void write_file(const std::string &path, const std::string &content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw data::FormatError("cannot open '" + path + "' for writing");
    os << content;
    if (!os) throw data::FormatError("write to '" + path + "' failed");
}

/// Flat sectioned key-value config. Lines: `[section]`, `key = value`,
/// comments with `#`. Unknown keys are hard errors.
class Config {
  public:
    static Config parse_file(const std::string &path) {
        std::ifstream is(path);
        if (!is) throw data::FormatError("config: cannot open '" + path + "'");
        std::stringstream ss;
        ss << is.rdbuf();
        return parse(ss.str());
    }

    static Config parse(const std::string &text) {
        Config c;
        c.raw_ = text;
        std::istringstream is(text);
        std::string line, section;
        int lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw qsim::UsageError("config line " + std::to_string(lineno) +
                                           ": malformed section header");
                section = trim(line.substr(1, line.size() - 2));
                continue;
            }
            auto eq = line.find('=');
            if (eq == std::string::npos)
                throw qsim::UsageError("config line " + std::to_string(lineno) +
                                       ": expected key = value");
            std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            if (key.empty())
                throw qsim::UsageError("config line " + std::to_string(lineno) + ": empty key");
            c.values_[section + "." + key] = value;
        }
        return c;
    }

    std::optional<std::string> get(const std::string &key) const {
        auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        used_.insert(key);
        return it->second;
    }

    std::string get_or(const std::string &key, const std::string &fallback) const {
        auto v = get(key);
        return v ? *v : fallback;
    }

    double get_double(const std::string &key, double fallback) const {
        auto v = get(key);
        return v ? std::stod(*v) : fallback;
    }

    long get_long(const std::string &key, long fallback) const {
        auto v = get(key);
        return v ? std::stol(*v) : fallback;
    }

    bool get_bool(const std::string &key, bool fallback) const {
        auto v = get(key);
        if (!v) return fallback;
        if (*v == "true" || *v == "1") return true;
        if (*v == "false" || *v == "0") return false;
        throw qsim::UsageError("config: key '" + key + "' must be boolean, got '" + *v + "'");
    }

    /// Every key must have been consumed; typos fail loudly.
    void reject_unknown() const {
        for (const auto &[key, value] : values_)
            if (!used_.count(key)) throw qsim::UsageError("config: unknown key '" + key + "'");
    }

    /// FNV-1a over the canonicalized (sorted) key-value list.
    uint64_t hash() const {
        uint64_t h = 1469598103934665603ULL;
        auto mix = [&h](const std::string &s) {
            for (unsigned char ch : s) {
                h ^= ch;
                h *= 1099511628211ULL;
            }
        };
        for (const auto &[key, value] : values_) {
            mix(key);
            mix("=");
            mix(value);
            mix("\n");
        }
        return h;
    }

  private:
    static std::string trim(const std::string &s) {
        auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return "";
        auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    std::map<std::string, std::string> values_;
    mutable std::set<std::string> used_;
    std::string raw_;
};

std::vector<double> parse_gamma_grid(const std::string &grid) {
    double start = 0, stop = 0;
    int count = 0;
    char c1 = 0, c2 = 0;
    std::istringstream is(grid);
    if (!(is >> start >> c1 >> stop >> c2 >> count) || c1 != ':' || c2 != ':' || count < 1 ||
        !(is >> std::ws).eof())
        throw qsim::UsageError("invalid gamma grid '" + grid + "', expected start:stop:count");
    if (start < 0.0 || stop > 1.0 || stop < start)
        throw qsim::UsageError("gamma grid must satisfy 0 <= start <= stop <= 1");
    std::vector<double> gammas(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i)
        gammas[static_cast<size_t>(i)] =
            count == 1 ? start : start + (stop - start) * i / (count - 1);
    return gammas;
}

std::vector<std::string> split_list(const std::string &text, char sep) {
    std::vector<std::string> out;
    std::istringstream is(text);
    std::string item;
    while (std::getline(is, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

struct LoadedData {
    data::Dataset train, val, test;
    int height = 0, width = 0, channels = 1;
};

/// Reads a dataset manifest JSON {name, csv/images/labels paths, classes,
/// shape, split fractions, seed}, loads and splits it.
LoadedData load_from_manifest(const std::string &path, uint64_t fallback_seed) {
    std::ifstream is(path);
    if (!is) throw data::FormatError("manifest: cannot open '" + path + "'");
    json m;
    try {
        m = json::parse(is);
    } catch (const json::exception &e) {
        throw data::FormatError(std::string("manifest: ") + e.what());
    }

    data::Dataset full;
    const fs::path base = fs::path(path).parent_path();
    auto resolve = [&base](const std::string &p) {
        fs::path fp(p);
        return fp.is_absolute() ? fp.string() : (base / fp).string();
    };
    if (m.contains("csv")) {
        full = data::load_csv(resolve(m["csv"].get<std::string>()),
                              m.value("label_column", std::string("label")));
    } else if (m.contains("images") && m.contains("labels")) {
        full = data::load_idx(resolve(m["images"].get<std::string>()),
                              resolve(m["labels"].get<std::string>()));
    } else {
        throw data::FormatError("manifest: need either 'csv' or 'images'+'labels'");
    }
    if (m.contains("classes")) full.n_classes = m["classes"].get<int>();
    if (m.contains("shape")) {
        auto shape = m["shape"];
        full.height = shape.at(0).get<int>();
        full.width = shape.at(1).get<int>();
        full.channels = shape.size() > 2 ? shape.at(2).get<int>() : 1;
        if (full.height * full.width * full.channels != full.feature_dim())
            throw data::FormatError("manifest: shape does not match feature dimension");
    }
    const double train_frac = m.value("train_fraction", 0.7);
    const double val_frac = m.value("val_fraction", 0.15);
    const uint64_t seed = m.value("seed", fallback_seed);

    auto split = data::split_dataset(full.size(), train_frac, val_frac, seed);
    LoadedData out;
    out.train = data::take(full, split.train, "train");
    out.val = data::take(full, split.val, "val");
    out.test = data::take(full, split.test, "test");
    out.height = full.height;
    out.width = full.width;
    out.channels = full.channels;
    return out;
}

pairing::PairingConfig pairing_from_config(const Config &cfg, uint64_t seed) {
    pairing::PairingConfig pc;
    if (auto tp = cfg.get("pairing.total_pairs")) pc.total_pairs = std::stoi(*tp);
    if (auto sr = cfg.get("pairing.sampling_ratio")) pc.sampling_ratio = std::stod(*sr);
    if (!pc.total_pairs && !pc.sampling_ratio) pc.sampling_ratio = 0.30;
    pc.random_fraction = cfg.get_double("pairing.random_fraction", 1.0);
    pc.grid_rows = static_cast<int>(cfg.get_long("pairing.grid_rows", 0));
    pc.grid_cols = static_cast<int>(cfg.get_long("pairing.grid_cols", 0));
    pc.center_bias = cfg.get_bool("pairing.center_bias", true);
    pc.seed = seed;
    return pc;
}

/// Range of the standardized training features, used to map raw pair values
/// onto rotation angles.
circuits::FeatureRange train_feature_range(const data::Dataset &train) {
    double lo = 0.0, hi = 1.0;
    bool first = true;
    for (const auto &row : train.features)
        for (double v : row) {
            if (first) {
                lo = hi = v;
                first = false;
            } else {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
    if (!(hi > lo)) hi = lo + 1.0;
    return circuits::FeatureRange(lo, hi);
}

struct CommonArgs {
    std::string config_path;
    std::string arch = "C";
    uint64_t seed = 1;
    std::string out_dir = "out";
    int workers = 1;
};

struct TrainSetup {
    Config cfg;
    LoadedData ds;
    model::Model m;
    train::TrainConfig tc;
};

TrainSetup setup_training(const CommonArgs &common, bool arch_flag_set, bool seed_flag_set) {
    TrainSetup s{Config{}, {}, {}, {}};
    if (common.config_path.empty())
        throw qsim::UsageError("train: --config is required");
    s.cfg = Config::parse_file(common.config_path);

    const uint64_t seed = seed_flag_set
                              ? common.seed
                              : static_cast<uint64_t>(s.cfg.get_long("run.seed", 1));
    (void)s.cfg.get("run.seed");
    (void)s.cfg.get("run.out");

    auto manifest = s.cfg.get("data.manifest");
    if (!manifest) throw qsim::UsageError("config: data.manifest is required");
    s.ds = load_from_manifest(*manifest, seed);

    // Standardize on train statistics.
    auto stats = data::compute_stats(s.ds.train);
    s.ds.train = data::standardize(s.ds.train, stats);
    s.ds.val = data::standardize(s.ds.val, stats);
    s.ds.test = data::standardize(s.ds.test, stats);

    pairing::PairingConfig pc = pairing_from_config(s.cfg, seed);
    pairing::PairingPlan plan;
    if (s.ds.height > 0 && s.ds.width > 0)
        plan = pairing::build_plan(pc, pairing::ImageShape{s.ds.height, s.ds.width,
                                                           s.ds.channels});
    else
        plan = pairing::build_plan(pc, s.ds.train.feature_dim());

    model::ModelConfig mc;
    mc.arch = arch_flag_set ? common.arch : s.cfg.get_or("model.arch", "C");
    mc.branch = model::branch_from_string(s.cfg.get_or("model.branch", "hybrid"));
    mc.n_classes = s.ds.train.n_classes;
    mc.input_dim = s.ds.train.feature_dim();
    mc.hidden_dim = static_cast<int>(s.cfg.get_long("model.hidden_dim", 128));
    mc.fusion_dim = static_cast<int>(s.cfg.get_long("model.fusion_dim", 64));
    mc.dropout_rate = s.cfg.get_double("model.dropout", 0.3);

    s.m = model::build_model(mc, plan, train_feature_range(s.ds.train), seed);
    s.m.stats = stats;

    s.tc.optimizer = train::optimizer_from_string(s.cfg.get_or("train.optimizer", "sgd"));
    const std::string sched = s.cfg.get_or("train.schedule", "multistep");
    if (sched == "multistep") {
        s.tc.schedule.kind = train::ScheduleKind::multistep;
        s.tc.schedule.milestones.clear();
        for (const auto &ms : split_list(s.cfg.get_or("train.milestones", "56,78"), ','))
            s.tc.schedule.milestones.push_back(std::stoi(ms));
        s.tc.schedule.factor = s.cfg.get_double("train.factor", 0.1);
    } else if (sched == "warmup_cosine") {
        s.tc.schedule.kind = train::ScheduleKind::warmup_cosine;
        s.tc.schedule.warmup_epochs = static_cast<int>(s.cfg.get_long("train.warmup_epochs", 3));
    } else {
        throw qsim::UsageError("config: unknown schedule '" + sched + "'");
    }
    s.tc.schedule.base_lr = s.cfg.get_double("train.base_lr", 1e-2);
    s.tc.epochs = static_cast<int>(s.cfg.get_long(
        "train.epochs", s.tc.optimizer == train::OptimizerKind::sgd_momentum ? 80 : 60));
    s.tc.schedule.total_epochs = s.tc.epochs;
    s.tc.batch_size = static_cast<int>(s.cfg.get_long("train.batch_size", 32));
    s.tc.weight_decay = s.cfg.get_double("train.weight_decay", 1e-2);
    s.tc.seed = seed;
    s.tc.n_workers = common.workers;

    s.cfg.reject_unknown();
    return s;
}

int cmd_train(const CommonArgs &common, bool arch_flag_set, bool seed_flag_set) {
    auto s = setup_training(common, arch_flag_set, seed_flag_set);
    fs::create_directories(common.out_dir);

    auto report = train::fit(s.m, s.ds.train, s.ds.val, s.ds.test, s.tc);

    write_file((fs::path(common.out_dir) / "train_report.csv").string(),
               report.to_csv(csv_header("train", s.tc.seed)));
    json summary = {{"accuracy", report.test_metrics.accuracy},
                    {"macro_precision", report.test_metrics.macro_precision},
                    {"macro_recall", report.test_metrics.macro_recall},
                    {"macro_f1", report.test_metrics.macro_f1},
                    {"seed", s.tc.seed},
                    {"config_hash", s.cfg.hash()}};
    write_file((fs::path(common.out_dir) / "summary.json").string(), summary.dump(2) + "\n");
    model::save_checkpoint(s.m, (fs::path(common.out_dir) / "checkpoint.txt").string());

    std::cout << "test accuracy " << report.test_metrics.accuracy << ", macro F1 "
              << report.test_metrics.macro_f1 << '\n';
    return kExitOk;
}

int cmd_eval(const CommonArgs &common, const std::string &checkpoint_path) {
    if (common.config_path.empty()) throw qsim::UsageError("eval: --config is required");
    Config cfg = Config::parse_file(common.config_path);
    auto manifest = cfg.get("data.manifest");
    if (!manifest) throw qsim::UsageError("config: data.manifest is required");

    model::Model m = model::load_checkpoint(checkpoint_path);
    auto ds = load_from_manifest(*manifest, common.seed);
    data::FeatureStats stats{m.stats.mean, m.stats.stddev};
    auto test = data::standardize(ds.test, stats);

    auto eval = model::evaluate(m, test, common.workers);
    auto metrics = nn::macro_metrics(eval.predicted, test.labels, m.config.n_classes);
    json out = {{"accuracy", metrics.accuracy},
                {"macro_precision", metrics.macro_precision},
                {"macro_recall", metrics.macro_recall},
                {"macro_f1", metrics.macro_f1},
                {"loss", eval.loss},
                {"n", test.size()},
                {"seed", common.seed}};
    fs::create_directories(common.out_dir);
    write_file((fs::path(common.out_dir) / "eval.json").string(), out.dump(2) + "\n");
    std::cout << out.dump(2) << '\n';
    return kExitOk;
}

int cmd_characterize(const CommonArgs &common, const std::string &arch_list, int samples,
                     int bins) {
    std::vector<std::string> names = arch_list.empty() || arch_list == "all"
                                         ? circuits::registry_names()
                                         : split_list(arch_list, ',');
    std::ostringstream csv;
    csv << "# " << csv_header("characterize", common.seed) << '\n';
    csv << "arch,metric,value,n,seed\n";
    for (const auto &name : names) {
        const auto &arch = circuits::registry_lookup(name);
        auto expr = characterize::expressibility(arch, samples, bins, common.seed, true,
                                                 common.workers);
        auto ent = characterize::entangling_capability(arch, std::max(samples / 2, 1),
                                                       common.seed, true, common.workers);
        csv << characterize::report_csv_row(name, "expressibility", expr.kl_value, expr.n_pairs,
                                            common.seed);
        csv << characterize::report_csv_row(name, "entanglement", ent.mean_q, ent.n_samples,
                                            common.seed);
    }
    fs::create_directories(common.out_dir);
    write_file((fs::path(common.out_dir) / "characterize.csv").string(), csv.str());
    std::cout << csv.str();
    return kExitOk;
}

int cmd_noise(const CommonArgs &common, const std::string &grid, int n_inputs,
              const std::string &theta_source, const std::string &mode_name) {
    const auto &arch = circuits::registry_lookup(common.arch);
    std::vector<double> theta;
    if (theta_source == "zero") {
        theta.assign(static_cast<size_t>(arch.param_count), 0.0);
    } else if (theta_source == "random") {
        Rng rng(common.seed);
        theta.resize(static_cast<size_t>(arch.param_count));
        for (auto &t : theta) t = rng.uniform(0.0, 2.0 * M_PI);
    } else {
        for (const auto &tok : split_list(theta_source, ','))
            theta.push_back(std::stod(tok));
        if (static_cast<int>(theta.size()) != arch.param_count)
            throw qsim::UsageError("noise: --theta needs " + std::to_string(arch.param_count) +
                                   " values for arch " + common.arch);
    }
    noise::SweepInputMode mode;
    if (mode_name == "raw")
        mode = noise::SweepInputMode::raw;
    else if (mode_name == "normalized")
        mode = noise::SweepInputMode::normalized;
    else
        throw qsim::UsageError("noise: --input-mode must be raw or normalized");

    auto gammas = parse_gamma_grid(grid);
    const std::vector<noise::ChannelKind> kinds = {noise::ChannelKind::AD, noise::ChannelKind::PF,
                                                   noise::ChannelKind::DP,
                                                   noise::ChannelKind::BF};
    auto report = noise::fidelity_sweep(arch, theta, kinds, gammas, n_inputs, common.seed, mode,
                                        common.workers);
    auto csv = noise::sweep_to_csv(report, csv_header("noise", common.seed));
    fs::create_directories(common.out_dir);
    write_file((fs::path(common.out_dir) / "noise.csv").string(), csv);
    std::cout << csv;
    return kExitOk;
}

int cmd_pairs(const CommonArgs &common, int height, int width, int channels, int vector_length,
              double ratio, int total_pairs, double random_fraction) {
    pairing::PairingConfig pc;
    if (total_pairs > 0)
        pc.total_pairs = total_pairs;
    else
        pc.sampling_ratio = ratio;
    pc.random_fraction = random_fraction;
    pc.seed = common.seed;

    pairing::PairingPlan plan;
    if (vector_length > 0)
        plan = pairing::build_plan(pc, vector_length);
    else
        plan = pairing::build_plan(pc, pairing::ImageShape{height, width, channels});

    auto csv = pairing::plan_to_csv(plan, csv_header("pairs", common.seed));
    fs::create_directories(common.out_dir);
    write_file((fs::path(common.out_dir) / "pairs.csv").string(), csv);
    std::cout << plan.n_fixed << " fixed + " << plan.n_random << " random per channel; "
              << plan.total_pairs() << " pairs, " << plan.total_features() << " features\n";
    return kExitOk;
}

int cmd_robustness(const CommonArgs &common, const std::string &checkpoint_path,
                   const std::string &perturbation_list) {
    if (common.config_path.empty()) throw qsim::UsageError("robustness: --config is required");
    Config cfg = Config::parse_file(common.config_path);
    auto manifest = cfg.get("data.manifest");
    if (!manifest) throw qsim::UsageError("config: data.manifest is required");

    model::Model m = model::load_checkpoint(checkpoint_path);
    auto ds = load_from_manifest(*manifest, common.seed);
    if (ds.test.feature_dim() != m.config.input_dim)
        throw data::FormatError("robustness: checkpoint/data feature dimension mismatch");
    data::FeatureStats stats{m.stats.mean, m.stats.stddev};

    std::ostringstream csv;
    csv << "# " << csv_header("robustness", common.seed) << '\n';
    csv << "perturbation,magnitude,mean_divergence,n,seed\n";

    auto base = model::evaluate(m, data::standardize(ds.test, stats), common.workers);

    // Perturbations act on raw values, so clamp to the observed raw range.
    double raw_lo = 0.0, raw_hi = 1.0;
    if (ds.test.size() > 0) {
        raw_lo = raw_hi = ds.test.features.front().front();
        for (const auto &img : ds.test.features)
            for (double v : img) {
                raw_lo = std::min(raw_lo, v);
                raw_hi = std::max(raw_hi, v);
            }
        if (!(raw_hi > raw_lo)) raw_hi = raw_lo + 1.0;
    }

    for (const auto &spec : split_list(perturbation_list, ',')) {
        auto colon = spec.find(':');
        if (colon == std::string::npos)
            throw qsim::UsageError("robustness: perturbation must be kind:magnitude");
        const std::string kind_name = spec.substr(0, colon);
        const double magnitude = std::stod(spec.substr(colon + 1));
        data::Perturbation p;
        p.magnitude = magnitude;
        p.seed = common.seed;
        p.clamp_lo = raw_lo;
        p.clamp_hi = raw_hi;
        if (kind_name == "brightness")
            p.kind = data::PerturbationKind::brightness;
        else if (kind_name == "contrast")
            p.kind = data::PerturbationKind::contrast;
        else if (kind_name == "local_shuffle")
            p.kind = data::PerturbationKind::local_shuffle;
        else if (kind_name == "global_shuffle")
            p.kind = data::PerturbationKind::global_shuffle;
        else
            throw qsim::UsageError("robustness: unknown perturbation '" + kind_name + "'");

        data::Dataset perturbed = ds.test;
        const int ph = ds.height > 0 ? ds.height : 1;
        const int pw = ds.width > 0 ? ds.width : perturbed.feature_dim();
        for (auto &img : perturbed.features) img = data::perturb(img, ph, pw, p);
        auto shifted = model::evaluate(m, data::standardize(perturbed, stats), common.workers);

        double total = 0.0;
        for (int i = 0; i < ds.test.size(); ++i)
            total += nn::prediction_divergence(base.probs[static_cast<size_t>(i)],
                                               shifted.probs[static_cast<size_t>(i)]);
        const double mean = ds.test.size() > 0 ? total / ds.test.size() : 0.0;
        csv << kind_name << ',' << magnitude << ',';
        csv.precision(6);
        csv << std::fixed << mean << std::defaultfloat << ',' << ds.test.size() << ','
            << common.seed << '\n';
    }
    fs::create_directories(common.out_dir);
    write_file((fs::path(common.out_dir) / "robustness.csv").string(), csv.str());
    std::cout << csv.str();
    return kExitOk;
}

int cmd_gradcheck(const CommonArgs &common, const std::string &branch_name, double tolerance) {
    // Small synthetic problem exercising every tensor.
    data::ParityTask task = data::synth_pair_parity(16, 4, common.seed);
    model::ModelConfig mc;
    mc.arch = common.arch;
    mc.branch = model::branch_from_string(branch_name);
    mc.n_classes = 2;
    mc.input_dim = task.dataset.feature_dim();
    mc.hidden_dim = 8;
    mc.fusion_dim = 6;
    mc.dropout_rate = 0.0;

    pairing::PairingConfig pc;
    pc.total_pairs = 4;
    pc.seed = common.seed;
    auto plan = pairing::build_plan(pc, pairing::ImageShape{4, 4, 1});
    auto m = model::build_model(mc, plan, circuits::FeatureRange(0.0, 1.0), common.seed);

    auto res = train::gradient_check(m, task.dataset, tolerance, 4);
    std::cout << (res.pass ? "pass" : "FAIL") << " max_deviation " << res.max_deviation
              << " tolerance " << tolerance << '\n';
    return res.pass ? kExitOk : kExitNumeric;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"dual-qubit hierarchical fuzzy neural network toolkit"};
    app.require_subcommand(1);

    CommonArgs common;
    auto add_common = [&common](CLI::App *cmd) {
        cmd->add_option("--config", common.config_path, "config file path");
        cmd->add_option("--arch", common.arch, "circuit architecture name");
        cmd->add_option("--seed", common.seed, "random seed");
        cmd->add_option("--out", common.out_dir, "output directory");
        cmd->add_option("--workers", common.workers, "parallel workers (1 = reproducible)");
    };

    auto *train_cmd = app.add_subcommand("train", "train a model from a config file");
    add_common(train_cmd);

    auto *eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint");
    add_common(eval_cmd);
    std::string checkpoint_path;
    eval_cmd->add_option("--checkpoint", checkpoint_path, "checkpoint file")->required();

    auto *char_cmd = app.add_subcommand("characterize", "circuit expressibility/entanglement");
    add_common(char_cmd);
    std::string arch_list = "all";
    int samples = characterize::kDefaultPairs;
    int bins = characterize::kDefaultBins;
    char_cmd->add_option("--archs", arch_list, "comma list of architectures, or 'all'");
    char_cmd->add_option("--samples", samples, "state pairs per architecture");
    char_cmd->add_option("--bins", bins, "fidelity histogram bins");

    auto *noise_cmd = app.add_subcommand("noise", "channel fidelity sweep");
    add_common(noise_cmd);
    std::string grid = "0.0:0.5:11";
    int n_inputs = 200;
    std::string theta_source = "zero";
    std::string input_mode = "raw";
    noise_cmd->add_option("--gamma", grid, "gamma grid start:stop:count");
    noise_cmd->add_option("--inputs", n_inputs, "input samples per cell");
    noise_cmd->add_option("--theta", theta_source, "zero | random | comma list");
    noise_cmd->add_option("--input-mode", input_mode, "raw | normalized");

    auto *pairs_cmd = app.add_subcommand("pairs", "export a pairing plan");
    add_common(pairs_cmd);
    int height = 32, width = 32, channels = 1, vector_length = 0, total_pairs = 0;
    double ratio = 0.30, random_fraction = 1.0;
    pairs_cmd->add_option("--height", height, "image height");
    pairs_cmd->add_option("--width", width, "image width");
    pairs_cmd->add_option("--channels", channels, "image channels");
    pairs_cmd->add_option("--vector-length", vector_length, "flat vector mode length");
    pairs_cmd->add_option("--ratio", ratio, "sampling ratio");
    pairs_cmd->add_option("--total-pairs", total_pairs, "explicit pair budget");
    pairs_cmd->add_option("--random-fraction", random_fraction, "fraction of random pairs");

    auto *rob_cmd = app.add_subcommand("robustness", "prediction divergence under perturbation");
    add_common(rob_cmd);
    std::string rob_checkpoint, perturbations = "brightness:0.1,local_shuffle:2,global_shuffle:0";
    rob_cmd->add_option("--checkpoint", rob_checkpoint, "checkpoint file")->required();
    rob_cmd->add_option("--perturbations", perturbations, "comma list kind:magnitude");

    auto *grad_cmd = app.add_subcommand("gradcheck", "finite-difference gradient audit");
    add_common(grad_cmd);
    std::string branch = "hybrid";
    double tolerance = 1e-5;
    grad_cmd->add_option("--branch", branch, "hybrid | quantum_only | classical_only");
    grad_cmd->add_option("--tolerance", tolerance, "max allowed deviation");

    int parsed_argc = argc;
    try {
        app.parse(parsed_argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (train_cmd->parsed())
            return cmd_train(common, train_cmd->count("--arch") > 0,
                             train_cmd->count("--seed") > 0);
        if (eval_cmd->parsed()) return cmd_eval(common, checkpoint_path);
        if (char_cmd->parsed()) return cmd_characterize(common, arch_list, samples, bins);
        if (noise_cmd->parsed())
            return cmd_noise(common, grid, n_inputs, theta_source, input_mode);
        if (pairs_cmd->parsed())
            return cmd_pairs(common, height, width, channels, vector_length, ratio, total_pairs,
                             random_fraction);
        if (rob_cmd->parsed()) return cmd_robustness(common, rob_checkpoint, perturbations);
        if (grad_cmd->parsed()) return cmd_gradcheck(common, branch, tolerance);
    } catch (const qsim::UsageError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const data::FormatError &e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const train::NumericError &e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitConfig;
}
