#include "cli.hpp"

#include "scml/dataio.hpp"
#include "scml/error.hpp"
#include "scml/metrics.hpp"
#include "scml/pipeline.hpp"
#include "scml/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace scml::cli {

namespace {

using nlohmann::json;

struct EmbedArgs {
    std::string input;
    std::string output;
    Index dim = 2;
    Index k1 = 20;
    Index k2 = 0;
    double gamma = default_gamma;
    Index epochs = 50;
    Index warmup = 10;
    double eta_max = 0.0;
    double eta_min = 0.0;
    std::uint64_t seed = 0;
    Index label_col = 0;
    bool diagnostics = false;
    unsigned threads = 0;
};

struct MetricsArgs {
    std::string high;
    std::string low;
    std::string labels;
    Index labels_col = 0;
    Index high_label_col = 0;
    Index low_label_col = 0;
    std::string sample_indices;
    std::vector<std::string> metrics{"cc"};
    std::uint64_t seed = 0;
    Index k = 5;
    Index repeats = 5;
    Index iterations = 200;
    std::uint64_t pair_budget = 0;
};

struct SynthArgs {
    std::string kind;
    std::string output;
    Index n = 0;
    std::uint64_t seed = 0;
    Index classes = 3;
    Index dim = 10;
    double spread = 1.0;
    Index rows = 30;
    Index cols = 30;
    double jitter = 0.2;
    double length = 10.0;
    double gap = 1.0;
};

// Raised for argument combinations CLI11 cannot express.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json diagnostics_detail(const StageTiming& t, const Diagnostics& d) {
    json detail = json::object();
    if (t.stage == "preprocess") {
        detail = {{"input_rows", d.input_rows}, {"unique_rows", d.unique_rows}};
    } else if (t.stage == "pca") {
        detail = {{"applied", d.pca_applied}, {"search_dim", d.search_dim}};
    } else if (t.stage == "sampling") {
        detail = {{"k1", d.k1}, {"landmark_count", d.landmark_count}, {"sample_rate", d.sample_rate}};
    } else if (t.stage == "affinity") {
        detail = {{"k2", d.k2}};
    } else if (t.stage == "optimize") {
        detail = {{"loss_history", d.loss_history}};
    }
    return detail;
}

void write_diagnostics(const std::filesystem::path& path, const Diagnostics& d) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    double total = 0.0;
    for (const auto& t : d.timings) {
        total += t.wall_ms;
        out << json{{"stage", t.stage}, {"wall_ms", t.wall_ms}, {"detail", diagnostics_detail(t, d)}}.dump() << '\n';
    }
    out << json{{"stage", "total"},
                {"wall_ms", total},
                {"detail",
                 {{"landmark_count", d.landmark_count},
                  {"sample_rate", d.sample_rate},
                  {"k1", d.k1},
                  {"k2", d.k2},
                  {"loss_history", d.loss_history}}}}
               .dump()
        << '\n';
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

int run_embed(const EmbedArgs& a, const CLI::App& sub, std::ostream& out) {
    std::optional<Index> label_col;
    if (sub.count("--label-col") > 0) {
        label_col = a.label_col;
    }
    const Dataset data = load_dataset(a.input, label_col);

    ScmlConfig cfg;
    cfg.dim = a.dim;
    cfg.k1 = a.k1;
    if (sub.count("--k2") > 0) {
        cfg.k2 = a.k2;
    }
    cfg.gamma = a.gamma;
    cfg.optimizer.epochs = a.epochs;
    cfg.optimizer.warmup = a.warmup;
    if (sub.count("--eta-max") > 0) {
        cfg.optimizer.eta_max = a.eta_max;
    }
    if (sub.count("--eta-min") > 0) {
        cfg.optimizer.eta_min = a.eta_min;
    }
    cfg.seed = a.seed;
    cfg.threads = a.threads;

    const EmbedResult res = embed(data, cfg);
    write_embedding(a.output, res.coords, data.labels, DedupMap::identity(data.size()));
    if (a.diagnostics) {
        write_diagnostics(std::filesystem::path(a.output).replace_extension(".diag"), res.diagnostics);
    }
    out << "embedded " << data.size() << " rows (" << res.diagnostics.landmark_count << " landmarks) -> "
        << a.output << '\n';
    return ok;
}

std::size_t count_columns(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw FileNotFound(path);
    }
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") != std::string::npos) {
            return static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
        }
    }
    throw EmptyDataset();
}

IndexList load_indices(const std::string& path) {
    const Dataset d = load_dataset(path);
    IndexList out;
    out.reserve(d.size());
    for (Eigen::Index r = 0; r < d.points.rows(); ++r) {
        const double v = d.points(r, 0);
        if (v < 0.0 || v != std::floor(v)) {
            throw ParseError(static_cast<std::size_t>(r), 0, "sample index must be a non-negative integer");
        }
        out.push_back(static_cast<Index>(v));
    }
    return out;
}

int run_metrics(const MetricsArgs& a, const CLI::App& sub, std::ostream& out) {
    const auto needs = [&](const std::string& m) {
        return std::find(a.metrics.begin(), a.metrics.end(), m) != a.metrics.end();
    };
    const bool need_labels = needs("odoc") || needs("knn-acc") || needs("kmeans-acc");
    const bool need_high = needs("cc") || needs("odoc");
    const bool need_low = needs("cc") || needs("knn-acc") || needs("kmeans-acc");
    if (need_labels && a.labels.empty()) {
        throw UsageError("metrics odoc, knn-acc and kmeans-acc require --labels");
    }
    if (need_high && a.high.empty()) {
        throw UsageError("metrics cc and odoc require --high");
    }
    if (need_low && a.low.empty()) {
        throw UsageError("metrics cc, knn-acc and kmeans-acc require --low");
    }
    if (needs("odoc") && a.sample_indices.empty()) {
        throw UsageError("metric odoc requires --sample-indices");
    }

    const auto optional_col = [&](const char* flag, Index v) -> std::optional<Index> {
        return sub.count(flag) > 0 ? std::optional<Index>(v) : std::nullopt;
    };
    std::optional<Dataset> high;
    std::optional<Dataset> low;
    if (need_high) {
        high = load_dataset(a.high, optional_col("--high-label-col", a.high_label_col));
    }
    if (need_low) {
        low = load_dataset(a.low, optional_col("--low-label-col", a.low_label_col));
    }
    if (high && low && high->size() != low->size()) {
        throw UsageError("--high and --low have different row counts");
    }
    std::optional<LabelVector> labels;
    if (need_labels) {
        const Index col = sub.count("--labels-col") > 0 ? a.labels_col : count_columns(a.labels) - 1;
        const Dataset lab = load_dataset(a.labels, col);
        labels = LabelVector::from_raw(*lab.labels);
        const Index rows = high ? high->size() : low->size();
        if (labels->size() != rows) {
            throw UsageError("label count does not match the data row count");
        }
    }

    const std::string seed = std::to_string(a.seed);
    for (const auto& m : a.metrics) {
        MetricReport r;
        r.name = m;
        if (m == "cc") {
            const std::optional<std::uint64_t> budget =
                sub.count("--pair-budget") > 0 ? std::optional<std::uint64_t>(a.pair_budget) : std::nullopt;
            const auto cc = congruence(high->points, low->points, budget, a.seed);
            r.value = cc.value;
            r.params = {{"pairs", std::to_string(cc.pairs)}, {"sampled", cc.sampled ? "1" : "0"}, {"seed", seed}};
        } else if (m == "odoc") {
            const IndexList idx = load_indices(a.sample_indices);
            r.value = odoc(high->points, *labels, idx);
            r.params = {{"sampled", std::to_string(idx.size())}};
        } else if (m == "knn-acc") {
            r.value = knn_classifier_acc(low->points, *labels, a.k, a.repeats, a.seed);
            r.params = {{"k", std::to_string(a.k)}, {"repeats", std::to_string(a.repeats)}, {"seed", seed}};
        } else if (m == "kmeans-acc") {
            r.value = kmeans_cluster_acc(low->points, *labels, a.iterations, a.seed);
            r.params = {{"clusters", std::to_string(labels->num_classes)},
                        {"iterations", std::to_string(a.iterations)},
                        {"seed", seed}};
        }
        out << r.to_csv() << '\n';
    }
    return ok;
}

int run_synth(const SynthArgs& a, const CLI::App& sub, std::ostream& out) {
    Dataset d;
    if (a.kind == "cuboids3") {
        if (a.n < 3) {
            throw UsageError("cuboids3 needs --n >= 3");
        }
        d = gen_cuboids3(a.n, a.seed, CuboidGeometry{a.length, a.gap});
    } else if (a.kind == "blobs") {
        if (a.n < 1 || a.n < a.classes) {
            throw UsageError("blobs need --n >= --classes >= 1");
        }
        d = gen_blobs(a.n, a.classes, a.dim, a.spread, a.seed);
    } else {
        if (sub.count("--n") > 0) {
            throw UsageError("grid2d takes --rows and --cols, not --n");
        }
        d = gen_grid2d(a.rows, a.cols, a.jitter, a.seed);
        d.labels = quadrant_labels(d.points);
    }
    write_embedding(a.output, d.points, d.labels, DedupMap::identity(d.size()));
    out << "wrote " << d.size() << " rows -> " << a.output << '\n';
    return ok;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"scml: landmark-based nonlinear embedding", "scml"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for all subcommands");

    EmbedArgs ea;
    auto* embed_cmd = app.add_subcommand("embed", "Embed a CSV dataset");
    embed_cmd->add_option("--input", ea.input, "Input CSV")->required();
    embed_cmd->add_option("--output", ea.output, "Output coordinates CSV")->required();
    embed_cmd->add_option("--dim", ea.dim, "Embedding dimension")->capture_default_str()->check(CLI::PositiveNumber);
    embed_cmd->add_option("--k1", ea.k1, "Sampling neighbors (0: every point is a landmark)")->capture_default_str();
    embed_cmd->add_option("--k2", ea.k2, "Landmark-graph neighbors (default: from the landmark count)")
        ->check(CLI::PositiveNumber);
    embed_cmd->add_option("--gamma", ea.gamma, "Shared-neighbor aggregation coefficient")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    embed_cmd->add_option("--epochs", ea.epochs, "Training epochs")->capture_default_str();
    embed_cmd->add_option("--warmup", ea.warmup, "Constant learning-rate epochs")->capture_default_str();
    embed_cmd->add_option("--eta-max", ea.eta_max, "Peak learning rate (default 2.5 * landmarks)");
    embed_cmd->add_option("--eta-min", ea.eta_min, "Final learning rate (default 2 * landmarks)");
    embed_cmd->add_option("--seed", ea.seed, "Random seed")->capture_default_str();
    embed_cmd->add_option("--label-col", ea.label_col, "0-based label column, echoed as the last output column");
    embed_cmd->add_flag("--diagnostics", ea.diagnostics, "Write JSON-lines stage diagnostics to <output stem>.diag");
    embed_cmd->add_option("--threads", ea.threads, "Worker threads (0: all cores)")->capture_default_str();

    MetricsArgs ma;
    auto* metrics_cmd = app.add_subcommand("metrics", "Evaluate an embedding");
    metrics_cmd->add_option("--high", ma.high, "High-dimensional data CSV");
    metrics_cmd->add_option("--low", ma.low, "Embedding CSV");
    metrics_cmd->add_option("--labels", ma.labels, "CSV holding class labels");
    metrics_cmd->add_option("--labels-col", ma.labels_col, "Label column in --labels (default: last)");
    metrics_cmd->add_option("--high-label-col", ma.high_label_col, "Column of --high to drop");
    metrics_cmd->add_option("--low-label-col", ma.low_label_col, "Column of --low to drop");
    metrics_cmd->add_option("--sample-indices", ma.sample_indices, "Row indices of the sample (for odoc)");
    metrics_cmd->add_option("--metrics", ma.metrics, "Any of cc, odoc, knn-acc, kmeans-acc")
        ->delimiter(',')
        ->capture_default_str()
        ->check(CLI::IsMember({"cc", "odoc", "knn-acc", "kmeans-acc"}));
    metrics_cmd->add_option("--seed", ma.seed, "Random seed")->capture_default_str();
    metrics_cmd->add_option("--k", ma.k, "k-NN classifier neighbors")->capture_default_str()->check(CLI::PositiveNumber);
    metrics_cmd->add_option("--repeats", ma.repeats, "k-NN classifier splits")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    metrics_cmd->add_option("--iterations", ma.iterations, "K-means iterations")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    metrics_cmd->add_option("--pair-budget", ma.pair_budget, "Congruence pairs (default: all up to 2e7, else 1e6)")
        ->check(CLI::PositiveNumber);

    SynthArgs sa;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset");
    synth_cmd->add_option("--kind", sa.kind, "cuboids3, blobs or grid2d")
        ->required()
        ->check(CLI::IsMember({"cuboids3", "blobs", "grid2d"}));
    synth_cmd->add_option("--output", sa.output, "Output CSV")->required();
    synth_cmd->add_option("--n", sa.n, "Number of points (cuboids3, blobs)");
    synth_cmd->add_option("--seed", sa.seed, "Random seed")->capture_default_str();
    synth_cmd->add_option("--classes", sa.classes, "Blob count")->capture_default_str()->check(CLI::PositiveNumber);
    synth_cmd->add_option("--dim", sa.dim, "Blob dimension")->capture_default_str()->check(CLI::PositiveNumber);
    synth_cmd->add_option("--spread", sa.spread, "Blob standard deviation")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    synth_cmd->add_option("--rows", sa.rows, "Grid rows")->capture_default_str()->check(CLI::PositiveNumber);
    synth_cmd->add_option("--cols", sa.cols, "Grid columns")->capture_default_str()->check(CLI::PositiveNumber);
    synth_cmd->add_option("--jitter", sa.jitter, "Grid jitter")->capture_default_str()->check(CLI::NonNegativeNumber);
    synth_cmd->add_option("--length", sa.length, "Cuboid length")->capture_default_str()->check(CLI::PositiveNumber);
    synth_cmd->add_option("--gap", sa.gap, "Gap between cuboids")->capture_default_str()->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const CLI::App* failing = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        err << failing->help();
        return invalid_config;
    }

    try {
        if (embed_cmd->parsed()) {
            return run_embed(ea, *embed_cmd, out);
        }
        if (metrics_cmd->parsed()) {
            return run_metrics(ma, *metrics_cmd, out);
        }
        return run_synth(sa, *synth_cmd, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return invalid_config;
    } catch (const FileNotFound& e) {
        err << "error: " << e.what() << '\n';
        return io_error;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return io_error;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return io_error;
    } catch (const EmptyDataset& e) {
        err << "error: " << e.what() << '\n';
        return io_error;
    } catch (const Error& e) {
        // Remaining library errors stem from parameters that do not fit the data.
        err << "error: " << e.what() << '\n';
        return invalid_config;
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv;
    argv.push_back("scml");
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace scml::cli
