#include "rumour/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rumour/dataset.hpp"
#include "rumour/eval.hpp"
#include "rumour/features.hpp"
#include "rumour/model_io.hpp"
#include "rumour/report.hpp"

namespace fs = std::filesystem;

namespace rumour::cli {

int exit_code_for(Error::Kind kind) {
    switch (kind) {
        case Error::Kind::usage:
        case Error::Kind::path:
        case Error::Kind::structure:
            return kUsage;
        case Error::Kind::transport:
        case Error::Kind::protocol:
            return kService;
        case Error::Kind::parse:
        case Error::Kind::validation:
        case Error::Kind::lookup:
        case Error::Kind::dimension:
            return kData;
    }
    return kData;
}

namespace {

std::string timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

// Timestamps only ever appear in log lines.
void log(CommandIo io, const std::string& message) { io.err << "[" << timestamp() << "] " << message << '\n'; }

template <typename F>
int guarded(CommandIo io, const char* command, F&& body) {
    try {
        body();
        return kOk;
    } catch (const Error& e) {
        io.err << "rumour " << command << ": error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        io.err << "rumour " << command << ": error: " << e.what() << '\n';
        return kData;
    }
}

void require_file(const fs::path& p, const std::string& what) {
    if (!fs::is_regular_file(p)) throw PathError(what + " not found: " + p.string());
}

const fs::path& required(const std::optional<fs::path>& p, const std::string& key) {
    if (!p) throw UsageError("config is missing " + key);
    return *p;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw PathError("cannot create " + dir.string() + ": " + ec.message());
}

std::vector<EmbedItem> items_of(const LabeledDataset& ds) {
    std::vector<EmbedItem> items;
    items.reserve(ds.tweets.size());
    for (const auto& t : ds.tweets) items.push_back({t.id, t.text});
    return items;
}

struct Inputs {
    LabeledDataset dataset;
    std::map<Representation, RepresentationTable> tables;
};

Inputs load_inputs(const RunConfig& config, const std::vector<Representation>& reps) {
    const fs::path& data = required(config.dataset, "data.dataset");
    require_file(data, "dataset");
    for (const auto r : reps) {
        if (r == Representation::features39) require_file(required(config.features_csv, "data.features"), "feature CSV");
        else require_file(required(config.embedding_store, "data.embeddings"), "embedding store");
    }
    Inputs in;
    in.dataset = load_jsonl(data);
    in.dataset.validate();
    for (const auto r : reps) {
        if (in.tables.count(r)) continue;
        if (r == Representation::features39) in.tables.emplace(r, RepresentationTable::from_features(read_feature_csv(*config.features_csv)));
        else in.tables.emplace(r, RepresentationTable::from_store(load_store(*config.embedding_store)));
    }
    return in;
}

void check_run_config(const RunConfig& config) {
    if (config.representations.empty()) throw UsageError("run.representations is empty");
    if (config.algorithms.empty()) throw UsageError("run.algorithms is empty");
    if (!(config.split_fraction > 0.0 && config.split_fraction < 1.0))
        throw UsageError("run.split_fraction must be in (0, 1)");
    for (const auto a : kAllAlgorithms) config.train_config(a).validate();
}

std::string split_json(const SplitResult& split, const std::string& config_hash) {
    nlohmann::ordered_json j;
    j["seed"] = split.seed;
    j["train_fraction"] = split.train_fraction;
    j["config_hash"] = config_hash;
    j["train_ids"] = split.train_ids;
    j["test_ids"] = split.test_ids;
    return j.dump(1) + "\n";
}

}  // namespace

int cmd_ingest(const fs::path& root, const fs::path& out_jsonl, CommandIo io) {
    return guarded(io, "ingest", [&] {
        log(io, "reading PHEME tree " + root.string());
        const LabeledDataset ds = load_pheme(root);
        if (out_jsonl.has_parent_path()) ensure_dir(out_jsonl.parent_path());
        save_jsonl(ds, out_jsonl);
        log(io, "wrote " + std::to_string(ds.tweets.size()) + " tweets to " + out_jsonl.string());
        io.out << ds.count(ClassLabel::rumour) << " rumour / " << ds.count(ClassLabel::non_rumour) << " non-rumour\n";
    });
}

int cmd_features(const fs::path& jsonl, const fs::path& lexicon_dir, const fs::path& out_csv, CommandIo io) {
    Lexicons lex;
    try {
        lex = load_lexicons(lexicon_dir);
    } catch (const Error& e) {
        io.err << "rumour features: error: lexicons: " << e.what() << '\n';
        return kUsage;
    }
    return guarded(io, "features", [&] {
        for (const auto& w : lex.warnings) log(io, "lexicon warning: " + w);
        require_file(jsonl, "dataset");
        const LabeledDataset ds = load_jsonl(jsonl);
        ds.validate();
        std::vector<FeatureRow> rows;
        rows.reserve(ds.tweets.size());
        for (const auto& t : ds.tweets) rows.push_back({t.id, extract_all(t, lex), *t.label});
        if (out_csv.has_parent_path()) ensure_dir(out_csv.parent_path());
        write_feature_csv(rows, out_csv);
        log(io, "wrote " + std::to_string(rows.size()) + " feature rows to " + out_csv.string());
    });
}

int cmd_embed(const fs::path& jsonl, const ProviderConfig& provider_config, const fs::path& out_store, CommandIo io) {
    const fs::path partial = out_store.string() + ".partial";
    auto cleanup = [&] {
        std::error_code ec;
        fs::remove(partial, ec);
    };
    LabeledDataset ds;
    const int pre = guarded(io, "embed", [&] {
        require_file(jsonl, "dataset");
        ds = load_jsonl(jsonl);
        ds.validate();
        if (out_store.has_parent_path()) ensure_dir(out_store.parent_path());
    });
    if (pre != kOk) return pre;

    try {
        provider_config.validate();
        const auto items = items_of(ds);
        auto provider = make_provider(provider_config);
        const int dim = provider_config.mode == ProviderConfig::Mode::remote ? provider_config.dim : provider->dim();
        EmbeddingStore store(dim, provider->model_tag());
        const std::size_t batch = static_cast<std::size_t>(provider_config.batch_size);
        const std::size_t batches = (items.size() + batch - 1) / batch;
        for (std::size_t b = 0; b < batches; ++b) {
            const std::size_t begin = b * batch;
            const std::size_t end = std::min(items.size(), begin + batch);
            auto vectors = embed_batch(std::span(items).subspan(begin, end - begin), *provider, dim);
            for (auto& v : vectors) store.add(std::move(v));
            log(io, "batch " + std::to_string(b + 1) + "/" + std::to_string(batches) + ": " +
                        std::to_string(store.size()) + " of " + std::to_string(items.size()) + " embedded");
        }
        save_store(store, partial);
        fs::rename(partial, out_store);
        log(io, "wrote store " + out_store.string() + " (dim " + std::to_string(dim) + ", model " +
                    store.model_tag() + ")");
        return kOk;
    } catch (const std::exception& e) {
        cleanup();
        io.err << "rumour embed: error: provider: " << e.what() << '\n';
        return kService;
    }
}

int cmd_train_eval(const RunConfig& config, CommandIo io) {
    return guarded(io, "train-eval", [&] {
        check_run_config(config);
        const Inputs in = load_inputs(config, config.representations);
        const std::string hash = config.hash();
        const SplitResult split = stratified_split(in.dataset, config.split_fraction, config.seed);
        log(io, "split: " + std::to_string(split.train_ids.size()) + " train / " + std::to_string(split.test_ids.size()) +
                    " test (seed " + std::to_string(config.seed) + ", config " + hash + ")");

        ensure_dir(config.output_dir / "models");
        std::vector<ReportRow> rows;
        for (const auto rep : config.representations) {
            for (const auto alg : config.algorithms) {
                const TrainConfig tc = config.train_config(alg);
                log(io, "holdout " + std::string(to_string(rep)) + " / " + std::string(to_string(alg)));
                const HoldoutResult result = run_holdout(in.dataset, in.tables.at(rep), tc, split);
                rows.push_back(to_row(result.report, "holdout", hash));
                save_model(result.model,
                           config.output_dir / "models" / (std::string(to_string(rep)) + "-" + std::string(to_string(alg)) + ".json"));
                char acc[32];
                std::snprintf(acc, sizeof acc, "  accuracy %.4f", result.report.metrics.accuracy);
                log(io, acc);
            }
        }
        write_text_file(config.output_dir / "report.csv", report_csv(rows));
        write_text_file(config.output_dir / "report.txt", report_text(rows));
        write_text_file(config.output_dir / "split.json", split_json(split, hash));
        write_text_file(config.output_dir / "config.effective.ini", config.to_ini());
        io.out << report_text(rows);
    });
}

int cmd_cv(const RunConfig& config, CommandIo io) {
    return guarded(io, "cv", [&] {
        check_run_config(config);
        if (config.cv_k < 2) throw UsageError("run.cv_k must be >= 2, got " + std::to_string(config.cv_k));
        if (config.cv_algorithms.empty()) throw UsageError("run.cv_algorithms is empty");
        const Inputs in = load_inputs(config, {config.cv_representation});
        const std::string hash = config.hash();
        const SplitResult split = stratified_split(in.dataset, config.split_fraction, config.seed);
        const FoldPlan plan = make_folds(split.train_ids, config.cv_k, config.seed);
        log(io, std::to_string(config.cv_k) + "-fold CV over " + std::to_string(split.train_ids.size()) +
                    " training tweets (seed " + std::to_string(config.seed) + ")");

        std::vector<ReportRow> rows;
        for (const auto alg : config.cv_algorithms) {
            log(io, "cv " + std::string(to_string(config.cv_representation)) + " / " + std::string(to_string(alg)));
            const CVReport cv = run_cv(in.dataset, in.tables.at(config.cv_representation), config.train_config(alg), plan);
            const auto cv_rows = to_rows(cv, hash);
            rows.insert(rows.end(), cv_rows.begin(), cv_rows.end());
        }
        ensure_dir(config.output_dir);
        write_text_file(config.output_dir / "cv_report.csv", report_csv(rows));
        write_text_file(config.output_dir / "cv_report.txt", report_text(rows));
        io.out << report_text(rows);
    });
}

int cmd_compare(const std::vector<fs::path>& reports, const fs::path& out_dir, CommandIo io) {
    return guarded(io, "compare", [&] {
        if (reports.empty()) throw UsageError("compare needs at least one report file");
        std::vector<ReportRow> rows;
        for (const auto& p : reports) {
            require_file(p, "report");
            const auto part = read_report_csv(p);
            rows.insert(rows.end(), part.begin(), part.end());
        }
        const Comparison c = compare_report(rows);
        ensure_dir(out_dir);
        write_text_file(out_dir / "compare.csv", c.csv);
        write_text_file(out_dir / "compare.txt", c.text);
        io.out << c.text;
    });
}

namespace {

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::vector<std::string> sets;
};

RunConfig build_config(const std::string& config_path, const Overrides& o) {
    RunConfig c = config_path.empty() ? RunConfig{} : RunConfig::load(config_path);
    for (const auto& kv : o.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw UsageError("--set expects key=value, got \"" + kv + "\"");
        c.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (o.seed) c.seed = *o.seed;
    if (o.out) c.output_dir = *o.out;
    return c;
}

template <typename T>
T pick(const std::string& flag, const std::optional<T>& from_config, const std::string& what) {
    if (!flag.empty()) return T(flag);
    if (from_config) return *from_config;
    throw UsageError("missing " + what);
}

}  // namespace

int run_cli(int argc, const char* const* argv, CommandIo io) {
    CLI::App app{"Rumour detection experiments: 39 hand-crafted features vs sentence embeddings."};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_help_all_flag("--help-all");

    std::string config_path;
    Overrides o;
    std::uint64_t seed_value = 0;
    std::string out_value;
    app.add_option("--config", config_path, "INI run configuration")->check(CLI::ExistingFile);
    auto* seed_opt = app.add_option("--seed", seed_value, "seed for splits, folds and training");
    auto* out_opt = app.add_option("--out", out_value, "output directory");
    app.add_option("--set", o.sets, "override a config key, e.g. --set train.mlp.epochs=50")->expected(1);

    std::string root, jsonl, lexicons, out_path;
    auto* ingest = app.add_subcommand("ingest", "read a PHEME tree into canonical JSONL");
    ingest->add_option("root", root, "PHEME root directory");
    ingest->add_option("output", out_path, "output JSONL");

    auto* features = app.add_subcommand("features", "extract the 39 integer features");
    features->add_option("dataset", jsonl, "canonical JSONL");
    features->add_option("lexicons", lexicons, "lexicon directory");
    features->add_option("output", out_path, "output CSV");

    std::string mode, store, endpoint;
    int batch_size = 0, timeout_ms = 0, retries = -1, dim = 0;
    auto* embed = app.add_subcommand("embed", "embed tweet texts into a vector store");
    embed->add_option("dataset", jsonl, "canonical JSONL");
    embed->add_option("output", out_path, "output store");
    embed->add_option("--mode", mode, "precomputed or remote")->check(CLI::IsMember({"precomputed", "remote"}));
    embed->add_option("--store", store, "precomputed store to read");
    embed->add_option("--endpoint", endpoint, "sidecar base URL (http://host:port)");
    embed->add_option("--batch-size", batch_size, "texts per request");
    embed->add_option("--timeout-ms", timeout_ms, "per-request timeout");
    embed->add_option("--retries", retries, "retries after a failed request");
    embed->add_option("--dim", dim, "expected vector dimension");

    std::vector<std::string> algorithms, representations;
    auto* train = app.add_subcommand("train-eval", "stratified holdout for every representation and algorithm");
    train->add_option("--algorithms", algorithms, "subset of knn,gnb,logreg,svm,adaboost,mlp")->delimiter(',');
    train->add_option("--representations", representations, "subset of features39,embedding")->delimiter(',');

    int k = 0;
    auto* cv = app.add_subcommand("cv", "k-fold cross validation on the training partition");
    cv->add_option("--k", k, "number of folds");
    cv->add_option("--algorithms", algorithms, "algorithms to cross-validate")->delimiter(',');

    std::vector<std::string> report_files;
    auto* compare = app.add_subcommand("compare", "compare report files and compute improvements");
    compare->add_option("reports", report_files, "report.csv files")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e, io.out, io.err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, io.out, io.err);
        return kUsage;
    }

    RunConfig config;
    try {
        if (*seed_opt) o.seed = seed_value;
        if (*out_opt) o.out = out_value;
        config = build_config(config_path, o);
        if (!algorithms.empty()) config.set(cv->parsed() ? "run.cv_algorithms" : "run.algorithms", CLI::detail::join(algorithms, ","));
        if (!representations.empty()) config.set("run.representations", CLI::detail::join(representations, ","));
        if (k != 0) config.cv_k = k;
        if (embed->parsed()) {
            if (!mode.empty()) config.set("provider.mode", mode);
            if (!store.empty()) config.provider.store_path = store;
            if (!endpoint.empty()) config.provider.endpoint = endpoint;
            if (batch_size != 0) config.provider.batch_size = batch_size;
            if (timeout_ms != 0) config.provider.timeout_ms = timeout_ms;
            if (retries >= 0) config.provider.max_retries = retries;
            if (dim != 0) config.provider.dim = dim;
        }
    } catch (const Error& e) {
        io.err << "rumour: error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    }

    try {
        if (ingest->parsed())
            return cmd_ingest(pick<fs::path>(root, config.pheme_root, "PHEME root (argument or data.pheme_root)"),
                              pick<fs::path>(out_path, config.dataset, "output JSONL (argument or data.dataset)"), io);
        if (features->parsed())
            return cmd_features(pick<fs::path>(jsonl, config.dataset, "dataset (argument or data.dataset)"),
                                pick<fs::path>(lexicons, config.lexicon_dir, "lexicon dir (argument or data.lexicons)"),
                                pick<fs::path>(out_path, config.features_csv, "output CSV (argument or data.features)"), io);
        if (embed->parsed())
            return cmd_embed(pick<fs::path>(jsonl, config.dataset, "dataset (argument or data.dataset)"), config.provider,
                             pick<fs::path>(out_path, config.embedding_store, "output store (argument or data.embeddings)"),
                             io);
        if (train->parsed()) return cmd_train_eval(config, io);
        if (cv->parsed()) return cmd_cv(config, io);
        if (compare->parsed()) {
            std::vector<fs::path> paths(report_files.begin(), report_files.end());
            return cmd_compare(paths, config.output_dir, io);
        }
    } catch (const Error& e) {
        io.err << "rumour: error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    }
    return kUsage;
}

}  // namespace rumour::cli
