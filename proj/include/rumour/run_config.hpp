#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rumour/classifiers.hpp"
#include "rumour/embedding.hpp"
#include "rumour/eval.hpp"

namespace rumour {

/// Experiment configuration, read from an INI file:
///
///   [data]      dataset, pheme_root, features, embeddings, lexicons
///   [run]       seed, split_fraction, cv_k, out, representations, algorithms,
///               cv_algorithms, cv_representation
///   [provider]  mode, store, endpoint, batch_size, timeout_ms, max_retries, dim
///   [train]     defaults for every algorithm (TrainConfig field names)
///   [train.<algorithm>]  per-algorithm overrides
///
/// List values are comma separated. Unknown sections or keys are rejected.
struct RunConfig {
    std::optional<std::filesystem::path> dataset;
    std::optional<std::filesystem::path> pheme_root;
    std::optional<std::filesystem::path> features_csv;
    std::optional<std::filesystem::path> embedding_store;
    std::optional<std::filesystem::path> lexicon_dir;

    ProviderConfig provider;
    TrainConfig train_defaults;
    std::map<Algorithm, std::map<std::string, std::string>> overrides;

    std::vector<Representation> representations = {Representation::features39, Representation::embedding};
    std::vector<Algorithm> algorithms{kAllAlgorithms.begin(), kAllAlgorithms.end()};
    std::vector<Algorithm> cv_algorithms = {Algorithm::knn, Algorithm::mlp};
    Representation cv_representation = Representation::embedding;
    double split_fraction = 0.7;
    int cv_k = 5;
    std::uint64_t seed = 42;
    std::filesystem::path output_dir = "out";

    /// Relative data and store paths are taken relative to the config file's directory.
    static RunConfig load(const std::filesystem::path& path);
    static RunConfig parse(const std::string& ini_text, const std::string& source);

    /// Sets "section.key" (e.g. "run.seed", "train.mlp.epochs"). Throws UsageError.
    void set(const std::string& dotted_key, const std::string& value);

    /// Defaults, then per-algorithm overrides, then the run seed.
    TrainConfig train_config(Algorithm algorithm) const;

    /// Stable "section.key=value" lines covering every effective setting except the output dir.
    std::string canonical() const;
    /// 16 hex digits of FNV-1a over canonical().
    std::string hash() const;
    /// canonical() regrouped as an INI file that parse() reads back to the same settings.
    std::string to_ini() const;
};

}  // namespace rumour
