#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rumour/classifiers.hpp"
#include "rumour/dataset.hpp"
#include "rumour/embedding.hpp"
#include "rumour/features.hpp"

namespace rumour {

/// Orientation: positive = non_rumour.
///   tp: non-rumour predicted non-rumour    fn: non-rumour predicted rumour
///   fp: rumour predicted non-rumour        tn: rumour predicted rumour
struct ConfusionMatrix {
    std::uint64_t tp = 0;
    std::uint64_t fn = 0;
    std::uint64_t fp = 0;
    std::uint64_t tn = 0;

    std::uint64_t total() const { return tp + fn + fp + tn; }
    bool operator==(const ConfusionMatrix&) const = default;
};

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool operator==(const ClassMetrics&) const = default;
};

struct MetricsReport {
    double accuracy = 0.0;
    ClassMetrics non_rumour;
    ClassMetrics rumour;
    /// Precision and recall are the mean of the two classes; f1 is the
    /// harmonic mean of those macro precision and recall values.
    ClassMetrics macro;
    /// Set when some ratio had a zero denominator and was reported as 0.
    bool degenerate = false;

    /// accuracy, macro P/R/F1, non-rumour P/R/F1, rumour P/R/F1.
    std::array<double, 10> values() const;
    bool operator==(const MetricsReport&) const = default;
};

inline constexpr std::array<std::string_view, 10> kMetricNames = {
    "accuracy",     "macro_precision", "macro_recall", "macro_f1", "nr_precision",
    "nr_recall",    "nr_f1",           "r_precision",  "r_recall", "r_f1",
};

/// Throws DimensionError on length mismatch or empty input.
ConfusionMatrix confusion(std::span<const ClassLabel> predictions, std::span<const ClassLabel> truth);

/// Throws ValidationError on an all-zero matrix.
MetricsReport metrics(const ConfusionMatrix& cm);

enum class Representation { features39, embedding };
std::string_view to_string(Representation r);
Representation parse_representation(std::string_view name);

/// Per-tweet input vectors for one representation.
struct RepresentationTable {
    Representation kind = Representation::features39;
    std::size_t dim = 0;
    std::string tag;  // feature schema id or embedding model tag
    std::unordered_map<std::string, std::vector<double>> vectors;

    static RepresentationTable from_features(const std::vector<FeatureRow>& rows);
    static RepresentationTable from_store(const EmbeddingStore& store);

    /// Stacks the vectors of `ids` in order. Throws LookupError naming the first missing id.
    Matrix gather(std::span<const std::string> ids) const;
};

struct RunReport {
    std::string run_id;
    Representation representation = Representation::features39;
    Algorithm algorithm = Algorithm::knn;
    std::uint64_t seed = 0;
    std::string model_tag;
    TrainConfig config;
    ConfusionMatrix confusion;
    MetricsReport metrics;
    std::size_t train_size = 0;
    std::size_t test_size = 0;
};

struct HoldoutResult {
    RunReport report;
    TrainedModel model;
};

/// Fits on split.train_ids, evaluates on split.test_ids.
HoldoutResult run_holdout(const LabeledDataset& dataset, const RepresentationTable& table, const TrainConfig& config,
                          const SplitResult& split);

struct CVReport {
    std::vector<RunReport> per_fold;  // fold i trained with seed config.seed + i
    MetricsReport mean;
    TrainConfig config;
    Representation representation = Representation::features39;
    std::string model_tag;
    std::uint64_t seed = 0;
    int k = 0;
};

/// Field-wise arithmetic mean of reports.
MetricsReport mean_report(std::span<const MetricsReport> reports);

/// For each fold, trains on the other folds and evaluates on it.
/// Throws ValidationError naming the fold when its training part lacks a class.
CVReport run_cv(const LabeledDataset& dataset, const RepresentationTable& table, const TrainConfig& config,
                const FoldPlan& plan);

}  // namespace rumour
