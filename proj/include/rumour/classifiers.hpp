#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rumour/dataset.hpp"
#include "rumour/matrix.hpp"
#include "rumour/mlp.hpp"

namespace rumour {

enum class Algorithm { knn, gnb, logreg, svm, adaboost, mlp };

inline constexpr std::array<Algorithm, 6> kAllAlgorithms = {Algorithm::knn,    Algorithm::gnb,      Algorithm::logreg,
                                                            Algorithm::svm,    Algorithm::adaboost, Algorithm::mlp};

std::string_view to_string(Algorithm algorithm);
/// Throws UsageError for an unknown name.
Algorithm parse_algorithm(std::string_view name);

struct TrainConfig {
    Algorithm algorithm = Algorithm::mlp;
    std::uint64_t seed = 0;
    double learning_rate = 0.0002;
    int batch_size = 512;
    int epochs = 100;
    double weight_decay = 1e-5;
    double dropout_p = 0.5;
    int k_neighbors = 5;
    int boost_rounds = 100;
    double svm_lambda = 1e-4;
    std::array<int, 2> hidden_sizes = {256, 64};

    /// Throws UsageError when a field is out of range.
    void validate() const;

    bool operator==(const TrainConfig&) const = default;
};

/// Per-column z-score parameters learned from training data. Zero-variance
/// columns get scale 1 so they map to 0.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;

    static Standardizer fit(const Matrix& x);
    Matrix apply(const Matrix& x) const;

    bool operator==(const Standardizer&) const = default;
};

/// Class index used inside the classifiers: 1 = non_rumour, 0 = rumour.
inline int class_index(ClassLabel label) { return label == ClassLabel::non_rumour ? 1 : 0; }
inline ClassLabel class_label(int index) { return index == 1 ? ClassLabel::non_rumour : ClassLabel::rumour; }

struct KnnParams {
    Matrix points;
    std::vector<int> labels;
    bool operator==(const KnnParams&) const = default;
};

struct GnbParams {
    std::array<std::vector<double>, 2> mean;
    std::array<std::vector<double>, 2> var;  // smoothing already added
    std::array<double, 2> log_prior{};
    double var_smoothing = 0.0;
    bool operator==(const GnbParams&) const = default;
};

struct LinearParams {
    std::vector<double> weights;
    double bias = 0.0;
    bool operator==(const LinearParams&) const = default;
};

/// Predicts `polarity` when x[feature] > threshold, otherwise -polarity (+1 = non_rumour).
struct Stump {
    std::size_t feature = 0;
    double threshold = 0.0;
    int polarity = 1;
    double alpha = 0.0;
    double weighted_error = 0.0;  // before clamping
    bool operator==(const Stump&) const = default;
};

struct AdaBoostParams {
    std::vector<Stump> stumps;
    bool operator==(const AdaBoostParams&) const = default;
};

using ModelParams = std::variant<KnnParams, GnbParams, LinearParams, AdaBoostParams, MlpParams>;

struct TrainedModel {
    Algorithm algorithm = Algorithm::knn;
    TrainConfig config;
    std::size_t input_dim = 0;
    std::optional<Standardizer> standardizer;
    ModelParams params;

    bool operator==(const TrainedModel&) const = default;
};

struct Prediction {
    std::vector<ClassLabel> labels;
    /// P(non_rumour) for logreg, gnb and mlp; signed margin for svm and
    /// adaboost (positive = non_rumour); non_rumour vote fraction for knn.
    std::vector<double> scores;
};

/// Trains one classifier. Deterministic for fixed inputs and config.seed.
/// Throws DimensionError if rows(x) != |y|, ValidationError on single-class y or non-finite x.
TrainedModel fit(const Matrix& x, std::span<const ClassLabel> y, const TrainConfig& config);

/// Throws DimensionError when x has the wrong number of columns.
Prediction predict(const TrainedModel& model, const Matrix& x);

// Algorithm kernels, exposed for testing.

/// Indices of the k nearest training points (squared Euclidean). Distance ties
/// prefer non_rumour points, then the smaller training index.
std::vector<std::size_t> knn_neighbors(const KnnParams& params, std::span<const double> query, int k);

/// log P(c) + sum_j log N(x_j; mean_cj, var_cj), indexed by class index.
std::array<double, 2> gnb_joint_log_likelihood(const GnbParams& params, std::span<const double> x);

GnbParams train_gnb(const Matrix& x, std::span<const int> y);
LinearParams train_logreg(const Matrix& x, std::span<const int> y, const TrainConfig& config);
LinearParams train_linear_svm(const Matrix& x, std::span<const int> y, const TrainConfig& config);
AdaBoostParams train_adaboost(const Matrix& x, std::span<const int> y, const TrainConfig& config);
MlpParams train_mlp(const Matrix& x, std::span<const int> y, const TrainConfig& config);

double stump_predict(const Stump& stump, std::span<const double> x);

}  // namespace rumour
