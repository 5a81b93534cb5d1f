#include "rumour/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <queue>
#include <tuple>

#include "rumour/adam.hpp"
#include "rumour/error.hpp"
#include "rumour/rng.hpp"

namespace rumour {

std::string_view to_string(Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::knn: return "knn";
        case Algorithm::gnb: return "gnb";
        case Algorithm::logreg: return "logreg";
        case Algorithm::svm: return "svm";
        case Algorithm::adaboost: return "adaboost";
        case Algorithm::mlp: return "mlp";
    }
    return "?";
}

Algorithm parse_algorithm(std::string_view name) {
    for (const auto a : kAllAlgorithms)
        if (to_string(a) == name) return a;
    throw UsageError("unknown algorithm \"" + std::string(name) + "\" (expected knn, gnb, logreg, svm, adaboost, mlp)");
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw UsageError("learning_rate must be > 0");
    if (batch_size < 1) throw UsageError("batch_size must be >= 1");
    if (epochs < 1) throw UsageError("epochs must be >= 1");
    if (!(weight_decay >= 0.0)) throw UsageError("weight_decay must be >= 0");
    if (!(dropout_p >= 0.0 && dropout_p < 1.0)) throw UsageError("dropout_p must be in [0, 1)");
    if (k_neighbors < 1) throw UsageError("k_neighbors must be >= 1");
    if (boost_rounds < 1) throw UsageError("boost_rounds must be >= 1");
    if (!(svm_lambda > 0.0)) throw UsageError("svm_lambda must be > 0");
    if (hidden_sizes[0] < 1 || hidden_sizes[1] < 1) throw UsageError("hidden sizes must be >= 1");
}

Standardizer Standardizer::fit(const Matrix& x) {
    Standardizer s;
    s.mean.assign(x.cols(), 0.0);
    s.scale.assign(x.cols(), 1.0);
    if (x.rows() == 0) return s;
    const double n = static_cast<double>(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r)
        for (std::size_t c = 0; c < x.cols(); ++c) s.mean[c] += x(r, c);
    for (double& m : s.mean) m /= n;
    std::vector<double> var(x.cols(), 0.0);
    for (std::size_t r = 0; r < x.rows(); ++r)
        for (std::size_t c = 0; c < x.cols(); ++c) {
            const double d = x(r, c) - s.mean[c];
            var[c] += d * d;
        }
    for (std::size_t c = 0; c < x.cols(); ++c) {
        const double sd = std::sqrt(var[c] / n);
        s.scale[c] = sd > 0.0 ? sd : 1.0;
    }
    return s;
}

Matrix Standardizer::apply(const Matrix& x) const {
    if (x.cols() != mean.size()) throw DimensionError("standardizer width mismatch");
    Matrix out(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r)
        for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) = (x(r, c) - mean[c]) / scale[c];
    return out;
}

namespace {

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

std::vector<std::size_t> iota_indices(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
}

bool uses_standardization(Algorithm a) { return a != Algorithm::gnb && a != Algorithm::adaboost; }

}  // namespace

std::vector<std::size_t> knn_neighbors(const KnnParams& params, std::span<const double> query, int k) {
    const std::size_t n = params.points.rows();
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), n);
    // (distance, 0 for non_rumour / 1 for rumour, index): smaller is nearer.
    using Key = std::tuple<double, int, std::size_t>;
    std::priority_queue<Key> worst_first;
    for (std::size_t i = 0; i < n; ++i) {
        Key key{squared_distance(params.points.row(i), query), 1 - params.labels[i], i};
        if (worst_first.size() < take) {
            worst_first.push(key);
        } else if (key < worst_first.top()) {
            worst_first.pop();
            worst_first.push(key);
        }
    }
    std::vector<std::size_t> out(worst_first.size());
    for (std::size_t i = out.size(); i-- > 0;) {
        out[i] = std::get<2>(worst_first.top());
        worst_first.pop();
    }
    return out;
}

GnbParams train_gnb(const Matrix& x, std::span<const int> y) {
    const std::size_t d = x.cols();
    GnbParams p;
    std::array<std::size_t, 2> counts{};
    for (int c = 0; c < 2; ++c) {
        p.mean[c].assign(d, 0.0);
        p.var[c].assign(d, 0.0);
    }
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const int c = y[r];
        ++counts[c];
        for (std::size_t j = 0; j < d; ++j) p.mean[c][j] += x(r, j);
    }
    for (int c = 0; c < 2; ++c)
        for (double& m : p.mean[c]) m /= static_cast<double>(counts[c]);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const int c = y[r];
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = x(r, j) - p.mean[c][j];
            p.var[c][j] += diff * diff;
        }
    }
    for (int c = 0; c < 2; ++c)
        for (double& v : p.var[c]) v /= static_cast<double>(counts[c]);

    // Smoothing: a fraction of the largest per-feature variance over all rows.
    const Standardizer overall = Standardizer::fit(x);
    double max_var = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        double v = 0.0;
        for (std::size_t r = 0; r < x.rows(); ++r) {
            const double diff = x(r, j) - overall.mean[j];
            v += diff * diff;
        }
        max_var = std::max(max_var, v / static_cast<double>(x.rows()));
    }
    p.var_smoothing = max_var > 0.0 ? 1e-9 * max_var : 1e-9;
    for (int c = 0; c < 2; ++c)
        for (double& v : p.var[c]) v += p.var_smoothing;
    const double n = static_cast<double>(x.rows());
    for (int c = 0; c < 2; ++c) p.log_prior[c] = std::log(static_cast<double>(counts[c]) / n);
    return p;
}

std::array<double, 2> gnb_joint_log_likelihood(const GnbParams& p, std::span<const double> x) {
    std::array<double, 2> out{};
    for (int c = 0; c < 2; ++c) {
        double ll = p.log_prior[c];
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double var = p.var[c][j];
            const double diff = x[j] - p.mean[c][j];
            ll += -0.5 * std::log(2.0 * std::numbers::pi * var) - diff * diff / (2.0 * var);
        }
        out[c] = ll;
    }
    return out;
}

LinearParams train_logreg(const Matrix& x, std::span<const int> y, const TrainConfig& config) {
    const std::size_t n = x.rows(), d = x.cols();
    // Parameter layout: weights then bias.
    std::vector<double> params(d + 1, 0.0), grads(d + 1);
    AdamState state(d + 1);
    Rng rng(config.seed);
    auto order = iota_indices(n);
    const auto batch = static_cast<std::size_t>(config.batch_size);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < n; start += batch) {
            const std::size_t end = std::min(n, start + batch);
            std::fill(grads.begin(), grads.end(), 0.0);
            const double inv = 1.0 / static_cast<double>(end - start);
            const std::span<const double> w(params.data(), d);
            for (std::size_t b = start; b < end; ++b) {
                const auto row = x.row(order[b]);
                const double err = (sigmoid(dot(w, row) + params[d]) - y[order[b]]) * inv;
                for (std::size_t j = 0; j < d; ++j) grads[j] += err * row[j];
                grads[d] += err;
            }
            for (std::size_t j = 0; j < d; ++j) grads[j] += config.weight_decay * params[j];
            adam_step(params, grads, state, config.learning_rate);
        }
    }
    LinearParams out;
    out.weights.assign(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(d));
    out.bias = params[d];
    return out;
}

LinearParams train_linear_svm(const Matrix& x, std::span<const int> y, const TrainConfig& config) {
    // Stochastic subgradient descent on  lambda*|w|^2 + mean hinge loss.
    // Step size 1 / (2*lambda*(t + t0)) keeps the shrink factor (1 - 2*eta*lambda) in [0, 1).
    const std::size_t n = x.rows(), d = x.cols();
    const double lambda = config.svm_lambda;
    const double t0 = std::max(1.0, 1.0 / (2.0 * lambda));
    LinearParams p;
    p.weights.assign(d, 0.0);
    Rng rng(config.seed);
    auto order = iota_indices(n);
    double t = 0.0;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(order);
        for (const std::size_t i : order) {
            const double eta = 1.0 / (2.0 * lambda * (t + t0));
            const auto row = x.row(i);
            const double target = y[i] == 1 ? 1.0 : -1.0;
            const double margin = target * (dot(p.weights, row) + p.bias);
            const double shrink = 1.0 - 2.0 * eta * lambda;
            for (double& w : p.weights) w *= shrink;
            if (margin < 1.0) {
                for (std::size_t j = 0; j < d; ++j) p.weights[j] += eta * target * row[j];
                p.bias += eta * target;
            }
            t += 1.0;
        }
    }
    return p;
}

double stump_predict(const Stump& s, std::span<const double> x) {
    return x[s.feature] > s.threshold ? s.polarity : -s.polarity;
}

AdaBoostParams train_adaboost(const Matrix& x, std::span<const int> y, const TrainConfig& config) {
    const std::size_t n = x.rows(), d = x.cols();
    std::vector<double> target(n);
    for (std::size_t i = 0; i < n; ++i) target[i] = y[i] == 1 ? 1.0 : -1.0;

    std::vector<std::vector<std::size_t>> sorted(d);
    for (std::size_t j = 0; j < d; ++j) {
        sorted[j] = iota_indices(n);
        std::stable_sort(sorted[j].begin(), sorted[j].end(), [&](std::size_t a, std::size_t b) { return x(a, j) < x(b, j); });
    }

    std::vector<double> weight(n, 1.0 / static_cast<double>(n));
    AdaBoostParams model;
    for (int round = 0; round < config.boost_rounds; ++round) {
        double total_neg = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (target[i] < 0) total_neg += weight[i];

        Stump best;
        double best_err = 2.0;
        for (std::size_t j = 0; j < d; ++j) {
            const auto& idx = sorted[j];
            // Threshold below every value: polarity +1 predicts +1 everywhere.
            double err_pos = total_neg;
            auto consider = [&](double threshold, double err_plus) {
                if (err_plus < best_err) {
                    best_err = err_plus;
                    best = Stump{j, threshold, 1, 0.0, err_plus};
                }
                const double err_minus = 1.0 - err_plus;
                if (err_minus < best_err) {
                    best_err = err_minus;
                    best = Stump{j, threshold, -1, 0.0, err_minus};
                }
            };
            consider(x(idx.front(), j) - 1.0, err_pos);
            for (std::size_t k = 0; k < n; ++k) {
                const std::size_t i = idx[k];
                err_pos += target[i] > 0 ? weight[i] : -weight[i];
                if (k + 1 < n && x(idx[k + 1], j) == x(i, j)) continue;
                if (k + 1 == n) break;  // everything left of the threshold is the -1 constant, mirrored above
                consider(0.5 * (x(i, j) + x(idx[k + 1], j)), err_pos);
            }
        }

        const double err = std::clamp(best.weighted_error, 1e-10, 1.0 - 1e-10);
        best.alpha = 0.5 * std::log((1.0 - err) / err);
        model.stumps.push_back(best);
        if (best.weighted_error <= 1e-10) break;

        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            weight[i] *= std::exp(-best.alpha * target[i] * stump_predict(best, x.row(i)));
            norm += weight[i];
        }
        for (double& w : weight) w /= norm;
    }
    return model;
}

MlpParams train_mlp(const Matrix& x, std::span<const int> y, const TrainConfig& config) {
    const MlpShape shape{x.cols(), static_cast<std::size_t>(config.hidden_sizes[0]),
                         static_cast<std::size_t>(config.hidden_sizes[1])};
    Rng rng(config.seed);
    MlpParams params = MlpParams::initialise(shape, rng);
    AdamState state(params.size());
    auto order = iota_indices(x.rows());
    const auto batch = static_cast<std::size_t>(config.batch_size);
    std::vector<int> targets;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t end = std::min(order.size(), start + batch);
            const std::span<const std::size_t> rows(order.data() + start, end - start);
            const Matrix xb = x.select_rows(rows);
            targets.clear();
            for (const auto r : rows) targets.push_back(y[r]);
            const auto acts = mlp_forward(params, xb, true, config.dropout_p, rng);
            const auto grads = mlp_backward(params, acts, targets, config.weight_decay);
            adam_step(params.values(), grads, state, config.learning_rate);
        }
    }
    return params;
}

TrainedModel fit(const Matrix& x, std::span<const ClassLabel> y, const TrainConfig& config) {
    config.validate();
    if (x.rows() != y.size())
        throw DimensionError("fit: " + std::to_string(x.rows()) + " rows but " + std::to_string(y.size()) + " labels");
    if (x.rows() == 0 || x.cols() == 0) throw ValidationError("fit: empty training matrix");
    if (!x.all_finite()) throw ValidationError("fit: non-finite value in training matrix");
    std::vector<int> yi;
    yi.reserve(y.size());
    for (const auto l : y) yi.push_back(class_index(l));
    const auto positives = std::count(yi.begin(), yi.end(), 1);
    if (positives == 0 || positives == static_cast<std::ptrdiff_t>(yi.size()))
        throw ValidationError("fit: training labels contain a single class");

    TrainedModel model;
    model.algorithm = config.algorithm;
    model.config = config;
    model.input_dim = x.cols();
    Matrix input = x;
    if (uses_standardization(config.algorithm)) {
        model.standardizer = Standardizer::fit(x);
        input = model.standardizer->apply(x);
    }

    switch (config.algorithm) {
        case Algorithm::knn: model.params = KnnParams{std::move(input), yi}; break;
        case Algorithm::gnb: model.params = train_gnb(input, yi); break;
        case Algorithm::logreg: model.params = train_logreg(input, yi, config); break;
        case Algorithm::svm: model.params = train_linear_svm(input, yi, config); break;
        case Algorithm::adaboost: model.params = train_adaboost(input, yi, config); break;
        case Algorithm::mlp: model.params = train_mlp(input, yi, config); break;
    }
    return model;
}

Prediction predict(const TrainedModel& model, const Matrix& x) {
    if (x.cols() != model.input_dim)
        throw DimensionError("predict: input has " + std::to_string(x.cols()) + " columns, model expects " +
                             std::to_string(model.input_dim));
    const Matrix input = model.standardizer ? model.standardizer->apply(x) : x;
    Prediction out;
    out.labels.reserve(x.rows());
    out.scores.reserve(x.rows());
    auto emit = [&](bool non_rumour, double score) {
        out.labels.push_back(non_rumour ? ClassLabel::non_rumour : ClassLabel::rumour);
        out.scores.push_back(score);
    };

    switch (model.algorithm) {
        case Algorithm::knn: {
            const auto& p = std::get<KnnParams>(model.params);
            for (std::size_t r = 0; r < input.rows(); ++r) {
                const auto nb = knn_neighbors(p, input.row(r), model.config.k_neighbors);
                std::size_t votes = 0;
                for (const auto i : nb) votes += static_cast<std::size_t>(p.labels[i]);
                const double frac = static_cast<double>(votes) / static_cast<double>(nb.size());
                // A split vote goes to the nearest neighbour's class.
                const bool nr = 2 * votes == nb.size() ? p.labels[nb.front()] == 1 : 2 * votes > nb.size();
                emit(nr, frac);
            }
            break;
        }
        case Algorithm::gnb: {
            const auto& p = std::get<GnbParams>(model.params);
            for (std::size_t r = 0; r < input.rows(); ++r) {
                const auto ll = gnb_joint_log_likelihood(p, input.row(r));
                const double prob = sigmoid(ll[1] - ll[0]);
                emit(ll[1] >= ll[0], prob);
            }
            break;
        }
        case Algorithm::logreg: {
            const auto& p = std::get<LinearParams>(model.params);
            for (std::size_t r = 0; r < input.rows(); ++r) {
                const double prob = sigmoid(dot(p.weights, input.row(r)) + p.bias);
                emit(prob >= 0.5, prob);
            }
            break;
        }
        case Algorithm::svm: {
            const auto& p = std::get<LinearParams>(model.params);
            for (std::size_t r = 0; r < input.rows(); ++r) {
                const double margin = dot(p.weights, input.row(r)) + p.bias;
                emit(margin >= 0.0, margin);
            }
            break;
        }
        case Algorithm::adaboost: {
            const auto& p = std::get<AdaBoostParams>(model.params);
            for (std::size_t r = 0; r < input.rows(); ++r) {
                double score = 0.0;
                for (const auto& s : p.stumps) score += s.alpha * stump_predict(s, input.row(r));
                emit(score >= 0.0, score);
            }
            break;
        }
        case Algorithm::mlp: {
            const auto& p = std::get<MlpParams>(model.params);
            Rng unused(0);
            const auto acts = mlp_forward(p, input, false, 0.0, unused);
            for (std::size_t r = 0; r < input.rows(); ++r) {
                const double prob = acts.probs(r, 1);
                emit(prob >= 0.5, prob);
            }
            break;
        }
    }
    return out;
}

}  // namespace rumour
