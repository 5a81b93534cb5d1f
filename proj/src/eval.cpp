#include "rumour/eval.hpp"

#include <algorithm>

#include "rumour/error.hpp"

namespace rumour {

std::array<double, 10> MetricsReport::values() const {
    return {accuracy,           macro.precision,  macro.recall,    macro.f1,     non_rumour.precision,
            non_rumour.recall,  non_rumour.f1,    rumour.precision, rumour.recall, rumour.f1};
}

ConfusionMatrix confusion(std::span<const ClassLabel> predictions, std::span<const ClassLabel> truth) {
    if (predictions.size() != truth.size())
        throw DimensionError("confusion: " + std::to_string(predictions.size()) + " predictions vs " +
                             std::to_string(truth.size()) + " labels");
    if (truth.empty()) throw DimensionError("confusion: empty input");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool actual_nr = truth[i] == ClassLabel::non_rumour;
        const bool predicted_nr = predictions[i] == ClassLabel::non_rumour;
        if (actual_nr) (predicted_nr ? cm.tp : cm.fn)++;
        else (predicted_nr ? cm.fp : cm.tn)++;
    }
    return cm;
}

namespace {

double ratio(std::uint64_t num, std::uint64_t den, bool& degenerate) {
    if (den == 0) {
        degenerate = true;
        return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r, bool& degenerate) {
    if (p + r == 0.0) {
        degenerate = true;
        return 0.0;
    }
    return 2.0 * p * r / (p + r);
}

}  // namespace

MetricsReport metrics(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw ValidationError("metrics: empty confusion matrix");
    MetricsReport m;
    bool& deg = m.degenerate;
    m.accuracy = ratio(cm.tp + cm.tn, cm.total(), deg);
    m.non_rumour.precision = ratio(cm.tp, cm.tp + cm.fp, deg);
    m.non_rumour.recall = ratio(cm.tp, cm.tp + cm.fn, deg);
    m.non_rumour.f1 = harmonic(m.non_rumour.precision, m.non_rumour.recall, deg);
    m.rumour.precision = ratio(cm.tn, cm.tn + cm.fn, deg);
    m.rumour.recall = ratio(cm.tn, cm.tn + cm.fp, deg);
    m.rumour.f1 = harmonic(m.rumour.precision, m.rumour.recall, deg);
    m.macro.precision = (m.non_rumour.precision + m.rumour.precision) / 2.0;
    m.macro.recall = (m.non_rumour.recall + m.rumour.recall) / 2.0;
    m.macro.f1 = harmonic(m.macro.precision, m.macro.recall, deg);
    return m;
}

std::string_view to_string(Representation r) { return r == Representation::features39 ? "features39" : "embedding"; }

Representation parse_representation(std::string_view name) {
    if (name == "features39") return Representation::features39;
    if (name == "embedding") return Representation::embedding;
    throw UsageError("unknown representation \"" + std::string(name) + "\" (expected features39 or embedding)");
}

RepresentationTable RepresentationTable::from_features(const std::vector<FeatureRow>& rows) {
    RepresentationTable t;
    t.kind = Representation::features39;
    t.dim = kFeatureCount;
    t.tag = std::string(kFeatureSchema);
    for (const auto& row : rows) {
        std::vector<double> v(row.features.values.begin(), row.features.values.end());
        if (!t.vectors.emplace(row.id, std::move(v)).second) throw ValidationError("duplicate feature row " + row.id);
    }
    return t;
}

RepresentationTable RepresentationTable::from_store(const EmbeddingStore& store) {
    RepresentationTable t;
    t.kind = Representation::embedding;
    t.dim = static_cast<std::size_t>(store.dim());
    t.tag = store.model_tag();
    for (const auto& e : store.entries()) t.vectors.emplace(e.tweet_id, std::vector<double>(e.values.begin(), e.values.end()));
    return t;
}

Matrix RepresentationTable::gather(std::span<const std::string> ids) const {
    Matrix m(ids.size(), dim);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto it = vectors.find(ids[i]);
        if (it == vectors.end())
            throw LookupError("no " + std::string(to_string(kind)) + " vector for id " + ids[i]);
        if (it->second.size() != dim) throw DimensionError("vector for id " + ids[i] + " has the wrong length");
        std::copy(it->second.begin(), it->second.end(), m.row(i).begin());
    }
    return m;
}

namespace {

std::vector<ClassLabel> labels_for(const LabeledDataset& ds, std::span<const std::string> ids) {
    std::unordered_map<std::string, ClassLabel> by_id;
    for (const auto& t : ds.tweets)
        if (t.label) by_id.emplace(t.id, *t.label);
    std::vector<ClassLabel> out;
    out.reserve(ids.size());
    for (const auto& id : ids) {
        const auto it = by_id.find(id);
        if (it == by_id.end()) throw LookupError("id " + id + " not in dataset " + ds.name);
        out.push_back(it->second);
    }
    return out;
}

RunReport evaluate(const LabeledDataset& ds, const RepresentationTable& table, const TrainConfig& config,
                   std::span<const std::string> train_ids, std::span<const std::string> test_ids, TrainedModel* model_out) {
    if (test_ids.empty()) throw ValidationError("evaluation set is empty");
    const Matrix x_train = table.gather(train_ids);
    const Matrix x_test = table.gather(test_ids);
    const auto y_train = labels_for(ds, train_ids);
    const auto y_test = labels_for(ds, test_ids);

    TrainedModel model = fit(x_train, y_train, config);
    const auto pred = predict(model, x_test);

    RunReport r;
    r.representation = table.kind;
    r.algorithm = config.algorithm;
    r.seed = config.seed;
    r.model_tag = table.tag;
    r.config = config;
    r.confusion = confusion(pred.labels, y_test);
    r.metrics = metrics(r.confusion);
    r.train_size = train_ids.size();
    r.test_size = test_ids.size();
    r.run_id = std::string(to_string(table.kind)) + "-" + std::string(to_string(config.algorithm));
    if (model_out) *model_out = std::move(model);
    return r;
}

}  // namespace

HoldoutResult run_holdout(const LabeledDataset& dataset, const RepresentationTable& table, const TrainConfig& config,
                          const SplitResult& split) {
    HoldoutResult out;
    out.report = evaluate(dataset, table, config, split.train_ids, split.test_ids, &out.model);
    return out;
}

MetricsReport mean_report(std::span<const MetricsReport> reports) {
    MetricsReport m;
    if (reports.empty()) return m;
    const double n = static_cast<double>(reports.size());
    auto mean_of = [&](auto getter) {
        double s = 0.0;
        for (const auto& r : reports) s += getter(r);
        return s / n;
    };
    m.accuracy = mean_of([](const MetricsReport& r) { return r.accuracy; });
    for (auto member : {&MetricsReport::non_rumour, &MetricsReport::rumour, &MetricsReport::macro}) {
        (m.*member).precision = mean_of([&](const MetricsReport& r) { return (r.*member).precision; });
        (m.*member).recall = mean_of([&](const MetricsReport& r) { return (r.*member).recall; });
        (m.*member).f1 = mean_of([&](const MetricsReport& r) { return (r.*member).f1; });
    }
    m.degenerate = std::any_of(reports.begin(), reports.end(), [](const MetricsReport& r) { return r.degenerate; });
    return m;
}

CVReport run_cv(const LabeledDataset& dataset, const RepresentationTable& table, const TrainConfig& config,
                const FoldPlan& plan) {
    if (plan.k < 2) throw UsageError("fold plan needs k >= 2");
    CVReport cv;
    cv.config = config;
    cv.representation = table.kind;
    cv.model_tag = table.tag;
    cv.seed = config.seed;
    cv.k = plan.k;
    std::vector<MetricsReport> fold_metrics;
    for (int fold = 0; fold < plan.k; ++fold) {
        TrainConfig fold_config = config;
        fold_config.seed = config.seed + static_cast<std::uint64_t>(fold);
        const auto train_ids = plan.complement(fold);
        const auto test_ids = plan.members(fold);
        const auto y_train = labels_for(dataset, train_ids);
        const bool has_both = std::count(y_train.begin(), y_train.end(), ClassLabel::rumour) > 0 &&
                              std::count(y_train.begin(), y_train.end(), ClassLabel::non_rumour) > 0;
        if (!has_both)
            throw ValidationError("fold " + std::to_string(fold + 1) + ": training portion is missing a class");
        auto r = evaluate(dataset, table, fold_config, train_ids, test_ids, nullptr);
        r.run_id += "-fold" + std::to_string(fold + 1);
        fold_metrics.push_back(r.metrics);
        cv.per_fold.push_back(std::move(r));
    }
    cv.mean = mean_report(fold_metrics);
    return cv;
}

}  // namespace rumour
