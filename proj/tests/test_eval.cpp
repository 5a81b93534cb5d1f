#include <gtest/gtest.h>

#include <tuple>

#include "reference_tables.hpp"
#include "rumour/error.hpp"
#include "rumour/eval.hpp"
#include "rumour/rng.hpp"
#include "support.hpp"

using namespace rumour;

namespace {

constexpr auto NR = ClassLabel::non_rumour;
constexpr auto R = ClassLabel::rumour;

/// Dataset plus a 2-d representation where non-rumours sit near (10, 0) and rumours near (0, 0).
struct Toy {
    LabeledDataset ds;
    RepresentationTable table;
};

Toy toy(std::size_t rumours, std::size_t non_rumours, std::uint64_t seed) {
    Toy t{rumour::testing::synthetic_dataset(rumours, non_rumours, seed), {}};
    t.table.kind = Representation::embedding;
    t.table.dim = 2;
    t.table.tag = "toy";
    Rng rng(seed + 1);
    for (const auto& tw : t.ds.tweets) {
        const double cx = *tw.label == NR ? 10.0 : 0.0;
        t.table.vectors[tw.id] = {cx + rng.normal(), rng.normal()};
    }
    return t;
}

TrainConfig knn(int k = 1, std::uint64_t seed = 3) {
    TrainConfig c;
    c.algorithm = Algorithm::knn;
    c.k_neighbors = k;
    c.seed = seed;
    return c;
}

}  // namespace

TEST(Confusion, PerfectPredictions) {
    std::vector<ClassLabel> truth(5, NR);
    truth.insert(truth.end(), 5, R);
    EXPECT_EQ(confusion(truth, truth), (ConfusionMatrix{5, 0, 0, 5}));
}

TEST(Confusion, ConstantNonRumourPredictor) {
    const std::vector<ClassLabel> truth{NR, NR, NR, R, R};
    const std::vector<ClassLabel> pred(5, NR);
    const auto cm = confusion(pred, truth);
    EXPECT_EQ(cm.tp, 3u);
    EXPECT_EQ(cm.fp, 2u);
    EXPECT_EQ(cm.fn, 0u);
    EXPECT_EQ(cm.tn, 0u);
}

TEST(Confusion, Orientation) {
    const auto cm = confusion(std::vector<ClassLabel>{R, NR}, std::vector<ClassLabel>{NR, R});
    EXPECT_EQ(cm, (ConfusionMatrix{0, 1, 1, 0}));
}

TEST(Confusion, LengthErrors) {
    EXPECT_THROW(confusion(std::vector<ClassLabel>{NR}, std::vector<ClassLabel>{NR, R}), DimensionError);
    EXPECT_THROW(confusion({}, {}), DimensionError);
}

TEST(Metrics, MlpEmbeddingExample) {
    const auto m = metrics({1016, 144, 125, 452});
    EXPECT_NEAR(m.accuracy, 0.845, 0.001);
    EXPECT_NEAR(m.non_rumour.precision, 0.890, 0.001);
    EXPECT_NEAR(m.non_rumour.recall, 0.876, 0.001);
    EXPECT_NEAR(m.non_rumour.f1, 0.883, 0.001);
    EXPECT_NEAR(m.rumour.precision, 0.758, 0.001);
    EXPECT_NEAR(m.rumour.recall, 0.783, 0.001);
    EXPECT_NEAR(m.macro.precision, 0.824, 0.001);
    EXPECT_FALSE(m.degenerate);
}

TEST(Metrics, KnnEmbeddingExample) {
    const auto m = metrics({989, 171, 108, 469});
    EXPECT_NEAR(m.accuracy, 0.839, 0.001);
    EXPECT_NEAR(m.non_rumour.precision, 0.902, 0.001);
}

TEST(Metrics, PerfectClassifierScoresOne) {
    for (const double v : metrics({1, 0, 0, 1}).values()) EXPECT_EQ(v, 1.0);
}

TEST(Metrics, ReferenceRowsReproduce) {
    for (const auto& row : rumour::testing::reference_rows()) {
        // The ADA/39 row is checked (and fails) in the acceptance binary.
        if (!row.consistent) continue;
        const auto got = metrics(row.cm).values();
        for (std::size_t i = 0; i < got.size(); ++i)
            EXPECT_NEAR(got[i], row.printed[i], 0.001 + 1e-9)
                << row.algorithm << "/" << row.representation << " " << kMetricNames[i];
    }
}

TEST(Metrics, EmptyMatrixThrows) { EXPECT_THROW(metrics({}), ValidationError); }

TEST(Metrics, ZeroDenominatorsAreFlagged) {
    const auto m = metrics({3, 0, 2, 0});
    EXPECT_TRUE(m.degenerate);
    EXPECT_EQ(m.rumour.precision, 0.0);
    EXPECT_EQ(m.rumour.recall, 0.0);
    EXPECT_EQ(m.rumour.f1, 0.0);
    EXPECT_EQ(m.non_rumour.recall, 1.0);
}

TEST(Metrics, Properties) {
    Rng rng(123);
    for (int trial = 0; trial < 2000; ++trial) {
        ConfusionMatrix cm{rng.uniform_index(50), rng.uniform_index(50), rng.uniform_index(50), rng.uniform_index(50)};
        if (cm.total() == 0) continue;
        const auto m = metrics(cm);
        for (const double v : m.values()) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
        }
        EXPECT_EQ(m.macro.precision, (m.non_rumour.precision + m.rumour.precision) / 2.0);
        EXPECT_EQ(m.macro.recall, (m.non_rumour.recall + m.rumour.recall) / 2.0);
        for (const auto& c : {m.non_rumour, m.rumour, m.macro}) {
            EXPECT_LE(c.f1, std::max(c.precision, c.recall) + 1e-15);
            EXPECT_GE(c.f1, std::min(c.precision, c.recall) - 1e-15);
        }
        // Scaling every cell leaves every ratio unchanged.
        const std::uint64_t s = 1 + rng.uniform_index(9);
        const auto scaled = metrics({cm.tp * s, cm.fn * s, cm.fp * s, cm.tn * s});
        for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(scaled.values()[i], m.values()[i], 1e-12);
        EXPECT_EQ(scaled.degenerate, m.degenerate);
    }
}

TEST(RepresentationTable, GatherNamesMissingId) {
    auto t = toy(2, 2, 1);
    const std::vector<std::string> ids{"t0", "t9"};
    try {
        t.table.gather(ids);
        FAIL();
    } catch (const LookupError& e) {
        EXPECT_NE(std::string(e.what()).find("t9"), std::string::npos);
    }
}

TEST(Representation, NamesRoundTrip) {
    EXPECT_EQ(parse_representation("features39"), Representation::features39);
    EXPECT_EQ(parse_representation("embedding"), Representation::embedding);
    EXPECT_THROW(parse_representation("bert"), UsageError);
}

TEST(Holdout, MemorisesWhenTrainEqualsTest) {
    auto t = toy(6, 6, 4);
    SplitResult split;
    for (const auto& tw : t.ds.tweets) split.train_ids.push_back(tw.id);
    split.test_ids = split.train_ids;
    const auto r = run_holdout(t.ds, t.table, knn(1), split).report;
    EXPECT_EQ(r.metrics.accuracy, 1.0);
    EXPECT_EQ(r.train_size, 12u);
    EXPECT_EQ(r.model_tag, "toy");
    EXPECT_EQ(r.run_id, "embedding-knn");
}

TEST(Holdout, SameSeedSameReport) {
    auto t = toy(40, 60, 9);
    const auto split = stratified_split(t.ds, 0.7, 9);
    TrainConfig c;
    c.algorithm = Algorithm::mlp;
    c.epochs = 5;
    c.batch_size = 16;
    c.hidden_sizes = {8, 4};
    c.seed = 9;
    const auto a = run_holdout(t.ds, t.table, c, split);
    const auto b = run_holdout(t.ds, t.table, c, split);
    EXPECT_EQ(a.report.confusion, b.report.confusion);
    EXPECT_EQ(a.report.metrics, b.report.metrics);
    EXPECT_EQ(a.model, b.model);
}

TEST(Holdout, MissingVectorIsALookupError) {
    auto t = toy(5, 5, 2);
    t.table.vectors.erase("t3");
    const auto split = stratified_split(t.ds, 0.5, 1);
    EXPECT_THROW(run_holdout(t.ds, t.table, knn(), split), LookupError);
}

TEST(CrossValidation, TwoFoldsOnSymmetricSet) {
    LabeledDataset ds = rumour::testing::synthetic_dataset(0, 0, 0);
    RepresentationTable table;
    table.dim = 2;
    const std::vector<std::tuple<std::string, ClassLabel, double, double>> points = {
        {"a", R, 0, 0}, {"b", R, 0, 1}, {"c", NR, 5, 0}, {"d", NR, 5, 1}};
    for (const auto& [id, label, x, y] : points) {
        Tweet tw;
        tw.id = id;
        tw.label = label;
        ds.tweets.push_back(tw);
        table.vectors[id] = {x, y};
    }
    FoldPlan plan;
    plan.k = 2;
    plan.order = {"a", "b", "c", "d"};
    plan.assignment = {{"a", 0}, {"c", 0}, {"b", 1}, {"d", 1}};
    const auto cv = run_cv(ds, table, knn(1, 10), plan);
    ASSERT_EQ(cv.per_fold.size(), 2u);
    EXPECT_EQ(cv.per_fold[0].metrics.accuracy, 1.0);
    EXPECT_EQ(cv.per_fold[1].metrics.accuracy, 1.0);
    EXPECT_EQ(cv.per_fold[0].seed, 10u);
    EXPECT_EQ(cv.per_fold[1].seed, 11u);
    EXPECT_EQ(cv.mean.accuracy, 1.0);

    plan.assignment = {{"a", 0}, {"b", 0}, {"c", 1}, {"d", 1}};
    try {
        run_cv(ds, table, knn(1), plan);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("fold 1"), std::string::npos);
    }
}

TEST(CrossValidation, MeanIsFieldwiseAverageAndDeterministic) {
    auto t = toy(30, 45, 5);
    const auto split = stratified_split(t.ds, 0.7, 5);
    const auto plan = make_folds(split.train_ids, 5, 5);
    const auto cv = run_cv(t.ds, t.table, knn(3, 5), plan);
    ASSERT_EQ(cv.per_fold.size(), 5u);
    std::size_t tested = 0;
    for (int f = 0; f < 5; ++f) {
        const auto& r = cv.per_fold[static_cast<std::size_t>(f)];
        EXPECT_EQ(r.test_size, plan.members(f).size());
        EXPECT_EQ(r.train_size + r.test_size, split.train_ids.size());
        tested += r.test_size;
    }
    EXPECT_EQ(tested, split.train_ids.size());
    for (std::size_t i = 0; i < 10; ++i) {
        double s = 0.0;
        for (const auto& r : cv.per_fold) s += r.metrics.values()[i];
        EXPECT_DOUBLE_EQ(cv.mean.values()[i], s / 5.0) << kMetricNames[i];
    }
    const auto again = run_cv(t.ds, t.table, knn(3, 5), plan);
    EXPECT_EQ(again.mean, cv.mean);
}

TEST(CrossValidation, MeanReportOfNothingIsZero) {
    EXPECT_EQ(mean_report({}), MetricsReport{});
}
