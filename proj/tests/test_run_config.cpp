#include <gtest/gtest.h>

#include "rumour/error.hpp"
#include "rumour/run_config.hpp"
#include "support.hpp"

using namespace rumour;
using rumour::testing::TempDir;

namespace {

const char* kSample = R"(; experiment
[data]
dataset = data/pheme.jsonl
features = features.csv
embeddings = /abs/store.jsonl

[run]
seed = 7
split_fraction = 0.8
cv_k = 3
algorithms = knn, mlp
representations = embedding
out = results

[provider]
mode = remote
endpoint = http://127.0.0.1:8500
batch_size = 16

[train]
epochs = 20
hidden_sizes = 32,16

[train.mlp]
learning_rate = 0.001
dropout_p = 0.25
)";

}  // namespace

TEST(RunConfig, DefaultsMatchTheDocumentedValues) {
    const RunConfig c;
    EXPECT_EQ(c.seed, 42u);
    EXPECT_EQ(c.split_fraction, 0.7);
    EXPECT_EQ(c.cv_k, 5);
    EXPECT_EQ(c.algorithms.size(), 6u);
    const auto t = c.train_config(Algorithm::mlp);
    EXPECT_EQ(t.learning_rate, 0.0002);
    EXPECT_EQ(t.batch_size, 512);
    EXPECT_EQ(t.epochs, 100);
    EXPECT_EQ(t.weight_decay, 1e-5);
    EXPECT_EQ(t.dropout_p, 0.5);
    EXPECT_EQ(t.seed, 42u);
}

TEST(RunConfig, ParsesEverySection) {
    const auto c = RunConfig::parse(kSample, "sample.ini");
    EXPECT_EQ(c.dataset, std::filesystem::path("data/pheme.jsonl"));
    EXPECT_EQ(c.features_csv, std::filesystem::path("features.csv"));
    EXPECT_FALSE(c.pheme_root.has_value());
    EXPECT_EQ(c.seed, 7u);
    EXPECT_EQ(c.split_fraction, 0.8);
    EXPECT_EQ(c.cv_k, 3);
    EXPECT_EQ(c.algorithms, (std::vector<Algorithm>{Algorithm::knn, Algorithm::mlp}));
    EXPECT_EQ(c.representations, std::vector<Representation>{Representation::embedding});
    EXPECT_EQ(c.output_dir, std::filesystem::path("results"));
    EXPECT_EQ(c.provider.mode, ProviderConfig::Mode::remote);
    EXPECT_EQ(c.provider.endpoint, "http://127.0.0.1:8500");
    EXPECT_EQ(c.provider.batch_size, 16);
}

TEST(RunConfig, PerAlgorithmOverridesLayerOnDefaults) {
    const auto c = RunConfig::parse(kSample, "sample.ini");
    const auto mlp = c.train_config(Algorithm::mlp);
    EXPECT_EQ(mlp.algorithm, Algorithm::mlp);
    EXPECT_EQ(mlp.learning_rate, 0.001);
    EXPECT_EQ(mlp.dropout_p, 0.25);
    EXPECT_EQ(mlp.epochs, 20);
    EXPECT_EQ(mlp.hidden_sizes, (std::array<int, 2>{32, 16}));
    EXPECT_EQ(mlp.seed, 7u);
    const auto knn = c.train_config(Algorithm::knn);
    EXPECT_EQ(knn.learning_rate, 0.0002);
    EXPECT_EQ(knn.epochs, 20);
}

TEST(RunConfig, RejectsUnknownKeysAndBadValues) {
    EXPECT_THROW(RunConfig::parse("[run]\nseeed = 1\n", "x"), UsageError);
    EXPECT_THROW(RunConfig::parse("[extra]\na = 1\n", "x"), UsageError);
    EXPECT_THROW(RunConfig::parse("seed = 1\n", "x"), UsageError);
    EXPECT_THROW(RunConfig::parse("[run]\nseed = abc\n", "x"), UsageError);
    EXPECT_THROW(RunConfig::parse("[run]\nseed = -1\n", "x"), UsageError);
    EXPECT_THROW(RunConfig::parse("[run]\nalgorithms = knn, forest\n", "x"), UsageError);
    EXPECT_THROW(RunConfig::parse("[train.forest]\nepochs = 1\n", "x"), UsageError);
    EXPECT_THROW(RunConfig::parse("[train.mlp]\nepochz = 1\n", "x"), UsageError);
    EXPECT_THROW(RunConfig::parse("[train]\nhidden_sizes = 3\n", "x"), UsageError);
    EXPECT_THROW(RunConfig::parse("[provider]\nmode = magic\n", "x"), UsageError);
    EXPECT_THROW(RunConfig::parse("[run\n", "x"), UsageError);
    EXPECT_NO_THROW(RunConfig::parse("[data]\n[run]\nseed = 3\n", "x"));
}

TEST(RunConfig, SetUsesDottedKeys) {
    RunConfig c;
    c.set("run.seed", "11");
    c.set("train.knn.k_neighbors", "9");
    c.set("provider.store", " store.jsonl ");
    c.set("data.dataset", "");
    EXPECT_EQ(c.seed, 11u);
    EXPECT_EQ(c.train_config(Algorithm::knn).k_neighbors, 9);
    EXPECT_EQ(c.provider.store_path, std::filesystem::path("store.jsonl"));
    EXPECT_FALSE(c.dataset.has_value());
    EXPECT_THROW(c.set("seed", "1"), UsageError);
    EXPECT_THROW(c.set("run.unknown", "1"), UsageError);
}

TEST(RunConfig, LoadResolvesRelativePathsAgainstTheConfigFile) {
    TempDir dir;
    std::filesystem::create_directories(dir / "conf");
    rumour::testing::spit(dir / "conf" / "exp.ini", kSample);
    const auto c = RunConfig::load(dir / "conf" / "exp.ini");
    EXPECT_EQ(c.dataset, (dir.path() / "conf" / "data" / "pheme.jsonl").lexically_normal());
    EXPECT_EQ(c.embedding_store, std::filesystem::path("/abs/store.jsonl"));
    EXPECT_EQ(c.output_dir, std::filesystem::path("results"));
    EXPECT_THROW(RunConfig::load(dir / "nope.ini"), PathError);
}

TEST(RunConfig, HashIsStableAndSensitive) {
    const auto a = RunConfig::parse(kSample, "a");
    const auto b = RunConfig::parse(kSample, "b");
    EXPECT_EQ(a.hash(), b.hash());
    EXPECT_EQ(a.hash().size(), 16u);
    EXPECT_EQ(RunConfig().hash(), RunConfig().hash());
    EXPECT_NE(a.hash(), RunConfig().hash());

    auto c = a;
    c.set("train.mlp.epochs", "5");
    EXPECT_NE(c.hash(), a.hash());
    auto d = a;
    d.output_dir = "elsewhere";
    EXPECT_EQ(d.hash(), a.hash());
}

TEST(RunConfig, EffectiveIniRoundTrips) {
    for (const auto& cfg : {RunConfig(), RunConfig::parse(kSample, "s")}) {
        const auto ini = cfg.to_ini();
        EXPECT_EQ(ini.rfind("; config_hash=" + cfg.hash(), 0), 0u);
        const auto back = RunConfig::parse(ini, "effective");
        EXPECT_EQ(back.canonical(), cfg.canonical());
        EXPECT_EQ(back.hash(), cfg.hash());
    }
}

TEST(RunConfig, RealsPrintShortest) {
    RunConfig c;
    c.set("run.split_fraction", "0.7");
    EXPECT_NE(c.canonical().find("run.split_fraction=0.7\n"), std::string::npos);
    EXPECT_NE(c.canonical().find("train.weight_decay=1e-05\n"), std::string::npos);
}
