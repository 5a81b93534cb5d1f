#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "rumour/dataset.hpp"
#include "rumour/error.hpp"
#include "support.hpp"

using namespace rumour;
using rumour::testing::TempDir;

namespace {

std::filesystem::path pheme_mini() { return rumour::testing::fixtures() / "pheme_mini"; }

void write_source(const std::filesystem::path& thread, const std::string& id, const std::string& body) {
    std::filesystem::create_directories(thread / "source-tweet");
    rumour::testing::spit(thread / "source-tweet" / (id + ".json"), body);
}

std::string minimal_tweet(const std::string& id) {
    return R"({"id_str":")" + id + R"(","text":"hello","created_at":"Wed Jan 07 11:06:08 +0000 2015","user":{}})";
}

}  // namespace

TEST(LoadPheme, FixtureTreeHasTwoOfEachClass) {
    const auto ds = load_pheme(pheme_mini());
    ASSERT_EQ(ds.tweets.size(), 4u);
    EXPECT_EQ(ds.count(ClassLabel::rumour), 2u);
    EXPECT_EQ(ds.count(ClassLabel::non_rumour), 2u);

    // Event order, then numeric id order inside each event.
    EXPECT_EQ(ds.tweets[0].id, "552783667052167168");
    EXPECT_EQ(ds.tweets[0].label, ClassLabel::rumour);
    EXPECT_EQ(ds.tweets[1].id, "552784600502915072");
    EXPECT_EQ(ds.tweets[1].label, ClassLabel::non_rumour);
    EXPECT_EQ(ds.tweets[2].id, "524923676484177920");
    EXPECT_EQ(ds.tweets[2].label, ClassLabel::non_rumour);
    EXPECT_EQ(ds.tweets[3].id, "524925050739490816");
    EXPECT_EQ(ds.tweets[3].label, ClassLabel::rumour);
}

TEST(LoadPheme, ParsesTweetFields) {
    const auto ds = load_pheme(pheme_mini());
    const Tweet& t = ds.tweets[0];
    EXPECT_EQ(t.created_at, 1420628768);
    EXPECT_FALSE(t.is_retweet);
    EXPECT_TRUE(t.user.verified);
    EXPECT_TRUE(t.user.has_description);
    EXPECT_TRUE(t.user.has_url);
    EXPECT_EQ(t.user.followers_count, 120000u);
    ASSERT_TRUE(t.hashtags.has_value());
    EXPECT_EQ(*t.hashtags, std::vector<std::string>{"CharlieHebdo"});
    ASSERT_TRUE(t.urls.has_value());
    EXPECT_EQ(*t.urls, std::vector<std::string>{"http://www.bbc.co.uk/news/world-30710883"});

    EXPECT_TRUE(ds.tweets[2].is_retweet);           // retweeted_status present
    EXPECT_FALSE(ds.tweets[3].hashtags.has_value());  // no entities block
    EXPECT_FALSE(ds.tweets[3].user.has_url);          // null url
}

TEST(LoadPheme, RepeatedLoadsAreEqual) { EXPECT_EQ(load_pheme(pheme_mini()), load_pheme(pheme_mini())); }

TEST(LoadPheme, EmptyRootIsAStructureError) {
    TempDir dir;
    try {
        load_pheme(dir.path());
        FAIL() << "expected StructureError";
    } catch (const StructureError& e) {
        EXPECT_NE(std::string(e.what()).find("no events found"), std::string::npos);
    }
}

TEST(LoadPheme, MissingRootIsAPathError) { EXPECT_THROW(load_pheme("/nonexistent/pheme"), PathError); }

TEST(LoadPheme, MalformedJsonNamesTheFile) {
    TempDir dir;
    write_source(dir / "ev/rumours/11", "11", "{not json");
    try {
        load_pheme(dir.path());
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("11.json"), std::string::npos);
    }
}

TEST(LoadPheme, ThreadWithTwoSourceTweetsIsAStructureError) {
    TempDir dir;
    write_source(dir / "ev/rumours/11", "11", minimal_tweet("11"));
    write_source(dir / "ev/rumours/11", "12", minimal_tweet("12"));
    EXPECT_THROW(load_pheme(dir.path()), StructureError);
}

TEST(LoadPheme, ThreadWithoutSourceTweetIsAStructureError) {
    TempDir dir;
    std::filesystem::create_directories(dir / "ev/non-rumours/11/reactions");
    EXPECT_THROW(load_pheme(dir.path()), StructureError);
}

TEST(LoadPheme, RetweetDetectedFromTextPrefix) {
    const Tweet t = tweet_from_twitter_json(
        R"({"id_str":"5","text":"RT @bbc: news","created_at":"Sat Jan 10 00:00:00 +0000 2015"})", ClassLabel::rumour, "x");
    EXPECT_TRUE(t.is_retweet);
    EXPECT_EQ(t.created_at, 1420848000);
}

TEST(TwitterTimestamp, ParsesAndRejects) {
    EXPECT_EQ(parse_twitter_timestamp("Thu Jan 01 00:00:00 +0000 1970"), 0);
    EXPECT_EQ(parse_twitter_timestamp("Wed Oct 22 14:33:25 +0000 2014"), 1413988405);
    EXPECT_EQ(parse_twitter_timestamp("Wed Oct 22 16:33:25 +0200 2014"), 1413988405);
    EXPECT_THROW(parse_twitter_timestamp("yesterday"), ParseError);
    EXPECT_THROW(parse_twitter_timestamp("Wed Feb 30 10:00:00 +0000 2015"), ParseError);
}

TEST(Jsonl, ThreeLinesGiveThreeTweets) {
    TempDir dir;
    rumour::testing::spit(dir / "d.jsonl",
                          R"({"id":"1","text":"a","label":"rumour"})" "\n"
                          R"({"id":"2","text":"b","label":"non-rumour","extra":true})" "\n"
                          R"({"id":"3","text":"c","label":"rumour"})" "\n");
    const auto ds = load_jsonl(dir / "d.jsonl");
    ASSERT_EQ(ds.tweets.size(), 3u);
    EXPECT_EQ(ds.tweets[1].label, ClassLabel::non_rumour);
    EXPECT_FALSE(ds.tweets[0].hashtags.has_value());
}

TEST(Jsonl, UnknownLabelIsAValidationError) {
    TempDir dir;
    rumour::testing::spit(dir / "d.jsonl", R"({"id":"1","text":"a","label":"maybe"})" "\n");
    EXPECT_THROW(load_jsonl(dir / "d.jsonl"), ValidationError);
}

TEST(Jsonl, DuplicateIdIsAValidationError) {
    TempDir dir;
    rumour::testing::spit(dir / "d.jsonl", R"({"id":"1","label":"rumour"})" "\n" R"({"id":"1","label":"rumour"})" "\n");
    EXPECT_THROW(load_jsonl(dir / "d.jsonl"), ValidationError);
}

TEST(Jsonl, BrokenLineIsAParseError) {
    TempDir dir;
    rumour::testing::spit(dir / "d.jsonl", "{\"id\":\n");
    EXPECT_THROW(load_jsonl(dir / "d.jsonl"), ParseError);
}

TEST(Jsonl, EmptyAndSingleDatasets) {
    TempDir dir;
    LabeledDataset empty;
    save_jsonl(empty, dir / "e.jsonl");
    EXPECT_EQ(rumour::testing::slurp(dir / "e.jsonl"), "");

    auto one = rumour::testing::synthetic_dataset(1, 0, 1);
    save_jsonl(one, dir / "o.jsonl");
    const auto text = rumour::testing::slurp(dir / "o.jsonl");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
}

TEST(Jsonl, KeysAreInCanonicalOrder) {
    Tweet t;
    t.id = "9";
    t.text = "x";
    t.label = ClassLabel::rumour;
    t.hashtags = std::vector<std::string>{"a"};
    EXPECT_EQ(tweet_to_jsonl(t),
              R"({"id":"9","text":"x","label":"rumour","created_at":0,"is_retweet":false,)"
              R"("user":{"verified":false,"has_description":false,"has_url":false,"followers_count":0,)"
              R"("friends_count":0,"statuses_count":0},"hashtags":["a"],"urls":null,"user_mentions":null})");
}

TEST(Jsonl, RoundTripIsIdentityOnRandomDatasets) {
    Rng rng(2024);
    const std::vector<std::string> pieces = {"breaking", "Café", "#tag", "@user", "http://t.co/x", "\"quoted\"",
                                             "tab\there", "line\nbreak", "emoji \xF0\x9F\x98\x80", "back\\slash", ""};
    auto pick_list = [&]() -> std::optional<std::vector<std::string>> {
        if (rng.uniform_index(3) == 0) return std::nullopt;
        std::vector<std::string> v;
        for (std::uint64_t i = 0, n = rng.uniform_index(4); i < n; ++i) v.push_back(pieces[rng.uniform_index(pieces.size())]);
        return v;
    };
    for (int round = 0; round < 5; ++round) {
        LabeledDataset ds;
        ds.name = "rt";
        for (int i = 0; i < 50; ++i) {
            Tweet t;
            t.id = std::to_string(1000000000000000000ull + rng.next_u64() % 1000000000ull) + "_" + std::to_string(i);
            for (std::uint64_t w = 0, n = rng.uniform_index(8); w < n; ++w)
                t.text += pieces[rng.uniform_index(pieces.size())] + " ";
            t.created_at = static_cast<std::int64_t>(rng.uniform_index(2000000000));
            t.is_retweet = rng.uniform_index(2) == 1;
            t.user.verified = rng.uniform_index(2) == 1;
            t.user.has_description = rng.uniform_index(2) == 1;
            t.user.has_url = rng.uniform_index(2) == 1;
            t.user.followers_count = rng.next_u64() >> 20;
            t.user.friends_count = rng.uniform_index(5000);
            t.user.statuses_count = rng.uniform_index(100000);
            t.hashtags = pick_list();
            t.urls = pick_list();
            t.user_mentions = pick_list();
            t.label = rng.uniform_index(2) ? ClassLabel::rumour : ClassLabel::non_rumour;
            ds.tweets.push_back(std::move(t));
        }
        TempDir dir;
        const auto path = dir / "rt.jsonl";
        save_jsonl(ds, path);
        EXPECT_EQ(load_jsonl(path), ds);
    }
}

TEST(StratifiedSplit, PhemeCountsFollowTheFloorRule) {
    const auto ds = rumour::testing::synthetic_dataset(1969, 3822, 9);
    const auto split = stratified_split(ds, 0.7, 42);
    std::size_t train_r = 0, test_r = 0;
    std::set<std::string> train(split.train_ids.begin(), split.train_ids.end());
    for (const auto& t : ds.tweets)
        if (t.label == ClassLabel::rumour) (train.count(t.id) ? train_r : test_r)++;
    EXPECT_EQ(train_r, 1378u);
    EXPECT_EQ(split.train_ids.size() - train_r, 2675u);
    EXPECT_EQ(test_r, 591u);
    EXPECT_EQ(split.test_ids.size() - test_r, 1147u);
}

TEST(StratifiedSplit, FullFractionLeavesTestEmpty) {
    const auto ds = rumour::testing::synthetic_dataset(5, 7, 1);
    const auto split = stratified_split(ds, 1.0, 3);
    EXPECT_EQ(split.train_ids.size(), 12u);
    EXPECT_TRUE(split.test_ids.empty());
}

TEST(StratifiedSplit, SameSeedSameSplitDifferentSeedDiffers) {
    const auto ds = rumour::testing::synthetic_dataset(40, 60, 1);
    EXPECT_EQ(stratified_split(ds, 0.7, 5), stratified_split(ds, 0.7, 5));
    EXPECT_NE(stratified_split(ds, 0.7, 5).train_ids, stratified_split(ds, 0.7, 6).train_ids);
}

TEST(StratifiedSplit, RejectsEmptyClassAndBadFraction) {
    EXPECT_THROW(stratified_split(rumour::testing::synthetic_dataset(0, 4, 1), 0.7, 1), ValidationError);
    EXPECT_THROW(stratified_split(rumour::testing::synthetic_dataset(3, 4, 1), 0.0, 1), UsageError);
    EXPECT_THROW(stratified_split(rumour::testing::synthetic_dataset(3, 4, 1), 1.5, 1), UsageError);
}

// Partition, floor rule and dataset order over many random shapes. Fractions are
// whole percentages so the expected train size is the exact integer (p * n) / 100.
TEST(StratifiedSplit, PropertiesOnRandomDatasets) {
    Rng rng(77);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t nr = 1 + rng.uniform_index(60);
        const std::size_t nn = 1 + rng.uniform_index(60);
        const std::uint64_t percent = 1 + rng.uniform_index(100);
        const auto ds = rumour::testing::synthetic_dataset(nr, nn, rng.next_u64());
        const auto split = stratified_split(ds, static_cast<double>(percent) / 100.0, rng.next_u64());

        std::set<std::string> train(split.train_ids.begin(), split.train_ids.end());
        std::set<std::string> test(split.test_ids.begin(), split.test_ids.end());
        ASSERT_EQ(train.size(), split.train_ids.size());
        ASSERT_EQ(train.size() + test.size(), ds.tweets.size());
        std::size_t train_r = 0, train_n = 0;
        for (const auto& t : ds.tweets) {
            ASSERT_NE(train.count(t.id), test.count(t.id)) << t.id;
            if (train.count(t.id)) (t.label == ClassLabel::rumour ? train_r : train_n)++;
        }
        ASSERT_EQ(train_r, percent * nr / 100) << "trial " << trial;
        ASSERT_EQ(train_n, percent * nn / 100) << "trial " << trial;

        // Both lists keep dataset order.
        std::vector<std::string> order;
        for (const auto& t : ds.tweets) order.push_back(t.id);
        auto pos = [&](const std::string& id) { return std::find(order.begin(), order.end(), id) - order.begin(); };
        ASSERT_TRUE(std::is_sorted(split.train_ids.begin(), split.train_ids.end(),
                                   [&](const auto& a, const auto& b) { return pos(a) < pos(b); }));
        ASSERT_TRUE(std::is_sorted(split.test_ids.begin(), split.test_ids.end(),
                                   [&](const auto& a, const auto& b) { return pos(a) < pos(b); }));
    }
}

namespace {

std::vector<std::string> ids(std::size_t n) {
    std::vector<std::string> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back("id" + std::to_string(i));
    return v;
}

std::vector<std::size_t> fold_sizes(const FoldPlan& plan) {
    std::vector<std::size_t> sizes;
    for (int f = 0; f < plan.k; ++f) sizes.push_back(plan.members(f).size());
    return sizes;
}

}  // namespace

TEST(MakeFolds, TenIdsFiveFoldsOfTwo) {
    const auto plan = make_folds(ids(10), 5, 1);
    EXPECT_EQ(fold_sizes(plan), (std::vector<std::size_t>{2, 2, 2, 2, 2}));
}

TEST(MakeFolds, ElevenIdsRoundRobin) {
    const auto plan = make_folds(ids(11), 5, 1);
    EXPECT_EQ(fold_sizes(plan), (std::vector<std::size_t>{3, 2, 2, 2, 2}));
}

TEST(MakeFolds, RejectsBadK) {
    EXPECT_THROW(make_folds(ids(10), 1, 1), UsageError);
    EXPECT_THROW(make_folds(ids(3), 4, 1), UsageError);
}

TEST(MakeFolds, MembersAndComplementPartitionInInputOrder) {
    const auto input = ids(13);
    const auto plan = make_folds(input, 4, 8);
    for (int f = 0; f < 4; ++f) {
        const auto m = plan.members(f);
        const auto c = plan.complement(f);
        EXPECT_EQ(m.size() + c.size(), input.size());
        std::vector<std::string> merged = m;
        merged.insert(merged.end(), c.begin(), c.end());
        std::sort(merged.begin(), merged.end());
        auto sorted_input = input;
        std::sort(sorted_input.begin(), sorted_input.end());
        EXPECT_EQ(merged, sorted_input);
        auto pos = [&](const std::string& id) { return std::find(input.begin(), input.end(), id) - input.begin(); };
        EXPECT_TRUE(std::is_sorted(m.begin(), m.end(), [&](auto& a, auto& b) { return pos(a) < pos(b); }));
    }
}

TEST(MakeFolds, PropertiesOnRandomInputs) {
    Rng rng(99);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + rng.uniform_index(200);
        const int k = static_cast<int>(2 + rng.uniform_index(std::min<std::size_t>(n - 1, 10)));
        const std::uint64_t seed = rng.next_u64();
        const auto plan = make_folds(ids(n), k, seed);
        ASSERT_EQ(plan.assignment.size(), n);
        for (const auto& [id, fold] : plan.assignment) ASSERT_TRUE(fold >= 0 && fold < k);
        const auto sizes = fold_sizes(plan);
        ASSERT_LE(*std::max_element(sizes.begin(), sizes.end()) - *std::min_element(sizes.begin(), sizes.end()), 1u);
        ASSERT_EQ(plan, make_folds(ids(n), k, seed));
    }
}
