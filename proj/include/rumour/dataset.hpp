#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rumour {

/// Binary target. non_rumour is the positive class when building confusion matrices.
enum class ClassLabel { rumour, non_rumour };

std::string_view to_string(ClassLabel label);
/// Accepts "rumour" and "non-rumour"; anything else throws ValidationError.
ClassLabel parse_label(std::string_view text);

struct UserMeta {
    bool verified = false;
    bool has_description = false;
    bool has_url = false;
    std::uint64_t followers_count = 0;
    std::uint64_t friends_count = 0;
    std::uint64_t statuses_count = 0;

    bool operator==(const UserMeta&) const = default;
};

struct Tweet {
    std::string id;
    std::string text;
    std::int64_t created_at = 0;  // UTC seconds since the epoch
    bool is_retweet = false;
    UserMeta user;
    // Entity lists are absent (nullopt) when the source carried no entity
    // metadata; feature extraction then falls back to scanning the text.
    std::optional<std::vector<std::string>> hashtags;
    std::optional<std::vector<std::string>> urls;
    std::optional<std::vector<std::string>> user_mentions;
    std::optional<ClassLabel> label;

    bool operator==(const Tweet&) const = default;
};

struct LabeledDataset {
    std::string name;
    std::vector<Tweet> tweets;

    /// Throws ValidationError on an unlabeled tweet, an empty id or a duplicate id.
    void validate() const;

    std::size_t count(ClassLabel label) const;

    bool operator==(const LabeledDataset&) const = default;
};

/// Reads a PHEME tree: <root>/<event>/(rumours|non-rumours)/<thread>/source-tweet/<id>.json.
/// Reactions are ignored. Tweets are ordered by event name, then numerically by id.
LabeledDataset load_pheme(const std::filesystem::path& root);

/// Converts one Twitter-API tweet object. `label` is attached as-is.
Tweet tweet_from_twitter_json(std::string_view json_text, std::optional<ClassLabel> label,
                              const std::string& source_name);

/// Parses "Wed Jan 07 11:06:08 +0000 2015" into UTC seconds.
std::int64_t parse_twitter_timestamp(std::string_view text);

LabeledDataset load_jsonl(const std::filesystem::path& path);
void save_jsonl(const LabeledDataset& dataset, const std::filesystem::path& path);

/// JSONL line for one tweet, keys in canonical order.
std::string tweet_to_jsonl(const Tweet& tweet);
Tweet tweet_from_jsonl(std::string_view line, const std::string& where);

struct SplitResult {
    std::vector<std::string> train_ids;  // dataset order
    std::vector<std::string> test_ids;   // dataset order
    std::uint64_t seed = 0;
    double train_fraction = 0.7;

    bool operator==(const SplitResult&) const = default;
};

/// Shuffles each class with the seeded generator and sends the first
/// floor(fraction * |class|) ids of each to train.
SplitResult stratified_split(const LabeledDataset& dataset, double train_fraction, std::uint64_t seed);

struct FoldPlan {
    int k = 0;
    std::map<std::string, int> assignment;
    /// Ids in the order given to make_folds, so members of a fold keep that order.
    std::vector<std::string> order;

    std::vector<std::string> members(int fold) const;
    std::vector<std::string> complement(int fold) const;

    bool operator==(const FoldPlan&) const = default;
};

/// Seeded shuffle followed by round-robin assignment.
FoldPlan make_folds(std::span<const std::string> ids, int k, std::uint64_t seed);

}  // namespace rumour
