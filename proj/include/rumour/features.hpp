#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rumour/dataset.hpp"

namespace rumour {

/// Word lists driving the lexicon-based content features. Every set holds
/// lowercase single tokens; emoticons are literal, case-sensitive tokens.
struct Lexicons {
    std::set<std::string> positive_words;
    std::set<std::string> negative_words;
    std::set<std::string> first_pronouns;
    std::set<std::string> second_pronouns;
    std::set<std::string> third_pronouns;
    std::set<std::string> temporal_refs;
    std::set<std::string> intensifiers;
    std::set<std::string> slang_terms;
    std::set<std::string> news_agencies;
    std::set<std::string> selected_users;
    std::set<std::string> top_domains;
    std::set<std::string> stop_words;
    std::vector<std::string> smile_patterns;
    std::vector<std::string> frown_patterns;

    /// Lexicon files that loaded empty.
    std::vector<std::string> warnings;
};

/// Reads the fixed file set (positive_words.txt ... emoticons.txt) from `dir`.
/// One entry per line, `#` starts a comment, entries are lowercased and deduplicated.
Lexicons load_lexicons(const std::filesystem::path& dir);

inline constexpr std::size_t kContextFeatures = 9;
inline constexpr std::size_t kContentFeatures = 30;
inline constexpr std::size_t kFeatureCount = kContextFeatures + kContentFeatures;
inline constexpr std::string_view kFeatureSchema = "tweet39.v1";

/// Slot layout (schema tweet39.v1):
///
///  0 verified            10 word count              20 uppercase chars     30 2nd-person pronouns
///  1 has description     11 character count         21 '?' count           31 3rd-person pronouns
///  2 has profile url     12 top-100 domain          22 '!' count           32 temporal refs
///  3 followers           13 contains url            23 '??' '!!' '?!' run  33 lexical density (%)
///  4 friends             14 url count               24 smile emoticons     34 slang terms
///  5 followers > 500     15 mentions news agency    25 frown emoticons     35 intensifiers
///  6 posted Mon-Fri UTC  16 mention count           26 positive words      36 char repeated >= 3
///  7 statuses            17 stock symbol            27 negative words      37 all-uppercase word
///  8 retweet             18 contains digits         28 sentiment 26 - 27   38 title capitalisation
///                        19 selected user           29 1st-person pronouns
struct FeatureVector {
    std::array<std::int64_t, kFeatureCount> values{};
    std::string schema_id{kFeatureSchema};

    bool operator==(const FeatureVector&) const = default;
};

/// Slots holding 0/1 values.
inline constexpr std::array<std::size_t, 16> kBooleanSlots = {0, 1, 2, 5, 6, 8, 12, 13, 15, 17, 18, 19, 23, 36, 37, 38};

/// Short column names, f00..f38.
std::string feature_column(std::size_t slot);
/// Human-readable description of a slot.
std::string_view feature_description(std::size_t slot);

std::array<std::int64_t, kContextFeatures> extract_context_features(const Tweet& tweet);
std::array<std::int64_t, kContentFeatures> extract_content_features(const Tweet& tweet, const Lexicons& lexicons);
FeatureVector extract_all(const Tweet& tweet, const Lexicons& lexicons);

/// Host part of a URL, lowercased, without a leading "www.".
std::string url_host(std::string_view url);

struct FeatureRow {
    std::string id;
    FeatureVector features;
    ClassLabel label = ClassLabel::rumour;
};

/// CSV with header `id,f00..f38,label`.
void write_feature_csv(const std::vector<FeatureRow>& rows, const std::filesystem::path& path);
std::vector<FeatureRow> read_feature_csv(const std::filesystem::path& path);

}  // namespace rumour
