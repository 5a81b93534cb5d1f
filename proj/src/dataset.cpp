#include "rumour/dataset.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "rumour/error.hpp"
#include "rumour/rng.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace rumour {

std::string_view to_string(ClassLabel label) {
    return label == ClassLabel::rumour ? "rumour" : "non-rumour";
}

ClassLabel parse_label(std::string_view text) {
    if (text == "rumour") return ClassLabel::rumour;
    if (text == "non-rumour") return ClassLabel::non_rumour;
    throw ValidationError("unknown label \"" + std::string(text) + "\"");
}

void LabeledDataset::validate() const {
    std::unordered_set<std::string> seen;
    for (const auto& t : tweets) {
        if (t.id.empty()) throw ValidationError("tweet with empty id in dataset " + name);
        if (!t.label) throw ValidationError("tweet " + t.id + " has no label");
        if (!seen.insert(t.id).second) throw ValidationError("duplicate tweet id " + t.id);
    }
}

std::size_t LabeledDataset::count(ClassLabel label) const {
    return static_cast<std::size_t>(
        std::count_if(tweets.begin(), tweets.end(), [&](const Tweet& t) { return t.label == label; }));
}

namespace {

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

// Digit ids compare numerically; anything else falls back to byte order.
bool id_less(const std::string& a, const std::string& b) {
    if (all_digits(a) && all_digits(b) && a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

bool hidden(const fs::path& p) {
    const auto name = p.filename().string();
    return !name.empty() && name.front() == '.';
}

std::vector<fs::path> sorted_children(const fs::path& dir, bool want_dirs) {
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (hidden(entry.path())) continue;
        if (want_dirs ? entry.is_directory() : entry.is_regular_file()) out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PathError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::uint64_t count_field(const json& obj, const char* key) {
    if (!obj.contains(key) || obj[key].is_null()) return 0;
    const auto& v = obj[key];
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
        const auto n = v.get<std::int64_t>();
        if (n < 0) throw ValidationError(std::string("negative ") + key);
        return static_cast<std::uint64_t>(n);
    }
    throw ValidationError(std::string("non-integer ") + key);
}

bool bool_field(const json& obj, const char* key) {
    return obj.contains(key) && obj[key].is_boolean() && obj[key].get<bool>();
}

std::optional<std::vector<std::string>> entity_list(const json& entities, const char* key,
                                                    std::initializer_list<const char*> fields) {
    if (!entities.is_object() || !entities.contains(key) || !entities[key].is_array()) return std::nullopt;
    std::vector<std::string> out;
    for (const auto& item : entities[key]) {
        for (const char* field : fields) {
            if (item.contains(field) && item[field].is_string()) {
                out.push_back(item[field].get<std::string>());
                break;
            }
        }
    }
    return out;
}

std::optional<std::vector<std::string>> string_list(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key) || obj[key].is_null()) return std::nullopt;
    if (!obj[key].is_array()) throw ValidationError(where + ": " + key + " must be an array");
    std::vector<std::string> out;
    for (const auto& v : obj[key]) {
        if (!v.is_string()) throw ValidationError(where + ": " + key + " must hold strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

}  // namespace

std::int64_t parse_twitter_timestamp(std::string_view text) {
    static constexpr std::array<std::string_view, 12> months = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                                "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
    std::istringstream in{std::string(text)};
    std::string dow, mon, hms, zone;
    int day = 0, year = 0;
    if (!(in >> dow >> mon >> day >> hms >> zone >> year))
        throw ParseError("bad timestamp \"" + std::string(text) + "\"");
    const auto it = std::find(months.begin(), months.end(), mon);
    int hh = 0, mm = 0, ss = 0;
    if (it == months.end() || std::sscanf(hms.c_str(), "%d:%d:%d", &hh, &mm, &ss) != 3 || zone.size() != 5 ||
        (zone[0] != '+' && zone[0] != '-') || !all_digits(zone.substr(1)))
        throw ParseError("bad timestamp \"" + std::string(text) + "\"");

    using namespace std::chrono;
    const year_month_day ymd{std::chrono::year{year},
                             std::chrono::month{static_cast<unsigned>(it - months.begin() + 1)},
                             std::chrono::day{static_cast<unsigned>(day)}};
    if (!ymd.ok()) throw ParseError("bad date in timestamp \"" + std::string(text) + "\"");
    const std::int64_t days = sys_days{ymd}.time_since_epoch().count();
    const int offset_min = std::stoi(zone.substr(1, 2)) * 60 + std::stoi(zone.substr(3, 2));
    const int sign = zone[0] == '-' ? -1 : 1;
    return days * 86400 + hh * 3600 + mm * 60 + ss - sign * offset_min * 60;
}

Tweet tweet_from_twitter_json(std::string_view json_text, std::optional<ClassLabel> label,
                              const std::string& source_name) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParseError(source_name + ": " + e.what());
    }
    if (!j.is_object()) throw ParseError(source_name + ": tweet is not a JSON object");

    Tweet t;
    try {
        if (j.contains("id_str") && j["id_str"].is_string()) {
            t.id = j["id_str"].get<std::string>();
        } else if (j.contains("id") && j["id"].is_number_integer()) {
            t.id = std::to_string(j["id"].get<std::uint64_t>());
        }
        if (j.contains("full_text") && j["full_text"].is_string()) {
            t.text = j["full_text"].get<std::string>();
        } else if (j.contains("text") && j["text"].is_string()) {
            t.text = j["text"].get<std::string>();
        }
        if (j.contains("created_at") && j["created_at"].is_string())
            t.created_at = parse_twitter_timestamp(j["created_at"].get<std::string>());

        const bool has_rt_status = j.contains("retweeted_status") && !j["retweeted_status"].is_null();
        t.is_retweet = has_rt_status || t.text.rfind("RT @", 0) == 0;

        if (j.contains("user") && j["user"].is_object()) {
            const auto& u = j["user"];
            t.user.verified = bool_field(u, "verified");
            t.user.has_description =
                u.contains("description") && u["description"].is_string() && !u["description"].get<std::string>().empty();
            t.user.has_url = u.contains("url") && u["url"].is_string() && !u["url"].get<std::string>().empty();
            t.user.followers_count = count_field(u, "followers_count");
            t.user.friends_count = count_field(u, "friends_count");
            t.user.statuses_count = count_field(u, "statuses_count");
        }
        if (j.contains("entities")) {
            const auto& e = j["entities"];
            t.hashtags = entity_list(e, "hashtags", {"text"});
            t.urls = entity_list(e, "urls", {"expanded_url", "url"});
            t.user_mentions = entity_list(e, "user_mentions", {"screen_name"});
        }
    } catch (const ParseError& e) {
        throw ParseError(source_name + ": " + e.what());
    } catch (const ValidationError& e) {
        throw ParseError(source_name + ": " + e.what());
    } catch (const json::exception& e) {
        throw ParseError(source_name + ": " + e.what());
    }
    if (t.id.empty()) throw ParseError(source_name + ": tweet has no id");
    t.label = label;
    return t;
}

LabeledDataset load_pheme(const fs::path& root) {
    if (!fs::is_directory(root)) throw PathError("PHEME root not found: " + root.string());

    LabeledDataset ds;
    ds.name = root.filename().empty() ? root.parent_path().filename().string() : root.filename().string();

    const auto events = sorted_children(root, true);
    if (events.empty()) throw StructureError("no events found under " + root.string());

    for (const auto& event : events) {
        std::vector<Tweet> event_tweets;
        bool any_class_dir = false;
        for (const auto& [subdir, label] : {std::pair{"rumours", ClassLabel::rumour},
                                            std::pair{"non-rumours", ClassLabel::non_rumour}}) {
            const fs::path class_dir = event / subdir;
            if (!fs::is_directory(class_dir)) continue;
            any_class_dir = true;
            for (const auto& thread : sorted_children(class_dir, true)) {
                const fs::path src_dir = thread / "source-tweet";
                if (!fs::is_directory(src_dir))
                    throw StructureError("thread without source-tweet/: " + thread.string());
                std::vector<fs::path> files;
                for (const auto& f : sorted_children(src_dir, false))
                    if (f.extension() == ".json") files.push_back(f);
                if (files.size() != 1)
                    throw StructureError("thread " + thread.string() + " has " + std::to_string(files.size()) +
                                         " source tweets, expected 1");
                event_tweets.push_back(tweet_from_twitter_json(read_file(files.front()), label, files.front().string()));
            }
        }
        if (!any_class_dir)
            throw StructureError("event " + event.string() + " has neither rumours/ nor non-rumours/");
        std::stable_sort(event_tweets.begin(), event_tweets.end(),
                         [](const Tweet& a, const Tweet& b) { return id_less(a.id, b.id); });
        std::move(event_tweets.begin(), event_tweets.end(), std::back_inserter(ds.tweets));
    }
    ds.validate();
    return ds;
}

std::string tweet_to_jsonl(const Tweet& t) {
    ordered_json j;
    j["id"] = t.id;
    j["text"] = t.text;
    j["label"] = t.label ? json(std::string(to_string(*t.label))) : json(nullptr);
    j["created_at"] = t.created_at;
    j["is_retweet"] = t.is_retweet;
    ordered_json u;
    u["verified"] = t.user.verified;
    u["has_description"] = t.user.has_description;
    u["has_url"] = t.user.has_url;
    u["followers_count"] = t.user.followers_count;
    u["friends_count"] = t.user.friends_count;
    u["statuses_count"] = t.user.statuses_count;
    j["user"] = std::move(u);
    auto list = [](const std::optional<std::vector<std::string>>& v) {
        return v ? ordered_json(*v) : ordered_json(nullptr);
    };
    j["hashtags"] = list(t.hashtags);
    j["urls"] = list(t.urls);
    j["user_mentions"] = list(t.user_mentions);
    try {
        return j.dump();
    } catch (const json::exception& e) {
        throw ValidationError("tweet " + t.id + ": " + e.what());
    }
}

Tweet tweet_from_jsonl(std::string_view line, const std::string& where) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw ParseError(where + ": " + e.what());
    }
    if (!j.is_object()) throw ParseError(where + ": not a JSON object");

    Tweet t;
    try {
        if (!j.contains("id") || !j["id"].is_string()) throw ValidationError(where + ": missing string id");
        t.id = j["id"].get<std::string>();
        if (j.contains("text") && j["text"].is_string()) t.text = j["text"].get<std::string>();
        if (!j.contains("label") || !j["label"].is_string()) throw ValidationError(where + ": missing label");
        try {
            t.label = parse_label(j["label"].get<std::string>());
        } catch (const ValidationError& e) {
            throw ValidationError(where + ": " + e.what());
        }
        if (j.contains("created_at")) {
            const auto& c = j["created_at"];
            if (c.is_number_integer()) t.created_at = c.get<std::int64_t>();
            else if (c.is_string()) t.created_at = parse_twitter_timestamp(c.get<std::string>());
            else if (!c.is_null()) throw ValidationError(where + ": bad created_at");
        }
        t.is_retweet = bool_field(j, "is_retweet");
        if (j.contains("user") && j["user"].is_object()) {
            const auto& u = j["user"];
            t.user.verified = bool_field(u, "verified");
            t.user.has_description = bool_field(u, "has_description");
            t.user.has_url = bool_field(u, "has_url");
            t.user.followers_count = count_field(u, "followers_count");
            t.user.friends_count = count_field(u, "friends_count");
            t.user.statuses_count = count_field(u, "statuses_count");
        }
        t.hashtags = string_list(j, "hashtags", where);
        t.urls = string_list(j, "urls", where);
        t.user_mentions = string_list(j, "user_mentions", where);
    } catch (const json::exception& e) {
        throw ParseError(where + ": " + e.what());
    }
    return t;
}

LabeledDataset load_jsonl(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PathError("cannot open " + path.string());
    LabeledDataset ds;
    ds.name = path.stem().string();
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ds.tweets.push_back(tweet_from_jsonl(line, path.string() + ":" + std::to_string(lineno)));
    }
    ds.validate();
    return ds;
}

void save_jsonl(const LabeledDataset& dataset, const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw PathError("cannot write " + path.string());
    for (const auto& t : dataset.tweets) out << tweet_to_jsonl(t) << '\n';
    if (!out) throw PathError("write failed: " + path.string());
}

SplitResult stratified_split(const LabeledDataset& dataset, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction <= 1.0))
        throw UsageError("train_fraction must be in (0, 1], got " + std::to_string(train_fraction));

    Rng rng(seed);
    std::unordered_set<std::string> train;
    for (const auto label : {ClassLabel::rumour, ClassLabel::non_rumour}) {
        std::vector<std::string> ids;
        for (const auto& t : dataset.tweets)
            if (t.label == label) ids.push_back(t.id);
        if (ids.empty()) throw ValidationError("class " + std::string(to_string(label)) + " is empty");
        rng.shuffle(ids);
        // Exact floor for fractions like 0.7 whose binary value lies just below the decimal.
        auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(ids.size()) + 1e-9));
        n_train = std::min(n_train, ids.size());
        train.insert(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
    }

    SplitResult out;
    out.seed = seed;
    out.train_fraction = train_fraction;
    for (const auto& t : dataset.tweets) (train.count(t.id) ? out.train_ids : out.test_ids).push_back(t.id);
    return out;
}

std::vector<std::string> FoldPlan::members(int fold) const {
    std::vector<std::string> out;
    for (const auto& id : order)
        if (assignment.at(id) == fold) out.push_back(id);
    return out;
}

std::vector<std::string> FoldPlan::complement(int fold) const {
    std::vector<std::string> out;
    for (const auto& id : order)
        if (assignment.at(id) != fold) out.push_back(id);
    return out;
}

FoldPlan make_folds(std::span<const std::string> ids, int k, std::uint64_t seed) {
    if (k < 2) throw UsageError("k must be >= 2, got " + std::to_string(k));
    if (static_cast<std::size_t>(k) > ids.size())
        throw UsageError("k = " + std::to_string(k) + " exceeds number of ids " + std::to_string(ids.size()));

    FoldPlan plan;
    plan.k = k;
    plan.order.assign(ids.begin(), ids.end());
    std::vector<std::string> shuffled = plan.order;
    Rng rng(seed);
    rng.shuffle(shuffled);
    for (std::size_t i = 0; i < shuffled.size(); ++i) {
        if (!plan.assignment.emplace(shuffled[i], static_cast<int>(i % static_cast<std::size_t>(k))).second)
            throw ValidationError("duplicate id " + shuffled[i] + " in fold input");
    }
    return plan;
}

}  // namespace rumour
