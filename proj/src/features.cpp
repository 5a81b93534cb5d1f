#include "rumour/features.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "rumour/error.hpp"
#include "rumour/unicode.hpp"

namespace fs = std::filesystem;

namespace rumour {

namespace {

constexpr std::array<std::string_view, kFeatureCount> kDescriptions = {
    "verified account",
    "account has a description",
    "account has a URL",
    "number of followers",
    "number of friends",
    "account has over 500 followers",
    "posted on a weekday (UTC)",
    "number of posts",
    "is a retweet",
    "number of hashtags",
    "word count",
    "character count",
    "contains a top-100 domain",
    "contains a URL",
    "number of URLs",
    "mentions a news agency",
    "number of user mentions",
    "contains a stock symbol",
    "contains digits",
    "contains a selected user",
    "number of uppercase characters",
    "number of question marks",
    "number of exclamation marks",
    "contains multiple '?' or '!'",
    "number of smile emoticons",
    "number of frown emoticons",
    "number of positive words",
    "number of negative words",
    "sentiment score",
    "number of 1st-person pronouns",
    "number of 2nd-person pronouns",
    "number of 3rd-person pronouns",
    "number of temporal references",
    "lexical density (percent)",
    "number of slang terms",
    "number of intensifiers",
    "contains a character repeated 3+ times",
    "contains an all-uppercase word",
    "title capitalisation",
};

bool is_word_char(char32_t c) { return c == U'_' || text::is_alpha(c) || text::is_digit(c); }
bool is_ascii_letter(char32_t c) { return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z'); }
bool is_ascii_word(char32_t c) { return is_ascii_letter(c) || (c >= U'0' && c <= U'9') || c == U'_'; }

// '#tag' not glued to a preceding word character.
std::vector<std::string> scan_hashtags(const std::u32string& s) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != U'#' || (i > 0 && is_word_char(s[i - 1]))) continue;
        std::size_t j = i + 1;
        while (j < s.size() && is_word_char(s[j])) ++j;
        if (j > i + 1) {
            out.push_back(text::encode(s.substr(i + 1, j - i - 1)));
            i = j - 1;
        }
    }
    return out;
}

std::vector<std::string> scan_mentions(const std::u32string& s) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != U'@' || (i > 0 && is_word_char(s[i - 1]))) continue;
        std::size_t j = i + 1;
        while (j < s.size() && is_ascii_word(s[j])) ++j;
        if (j > i + 1) {
            out.push_back(text::encode(s.substr(i + 1, j - i - 1)));
            i = j - 1;
        }
    }
    return out;
}

std::vector<std::string> scan_urls(const std::u32string& s) {
    std::vector<std::string> out;
    const std::u32string lower = text::to_lower(s);
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t skip = 0;
        if (lower.compare(i, 7, U"http://") == 0) skip = 7;
        else if (lower.compare(i, 8, U"https://") == 0) skip = 8;
        if (skip == 0) {
            ++i;
            continue;
        }
        std::size_t j = i + skip;
        while (j < s.size() && !text::is_space(s[j])) ++j;
        if (j > i + skip) out.push_back(text::encode(s.substr(i, j - i)));
        i = j;
    }
    return out;
}

bool has_stock_symbol(const std::u32string& s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != U'$' || (i > 0 && is_word_char(s[i - 1]))) continue;
        std::size_t j = i + 1;
        while (j < s.size() && is_ascii_letter(s[j])) ++j;
        const std::size_t letters = j - i - 1;
        if (letters >= 1 && letters <= 6 && (j == s.size() || !is_ascii_word(s[j]))) return true;
    }
    return false;
}

std::int64_t count_in(const std::vector<std::string>& words, const std::set<std::string>& lexicon) {
    return static_cast<std::int64_t>(
        std::count_if(words.begin(), words.end(), [&](const std::string& w) { return lexicon.count(w) > 0; }));
}

bool any_in(const std::vector<std::string>& names, const std::set<std::string>& lexicon) {
    return std::any_of(names.begin(), names.end(),
                       [&](const std::string& n) { return lexicon.count(text::to_lower(n)) > 0; });
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> read_entries(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PathError("missing lexicon file " + path.string());
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        out.push_back(line);
    }
    return out;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

std::string feature_column(std::size_t slot) {
    std::string s = "f";
    if (slot < 10) s += '0';
    return s + std::to_string(slot);
}

std::string_view feature_description(std::size_t slot) { return kDescriptions.at(slot); }

std::string url_host(std::string_view url) {
    std::string s = text::to_lower(url);
    if (const auto p = s.find("://"); p != std::string::npos) s = s.substr(p + 3);
    const auto end = s.find_first_of("/?#");
    if (end != std::string::npos) s = s.substr(0, end);
    if (const auto at = s.rfind('@'); at != std::string::npos) s = s.substr(at + 1);
    if (const auto colon = s.find(':'); colon != std::string::npos) s = s.substr(0, colon);
    if (s.rfind("www.", 0) == 0) s = s.substr(4);
    return s;
}

Lexicons load_lexicons(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw PathError("lexicon directory not found: " + dir.string());
    Lexicons lex;
    const std::pair<const char*, std::set<std::string>*> sets[] = {
        {"positive_words.txt", &lex.positive_words}, {"negative_words.txt", &lex.negative_words},
        {"first_pronouns.txt", &lex.first_pronouns}, {"second_pronouns.txt", &lex.second_pronouns},
        {"third_pronouns.txt", &lex.third_pronouns}, {"temporal_refs.txt", &lex.temporal_refs},
        {"intensifiers.txt", &lex.intensifiers},     {"slang_terms.txt", &lex.slang_terms},
        {"news_agencies.txt", &lex.news_agencies},   {"selected_users.txt", &lex.selected_users},
        {"top_domains.txt", &lex.top_domains},       {"stop_words.txt", &lex.stop_words},
    };
    for (const auto& [file, target] : sets) {
        for (const auto& e : read_entries(dir / file)) target->insert(text::to_lower(e));
        if (target->empty()) lex.warnings.push_back(std::string(file) + " is empty");
    }

    std::vector<std::string>* section = nullptr;
    for (const auto& e : read_entries(dir / "emoticons.txt")) {
        if (e == "[smile]") section = &lex.smile_patterns;
        else if (e == "[frown]") section = &lex.frown_patterns;
        else if (section == nullptr)
            throw ParseError((dir / "emoticons.txt").string() + ": entry \"" + e + "\" before a [smile]/[frown] section");
        else if (std::find(section->begin(), section->end(), e) == section->end())
            section->push_back(e);
    }
    if (lex.smile_patterns.empty()) lex.warnings.push_back("emoticons.txt has no [smile] entries");
    if (lex.frown_patterns.empty()) lex.warnings.push_back("emoticons.txt has no [frown] entries");
    return lex;
}

std::array<std::int64_t, kContextFeatures> extract_context_features(const Tweet& t) {
    const std::int64_t days = floor_div(t.created_at, 86400);
    const std::int64_t dow = ((days + 4) % 7 + 7) % 7;  // 0 = Sunday; the epoch was a Thursday
    return {
        t.user.verified ? 1 : 0,
        t.user.has_description ? 1 : 0,
        t.user.has_url ? 1 : 0,
        static_cast<std::int64_t>(t.user.followers_count),
        static_cast<std::int64_t>(t.user.friends_count),
        t.user.followers_count > 500 ? 1 : 0,
        (dow >= 1 && dow <= 5) ? 1 : 0,
        static_cast<std::int64_t>(t.user.statuses_count),
        t.is_retweet ? 1 : 0,
    };
}

std::array<std::int64_t, kContentFeatures> extract_content_features(const Tweet& t, const Lexicons& lex) {
    const std::u32string s = text::decode(t.text);
    const auto tokens = text::split_whitespace(s);

    std::vector<std::string> words;  // lowercased, punctuation-stripped, non-empty
    std::vector<std::string> raw_tokens;
    for (const auto& tok : tokens) {
        raw_tokens.push_back(text::encode(tok));
        auto w = text::to_lower(text::strip_punct(tok));
        if (!w.empty()) words.push_back(text::encode(w));
    }

    const auto hashtags = t.hashtags ? *t.hashtags : scan_hashtags(s);
    const auto urls = t.urls ? *t.urls : scan_urls(s);
    const auto mentions = t.user_mentions ? *t.user_mentions : scan_mentions(s);

    std::array<std::int64_t, kContentFeatures> f{};
    auto set = [&](std::size_t slot, std::int64_t v) { f[slot - kContextFeatures] = v; };

    const auto word_count = static_cast<std::int64_t>(tokens.size());
    set(9, static_cast<std::int64_t>(hashtags.size()));
    set(10, word_count);
    set(11, static_cast<std::int64_t>(s.size()));

    bool top_domain = false;
    for (const auto& u : urls) {
        const std::string host = url_host(u);
        for (const auto& d : lex.top_domains) {
            if (host == d || (host.size() > d.size() && host.ends_with(d) && host[host.size() - d.size() - 1] == '.')) {
                top_domain = true;
                break;
            }
        }
        if (top_domain) break;
    }
    set(12, top_domain ? 1 : 0);
    set(13, urls.empty() ? 0 : 1);
    set(14, static_cast<std::int64_t>(urls.size()));
    set(15, any_in(mentions, lex.news_agencies) ? 1 : 0);
    set(16, static_cast<std::int64_t>(mentions.size()));
    set(17, has_stock_symbol(s) ? 1 : 0);
    set(18, std::any_of(s.begin(), s.end(), text::is_digit) ? 1 : 0);
    set(19, any_in(mentions, lex.selected_users) ? 1 : 0);

    std::int64_t upper = 0, question = 0, exclaim = 0;
    bool multi_mark = false, repeated = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char32_t c = s[i];
        if (text::is_upper(c)) ++upper;
        if (c == U'?') ++question;
        if (c == U'!') ++exclaim;
        const bool mark = c == U'?' || c == U'!';
        if (mark && i + 1 < s.size() && (s[i + 1] == U'?' || s[i + 1] == U'!')) multi_mark = true;
        if (!text::is_space(c) && i + 2 < s.size() && s[i + 1] == c && s[i + 2] == c) repeated = true;
    }
    set(20, upper);
    set(21, question);
    set(22, exclaim);
    set(23, multi_mark ? 1 : 0);

    auto count_tokens = [&](const std::vector<std::string>& patterns) {
        return static_cast<std::int64_t>(std::count_if(raw_tokens.begin(), raw_tokens.end(), [&](const std::string& tok) {
            return std::find(patterns.begin(), patterns.end(), tok) != patterns.end();
        }));
    };
    set(24, count_tokens(lex.smile_patterns));
    set(25, count_tokens(lex.frown_patterns));

    const std::int64_t pos = count_in(words, lex.positive_words);
    const std::int64_t neg = count_in(words, lex.negative_words);
    set(26, pos);
    set(27, neg);
    set(28, pos - neg);
    set(29, count_in(words, lex.first_pronouns));
    set(30, count_in(words, lex.second_pronouns));
    set(31, count_in(words, lex.third_pronouns));
    set(32, count_in(words, lex.temporal_refs));

    const auto content = static_cast<std::int64_t>(words.size()) - count_in(words, lex.stop_words);
    const std::int64_t denom = std::max<std::int64_t>(1, word_count);
    set(33, (200 * content + denom) / (2 * denom));  // round half up on a non-negative ratio
    set(34, count_in(words, lex.slang_terms));
    set(35, count_in(words, lex.intensifiers));
    set(36, repeated ? 1 : 0);

    bool caps_word = false;
    for (const auto& tok : tokens) {
        const auto core = text::strip_punct(tok);
        if (core.size() >= 2 && std::all_of(core.begin(), core.end(), text::is_upper)) {
            caps_word = true;
            break;
        }
    }
    set(37, caps_word ? 1 : 0);

    const auto first_alpha = std::find_if(s.begin(), s.end(), text::is_alpha);
    set(38, (first_alpha != s.end() && text::is_upper(*first_alpha)) ? 1 : 0);
    return f;
}

FeatureVector extract_all(const Tweet& tweet, const Lexicons& lexicons) {
    FeatureVector fv;
    const auto ctx = extract_context_features(tweet);
    const auto content = extract_content_features(tweet, lexicons);
    std::copy(ctx.begin(), ctx.end(), fv.values.begin());
    std::copy(content.begin(), content.end(), fv.values.begin() + kContextFeatures);
    return fv;
}

void write_feature_csv(const std::vector<FeatureRow>& rows, const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw PathError("cannot write " + path.string());
    out << "id";
    for (std::size_t i = 0; i < kFeatureCount; ++i) out << ',' << feature_column(i);
    out << ",label\n";
    for (const auto& row : rows) {
        if (row.id.find_first_of(",\"\r\n") != std::string::npos)
            throw ValidationError("id not representable in CSV: " + row.id);
        out << row.id;
        for (const auto v : row.features.values) out << ',' << v;
        out << ',' << to_string(row.label) << '\n';
    }
    if (!out) throw PathError("write failed: " + path.string());
}

std::vector<FeatureRow> read_feature_csv(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PathError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path.string() + ": empty feature file");
    std::string expected = "id";
    for (std::size_t i = 0; i < kFeatureCount; ++i) expected += "," + feature_column(i);
    expected += ",label";
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != expected) throw ParseError(path.string() + ": unexpected header");

    std::vector<FeatureRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        const std::string where = path.string() + ":" + std::to_string(lineno);
        if (cells.size() != kFeatureCount + 2) throw ParseError(where + ": expected 41 columns");
        FeatureRow row;
        row.id = cells.front();
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            std::size_t used = 0;
            try {
                row.features.values[i] = std::stoll(cells[i + 1], &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != cells[i + 1].size())
                throw ParseError(where + ": bad integer \"" + cells[i + 1] + "\"");
        }
        row.label = parse_label(cells.back());
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace rumour
