#include "rumour/embedding.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <httplib.h>
#include <json.hpp>

#include "rumour/error.hpp"
#include "rumour/unicode.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace rumour {

EmbeddingStore::EmbeddingStore(int dim, std::string model_tag) : dim_(dim), model_tag_(std::move(model_tag)) {
    if (dim < 1) throw ValidationError("embedding dim must be >= 1");
}

void EmbeddingStore::add(EmbeddingVector v) {
    if (static_cast<int>(v.values.size()) != dim_)
        throw DimensionError("ragged vector for id " + v.tweet_id + ": length " + std::to_string(v.values.size()) +
                             ", store dim " + std::to_string(dim_));
    for (const float x : v.values)
        if (!std::isfinite(x)) throw ValidationError("non-finite value in vector for id " + v.tweet_id);
    if (!index_.emplace(v.tweet_id, entries_.size()).second)
        throw ValidationError("duplicate id in embedding store: " + v.tweet_id);
    entries_.push_back(std::move(v));
}

const EmbeddingVector* EmbeddingStore::find(const std::string& id) const {
    const auto it = index_.find(id);
    return it == index_.end() ? nullptr : &entries_[it->second];
}

std::string format_float(float v) {
    if (v == 0.0f) return std::signbit(v) ? "-0.0" : "0";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(v));
    return buf;
}

std::string format_real(double v) { return format_float(static_cast<float>(v)); }

void save_store(const EmbeddingStore& store, const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw PathError("cannot write " + path.string());
    nlohmann::ordered_json header;
    header["dim"] = store.dim();
    header["model_tag"] = store.model_tag();
    out << header.dump() << '\n';
    for (const auto& e : store.entries()) {
        out << "{\"id\":" << json(e.tweet_id).dump() << ",\"v\":[";
        for (std::size_t i = 0; i < e.values.size(); ++i) {
            if (i) out << ',';
            out << format_float(e.values[i]);
        }
        out << "]}\n";
    }
    if (!out) throw PathError("write failed: " + path.string());
}

EmbeddingStore load_store(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PathError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path.string() + ": missing store header");

    json header;
    try {
        header = json::parse(line);
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": bad store header: " + e.what());
    }
    if (!header.is_object() || !header.contains("dim") || !header["dim"].is_number_integer() ||
        !header.contains("model_tag") || !header["model_tag"].is_string() || header["dim"].get<int>() < 1)
        throw ParseError(path.string() + ": header mismatch, expected {\"dim\":<int>,\"model_tag\":<string>}");

    EmbeddingStore store(header["dim"].get<int>(), header["model_tag"].get<std::string>());
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(lineno);
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(where + ": " + e.what());
        }
        if (!j.is_object() || !j.contains("id") || !j["id"].is_string() || !j.contains("v") || !j["v"].is_array())
            throw ParseError(where + ": expected {\"id\":...,\"v\":[...]}");
        EmbeddingVector v;
        v.tweet_id = j["id"].get<std::string>();
        v.values.reserve(j["v"].size());
        for (const auto& x : j["v"]) {
            if (!x.is_number()) throw ParseError(where + ": non-numeric vector entry");
            // 9 significant digits sit far inside half a float ulp, so the
            // decimal -> double -> float path lands on the original float.
            v.values.push_back(static_cast<float>(x.get<double>()));
        }
        try {
            store.add(std::move(v));
        } catch (const DimensionError& e) {
            throw DimensionError(where + ": " + e.what());
        }
    }
    return store;
}

std::string normalize_text(std::string_view input) {
    const std::u32string s = text::decode(text::nfc(input));
    std::u32string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (const char32_t c : s) {
        if (text::is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (text::is_control(c)) continue;
        if (pending_space) out.push_back(U' ');
        pending_space = false;
        out.push_back(c);
    }
    return text::encode(out);
}

void ProviderConfig::validate() const {
    if (mode == Mode::precomputed && !store_path) throw UsageError("precomputed provider requires a store path");
    if (mode == Mode::remote && (!endpoint || endpoint->empty()))
        throw UsageError("remote provider requires an endpoint");
    if (batch_size < 1) throw UsageError("batch_size must be >= 1");
    if (timeout_ms < 1) throw UsageError("timeout_ms must be >= 1");
    if (max_retries < 0) throw UsageError("max_retries must be >= 0");
    if (dim < 1) throw UsageError("dim must be >= 1");
}

std::vector<std::vector<float>> PrecomputedProvider::embed(std::span<const EmbedItem> items) {
    std::vector<std::vector<float>> out;
    out.reserve(items.size());
    for (const auto& item : items) {
        const auto* v = store_.find(item.id);
        if (!v) throw LookupError("id " + item.id + " not in embedding store");
        out.push_back(v->values);
    }
    return out;
}

struct RemoteProvider::Target {
    std::string scheme_host_port;
    std::string prefix;
    httplib::Client client;

    Target(std::string shp, std::string pfx) : scheme_host_port(std::move(shp)), prefix(std::move(pfx)), client(scheme_host_port) {}
};

namespace {

std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
    const auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos) throw UsageError("endpoint must start with http://: " + endpoint);
    const std::string scheme = endpoint.substr(0, scheme_end);
    if (scheme != "http") throw UsageError("only http:// endpoints are supported: " + endpoint);
    const auto path_start = endpoint.find('/', scheme_end + 3);
    std::string shp = endpoint.substr(0, path_start);
    std::string prefix = path_start == std::string::npos ? "" : endpoint.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {shp, prefix};
}

}  // namespace

RemoteProvider::RemoteProvider(std::string endpoint, int dim, int batch_size, int timeout_ms, int max_retries)
    : dim_(dim), batch_size_(batch_size), timeout_ms_(timeout_ms), max_retries_(max_retries) {
    auto [shp, prefix] = split_endpoint(endpoint);
    target_ = std::make_unique<Target>(std::move(shp), std::move(prefix));
    const auto sec = timeout_ms / 1000;
    const auto usec = (timeout_ms % 1000) * 1000;
    target_->client.set_connection_timeout(sec, usec);
    target_->client.set_read_timeout(sec, usec);
    target_->client.set_write_timeout(sec, usec);
}

RemoteProvider::~RemoteProvider() = default;

bool RemoteProvider::healthy() {
    ++requests_;
    const auto res = target_->client.Get(target_->prefix + "/healthz");
    return res && res->status == 200;
}

std::string RemoteProvider::get(const std::string& path) {
    for (int attempt = 0;; ++attempt) {
        ++requests_;
        const auto res = target_->client.Get(target_->prefix + path);
        if (res && res->status == 200) return res->body;
        const bool retryable = !res || res->status >= 500;
        if (!retryable || attempt >= max_retries_) {
            throw TransportError("GET " + target_->scheme_host_port + target_->prefix + path + " failed: " +
                                 (res ? "HTTP " + std::to_string(res->status) : httplib::to_string(res.error())));
        }
    }
}

std::string RemoteProvider::model_tag() {
    if (!model_) {
        json info;
        try {
            info = json::parse(get("/v1/info"));
        } catch (const json::exception& e) {
            throw ProtocolError(std::string("bad /v1/info response: ") + e.what());
        }
        if (!info.contains("model") || !info["model"].is_string() || !info.contains("dim") ||
            !info["dim"].is_number_integer())
            throw ProtocolError("/v1/info must return {\"model\":string,\"dim\":int}");
        if (info["dim"].get<int>() != dim_)
            throw ProtocolError("service dim " + std::to_string(info["dim"].get<int>()) + " != configured " +
                                std::to_string(dim_));
        model_ = info["model"].get<std::string>();
    }
    return *model_;
}

std::vector<std::vector<float>> RemoteProvider::post_chunk(const std::vector<std::string>& texts) {
    const std::string body = json{{"texts", texts}}.dump(-1, ' ', false, json::error_handler_t::replace);
    const std::string url = target_->prefix + "/v1/embed";
    for (int attempt = 0;; ++attempt) {
        ++requests_;
        const auto res = target_->client.Post(url, body, "application/json");
        if (res && res->status == 200) {
            json j;
            try {
                j = json::parse(res->body);
            } catch (const json::exception& e) {
                throw ProtocolError(std::string("bad /v1/embed response: ") + e.what());
            }
            if (!j.contains("vectors") || !j["vectors"].is_array())
                throw ProtocolError("/v1/embed response lacks a vectors array");
            if (j.contains("dim") && j["dim"].is_number_integer() && j["dim"].get<int>() != dim_)
                throw ProtocolError("service reported dim " + std::to_string(j["dim"].get<int>()) + ", expected " +
                                    std::to_string(dim_));
            if (j["vectors"].size() != texts.size())
                throw ProtocolError("/v1/embed returned " + std::to_string(j["vectors"].size()) + " vectors for " +
                                    std::to_string(texts.size()) + " texts");
            std::vector<std::vector<float>> out;
            out.reserve(texts.size());
            for (const auto& row : j["vectors"]) {
                if (!row.is_array()) throw ProtocolError("vector is not an array");
                std::vector<float> v;
                v.reserve(row.size());
                for (const auto& x : row) {
                    if (!x.is_number()) throw ProtocolError("non-numeric vector entry");
                    v.push_back(static_cast<float>(x.get<double>()));
                }
                out.push_back(std::move(v));
            }
            return out;
        }
        const bool retryable = !res || res->status >= 500;
        if (!retryable || attempt >= max_retries_) {
            throw TransportError("POST " + target_->scheme_host_port + url + " failed after " +
                                 std::to_string(attempt + 1) + " attempt(s): " +
                                 (res ? "HTTP " + std::to_string(res->status) : httplib::to_string(res.error())));
        }
    }
}

std::vector<std::vector<float>> RemoteProvider::embed(std::span<const EmbedItem> items) {
    std::vector<std::string> normalized;
    normalized.reserve(items.size());
    std::vector<std::string> pending;
    std::unordered_map<std::string, bool> queued;
    for (const auto& item : items) {
        normalized.push_back(normalize_text(item.text));
        const auto& t = normalized.back();
        if (!session_cache_.count(t) && queued.emplace(t, true).second) pending.push_back(t);
    }
    for (std::size_t start = 0; start < pending.size(); start += static_cast<std::size_t>(batch_size_)) {
        const auto end = std::min(pending.size(), start + static_cast<std::size_t>(batch_size_));
        const std::vector<std::string> chunk(pending.begin() + static_cast<std::ptrdiff_t>(start),
                                             pending.begin() + static_cast<std::ptrdiff_t>(end));
        auto vectors = post_chunk(chunk);
        for (std::size_t i = 0; i < chunk.size(); ++i) session_cache_[chunk[i]] = std::move(vectors[i]);
    }
    std::vector<std::vector<float>> out;
    out.reserve(items.size());
    for (const auto& t : normalized) out.push_back(session_cache_.at(t));
    return out;
}

std::vector<std::vector<float>> CachedProvider::embed(std::span<const EmbedItem> items) {
    std::vector<std::vector<float>> out(items.size());
    std::vector<EmbedItem> misses;
    std::vector<std::size_t> miss_pos;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (const auto* v = cache_.find(items[i].id)) {
            out[i] = v->values;
        } else {
            misses.push_back(items[i]);
            miss_pos.push_back(i);
        }
    }
    if (!misses.empty()) {
        auto fetched = fallback_.embed(misses);
        if (fetched.size() != misses.size()) throw ProtocolError("provider returned wrong number of vectors");
        for (std::size_t i = 0; i < misses.size(); ++i) out[miss_pos[i]] = std::move(fetched[i]);
    }
    return out;
}

std::unique_ptr<EmbeddingProvider> make_provider(const ProviderConfig& config) {
    config.validate();
    if (config.mode == ProviderConfig::Mode::precomputed) {
        auto store = load_store(*config.store_path);
        if (store.dim() != config.dim)
            throw DimensionError("store dim " + std::to_string(store.dim()) + " != configured " +
                                 std::to_string(config.dim));
        return std::make_unique<PrecomputedProvider>(std::move(store));
    }
    return std::make_unique<RemoteProvider>(*config.endpoint, config.dim, config.batch_size, config.timeout_ms,
                                            config.max_retries);
}

std::vector<EmbeddingVector> embed_batch(std::span<const EmbedItem> items, EmbeddingProvider& provider,
                                         std::optional<int> expected_dim) {
    if (items.empty()) return {};
    const int dim = expected_dim.value_or(provider.dim());
    auto vectors = provider.embed(items);
    if (vectors.size() != items.size())
        throw ProtocolError("provider returned " + std::to_string(vectors.size()) + " vectors for " +
                            std::to_string(items.size()) + " items");
    std::vector<EmbeddingVector> out;
    out.reserve(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (static_cast<int>(vectors[i].size()) != dim)
            throw ProtocolError("vector for id " + items[i].id + " has length " + std::to_string(vectors[i].size()) +
                                ", expected " + std::to_string(dim));
        for (const float x : vectors[i])
            if (!std::isfinite(x)) throw ProtocolError("non-finite value in vector for id " + items[i].id);
        out.push_back({items[i].id, std::move(vectors[i])});
    }
    return out;
}

std::vector<EmbeddingVector> embed_batch(std::span<const EmbedItem> items, const ProviderConfig& config) {
    auto provider = make_provider(config);
    return embed_batch(items, *provider, config.dim);
}

}  // namespace rumour
