#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rumour {

inline constexpr int kDefaultEmbeddingDim = 768;

struct EmbeddingVector {
    std::string tweet_id;
    std::vector<float> values;

    bool operator==(const EmbeddingVector&) const = default;
};

/// Insertion-ordered id -> vector map with a fixed dimension.
class EmbeddingStore {
public:
    EmbeddingStore() = default;
    EmbeddingStore(int dim, std::string model_tag);

    int dim() const { return dim_; }
    const std::string& model_tag() const { return model_tag_; }
    const std::vector<EmbeddingVector>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    /// Throws DimensionError on a length mismatch, ValidationError on a
    /// duplicate id or a non-finite value.
    void add(EmbeddingVector v);
    const EmbeddingVector* find(const std::string& id) const;

    bool operator==(const EmbeddingStore& other) const {
        return dim_ == other.dim_ && model_tag_ == other.model_tag_ && entries_ == other.entries_;
    }

private:
    int dim_ = kDefaultEmbeddingDim;
    std::string model_tag_;
    std::vector<EmbeddingVector> entries_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Decimal with 9 significant digits; parses back to the identical float.
std::string format_float(float v);
/// Same rule applied to a double after rounding it to float.
std::string format_real(double v);

/// Store file: header line {"dim":D,"model_tag":"..."} then {"id":"...","v":[...]} per entry.
void save_store(const EmbeddingStore& store, const std::filesystem::path& path);
EmbeddingStore load_store(const std::filesystem::path& path);

/// NFC, control characters dropped, whitespace runs collapsed to one space, trimmed.
std::string normalize_text(std::string_view text);

struct ProviderConfig {
    enum class Mode { precomputed, remote };

    Mode mode = Mode::precomputed;
    std::optional<std::filesystem::path> store_path;
    std::optional<std::string> endpoint;
    int batch_size = 32;
    int timeout_ms = 30000;
    int max_retries = 2;
    int dim = kDefaultEmbeddingDim;

    /// Throws UsageError when the mode's required field is missing or a bound is violated.
    void validate() const;
};

struct EmbedItem {
    std::string id;
    std::string text;
};

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;

    /// One vector per item, in item order.
    virtual std::vector<std::vector<float>> embed(std::span<const EmbedItem> items) = 0;
    virtual int dim() const = 0;
    virtual std::string model_tag() = 0;
};

/// Serves vectors from a store by tweet id.
class PrecomputedProvider final : public EmbeddingProvider {
public:
    explicit PrecomputedProvider(EmbeddingStore store) : store_(std::move(store)) {}

    std::vector<std::vector<float>> embed(std::span<const EmbedItem> items) override;
    int dim() const override { return store_.dim(); }
    std::string model_tag() override { return store_.model_tag(); }

private:
    EmbeddingStore store_;
};

/// HTTP client for the embedding sidecar:
///   POST <endpoint>/v1/embed {"texts":[...]} -> {"dim":D,"vectors":[[...],...]}
///   GET  <endpoint>/healthz, GET <endpoint>/v1/info -> {"model":"...","dim":D}
/// Texts are normalised before sending; repeated texts within a session are
/// answered from an in-memory cache so they map to identical vectors.
class RemoteProvider final : public EmbeddingProvider {
public:
    RemoteProvider(std::string endpoint, int dim = kDefaultEmbeddingDim, int batch_size = 32, int timeout_ms = 30000,
                   int max_retries = 2);
    ~RemoteProvider() override;

    std::vector<std::vector<float>> embed(std::span<const EmbedItem> items) override;
    int dim() const override { return dim_; }
    std::string model_tag() override;

    bool healthy();
    /// Number of HTTP requests issued so far, including retries.
    std::uint64_t request_count() const { return requests_; }

private:
    std::string get(const std::string& path);
    std::vector<std::vector<float>> post_chunk(const std::vector<std::string>& texts);

    struct Target;
    std::unique_ptr<Target> target_;
    int dim_;
    int batch_size_;
    int timeout_ms_;
    int max_retries_;
    std::uint64_t requests_ = 0;
    std::optional<std::string> model_;
    std::unordered_map<std::string, std::vector<float>> session_cache_;
};

/// Answers ids present in `cache` locally and forwards the rest to `fallback`.
class CachedProvider final : public EmbeddingProvider {
public:
    CachedProvider(const EmbeddingStore& cache, EmbeddingProvider& fallback) : cache_(cache), fallback_(fallback) {}

    std::vector<std::vector<float>> embed(std::span<const EmbedItem> items) override;
    int dim() const override { return cache_.dim(); }
    std::string model_tag() override { return cache_.model_tag(); }

private:
    const EmbeddingStore& cache_;
    EmbeddingProvider& fallback_;
};

std::unique_ptr<EmbeddingProvider> make_provider(const ProviderConfig& config);

/// Embeds every item through `provider`, checking order, length and finiteness.
/// `expected_dim` overrides the provider's own dimension when given.
std::vector<EmbeddingVector> embed_batch(std::span<const EmbedItem> items, EmbeddingProvider& provider,
                                         std::optional<int> expected_dim = std::nullopt);
std::vector<EmbeddingVector> embed_batch(std::span<const EmbedItem> items, const ProviderConfig& config);

}  // namespace rumour
