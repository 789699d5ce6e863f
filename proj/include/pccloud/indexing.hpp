#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "pccloud/corpus.hpp"
#include "pccloud/text.hpp"

namespace pccloud::indexing {

enum class Provider { Dblp, SemanticScholar };
enum class FetchMode { Online, Offline };

std::string_view toString(Provider p);

struct HttpResponse {
    int status = 0;
    std::string body;
};

/// Minimal GET transport. Implementations throw Error(Network) when no
/// response could be obtained at all.
class HttpGateway {
public:
    virtual ~HttpGateway() = default;
    virtual HttpResponse get(const std::string& url) = 0;
};

/// HTTPS transport backed by cpp-httplib.
std::shared_ptr<HttpGateway> makeHttpsGateway(std::chrono::seconds timeout = std::chrono::seconds(30));

struct FetchResult {
    std::vector<text::RawDocument> documents;
    Provider provider = Provider::Dblp;
    bool fromCache = false;
    std::chrono::system_clock::time_point retrievedAt;
};

struct ClientOptions {
    std::filesystem::path cacheDir;
    std::chrono::milliseconds minRequestInterval{1000};  // per provider
    std::chrono::milliseconds backoffBase{1000};
    double backoffFactor = 2.0;
    int maxAttempts = 4;
    std::function<void(std::chrono::milliseconds)> sleep;        // defaults to this_thread::sleep_for
    std::function<std::chrono::steady_clock::time_point()> now;  // defaults to steady_clock::now
};

/// Cache directory: $PCCLOUD_CACHE_DIR when set, otherwise fallback.
std::filesystem::path resolveCacheDir(const std::filesystem::path& fallback);

std::string dblpUrl(std::string_view query, int limit);
std::string semanticScholarUrl(std::string_view authorId, int limit);

/// Lowercase hex SHA-256 of the URL; the cache file stem.
std::string cacheKey(std::string_view url);

/// Payload parsers. Hits without a usable title are dropped and ids are made
/// unique, so every document satisfies the RawDocument invariants.
std::vector<text::RawDocument> parseDblp(std::string_view body);
std::vector<text::RawDocument> parseSemanticScholar(std::string_view body);

/// Fetches publication lists with an on-disk response cache. A cached
/// response is always preferred; offline mode never touches the gateway.
/// Safe for concurrent use.
class IndexingClient {
public:
    IndexingClient(std::shared_ptr<HttpGateway> gateway, ClientOptions options);

    FetchResult fetchDblp(std::string_view query, int limit, FetchMode mode);
    FetchResult fetchSemanticScholar(std::string_view authorId, int limit, FetchMode mode);

    /// Appends fetched publications from every provider in `order` the
    /// reviewer has an id for, deduplicated by lowercased title against what
    /// is already there.
    corpus::Reviewer hydrateReviewer(const corpus::Reviewer& reviewer, std::span<const Provider> order, int limit,
                                     FetchMode mode);

private:
    class RateLimiter {
    public:
        void acquire(const ClientOptions& options);

    private:
        std::mutex mutex_;
        bool used_ = false;
        std::chrono::steady_clock::time_point last_;
    };

    FetchResult fetch(Provider provider, const std::string& url, FetchMode mode);
    HttpResponse getWithRetry(Provider provider, const std::string& url);

    std::shared_ptr<HttpGateway> gateway_;
    ClientOptions options_;
    RateLimiter dblpLimiter_;
    RateLimiter semanticScholarLimiter_;
};

}  // namespace pccloud::indexing
