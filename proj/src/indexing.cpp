#include "pccloud/indexing.hpp"

#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>
#include <openssl/evp.h>

#include "pccloud/error.hpp"

namespace pccloud::indexing {

using nlohmann::json;

namespace {

std::string percentEncode(std::string_view s)
{
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += kHex[c >> 4];
            out += kHex[c & 0xF];
        }
    }
    return out;
}

std::string trimmed(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos)
        return {};
    return s.substr(first, s.find_last_not_of(" \t\r\n") - first + 1);
}

std::string formatTimestamp(std::chrono::system_clock::time_point tp)
{
    const std::time_t t = std::chrono::system_clock::to_time_t(tp);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

std::chrono::system_clock::time_point parseTimestamp(const std::string& s)
{
    std::tm tm{};
    std::istringstream in(s);
    in >> std::get_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    if (in.fail())
        return {};
    return std::chrono::system_clock::from_time_t(timegm(&tm));
}

// Keeps ids unique within one result list.
class IdAllocator {
public:
    std::string claim(std::string id)
    {
        if (used_.insert(id).second)
            return id;
        for (int n = 2;; ++n) {
            auto candidate = id + "#" + std::to_string(n);
            if (used_.insert(candidate).second)
                return candidate;
        }
    }

private:
    std::set<std::string> used_;
};

json parsePayload(std::string_view body, std::string_view provider)
{
    try {
        return json::parse(body);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Parse, std::string(provider) + ": malformed payload: " + e.what());
    }
}

}  // namespace

std::string_view toString(Provider p)
{
    return p == Provider::Dblp ? "dblp" : "semanticScholar";
}

std::filesystem::path resolveCacheDir(const std::filesystem::path& fallback)
{
    if (const char* env = std::getenv("PCCLOUD_CACHE_DIR"); env && *env)
        return env;
    return fallback;
}

std::string dblpUrl(std::string_view query, int limit)
{
    return "https://dblp.org/search/publ/api?q=" + percentEncode(query) + "&format=json&h=" + std::to_string(limit);
}

std::string semanticScholarUrl(std::string_view authorId, int limit)
{
    return "https://api.semanticscholar.org/graph/v1/author/" + percentEncode(authorId)
           + "/papers?fields=title,abstract&limit=" + std::to_string(limit);
}

std::string cacheKey(std::string_view url)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(url.data(), url.size(), digest, &length, EVP_sha256(), nullptr) != 1)
        throw Error(ErrorKind::Io, "sha256 failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string hex;
    for (unsigned int i = 0; i < length; ++i) {
        hex += kHex[digest[i] >> 4];
        hex += kHex[digest[i] & 0xF];
    }
    return hex;
}

std::vector<text::RawDocument> parseDblp(std::string_view body)
{
    const auto j = parsePayload(body, "dblp");
    if (!j.is_object() || !j.contains("result") || !j["result"].is_object() || !j["result"].contains("hits")
        || !j["result"]["hits"].is_object())
        throw Error(ErrorKind::Parse, "dblp: payload lacks result.hits");

    const auto& hits = j["result"]["hits"];
    std::vector<text::RawDocument> docs;
    if (!hits.contains("hit"))
        return docs;
    json list = hits["hit"];
    if (list.is_object())
        list = json::array({list});
    if (!list.is_array())
        throw Error(ErrorKind::Parse, "dblp: result.hits.hit is not an array");

    IdAllocator ids;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const auto& hit = list[i];
        if (!hit.is_object() || !hit.contains("info") || !hit["info"].is_object())
            continue;
        const auto& info = hit["info"];
        if (!info.contains("title") || !info["title"].is_string())
            continue;
        auto title = trimmed(info["title"].get<std::string>());
        if (title.empty())
            continue;
        std::string key;
        if (info.contains("key") && info["key"].is_string())
            key = info["key"].get<std::string>();
        else if (hit.contains("@id") && hit["@id"].is_string())
            key = hit["@id"].get<std::string>();
        if (key.empty())
            key = std::to_string(i);
        docs.push_back({ids.claim("dblp:" + key), std::move(title), "", text::DocumentSource::Publication});
    }
    return docs;
}

std::vector<text::RawDocument> parseSemanticScholar(std::string_view body)
{
    const auto j = parsePayload(body, "semanticScholar");
    if (!j.is_object() || !j.contains("data") || !j["data"].is_array())
        throw Error(ErrorKind::Parse, "semanticScholar: payload lacks a data array");

    std::vector<text::RawDocument> docs;
    IdAllocator ids;
    const auto& data = j["data"];
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& paper = data[i];
        if (!paper.is_object() || !paper.contains("title") || !paper["title"].is_string())
            continue;
        auto title = trimmed(paper["title"].get<std::string>());
        if (title.empty())
            continue;
        std::string abstract;
        if (paper.contains("abstract") && paper["abstract"].is_string())
            abstract = paper["abstract"].get<std::string>();
        std::string key;
        if (paper.contains("paperId") && paper["paperId"].is_string())
            key = paper["paperId"].get<std::string>();
        if (key.empty())
            key = std::to_string(i);
        docs.push_back({ids.claim("s2:" + key), std::move(title), std::move(abstract),
                        text::DocumentSource::Publication});
    }
    return docs;
}

IndexingClient::IndexingClient(std::shared_ptr<HttpGateway> gateway, ClientOptions options)
    : gateway_(std::move(gateway)), options_(std::move(options))
{
    if (!options_.sleep)
        options_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
    if (!options_.now)
        options_.now = [] { return std::chrono::steady_clock::now(); };
}

void IndexingClient::RateLimiter::acquire(const ClientOptions& options)
{
    std::lock_guard lock(mutex_);
    if (used_) {
        const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(options.now() - last_);
        if (elapsed < options.minRequestInterval)
            options.sleep(options.minRequestInterval - elapsed);
    }
    used_ = true;
    last_ = options.now();
}

HttpResponse IndexingClient::getWithRetry(Provider provider, const std::string& url)
{
    if (!gateway_)
        throw Error(ErrorKind::Network, std::string(toString(provider)) + ": no HTTP transport configured");
    auto& limiter = provider == Provider::Dblp ? dblpLimiter_ : semanticScholarLimiter_;

    for (int attempt = 1;; ++attempt) {
        limiter.acquire(options_);
        auto response = gateway_->get(url);
        if (response.status != 429)
            return response;
        if (attempt >= options_.maxAttempts)
            throw Error(ErrorKind::RateLimited,
                        std::string(toString(provider)) + ": still rate limited after " + std::to_string(attempt)
                            + " attempts",
                        429);
        const double scale = std::pow(options_.backoffFactor, attempt - 1);
        options_.sleep(std::chrono::milliseconds(
            static_cast<std::chrono::milliseconds::rep>(std::llround(options_.backoffBase.count() * scale))));
    }
}

FetchResult IndexingClient::fetch(Provider provider, const std::string& url, FetchMode mode)
{
    auto parse = [provider](std::string_view body) {
        return provider == Provider::Dblp ? parseDblp(body) : parseSemanticScholar(body);
    };
    const auto cachePath = options_.cacheDir / (cacheKey(url) + ".json");

    std::error_code ec;
    if (std::filesystem::exists(cachePath, ec)) {
        std::ifstream in(cachePath, std::ios::binary);
        json entry;
        try {
            entry = json::parse(in);
        } catch (const json::parse_error& e) {
            throw Error(ErrorKind::Parse, "corrupt cache entry " + cachePath.string() + ": " + e.what());
        }
        if (!entry.is_object() || !entry.contains("body") || !entry["body"].is_string())
            throw Error(ErrorKind::Parse, "corrupt cache entry " + cachePath.string());
        FetchResult result;
        result.documents = parse(entry["body"].get<std::string>());
        result.provider = provider;
        result.fromCache = true;
        result.retrievedAt = parseTimestamp(entry.value("retrievedAt", ""));
        return result;
    }
    if (mode == FetchMode::Offline)
        throw Error(ErrorKind::CacheMiss, std::string(toString(provider)) + ": offline and no cached response for " + url);

    const auto response = getWithRetry(provider, url);
    if (response.status == 404 && provider == Provider::SemanticScholar)
        throw Error(ErrorKind::NotFound, "semanticScholar: unknown author (" + url + ")", 404);
    if (response.status != 200)
        throw Error(ErrorKind::Provider,
                    std::string(toString(provider)) + ": HTTP " + std::to_string(response.status) + " for " + url,
                    response.status);

    FetchResult result;
    result.documents = parse(response.body);
    result.provider = provider;
    result.fromCache = false;
    result.retrievedAt = std::chrono::system_clock::now();

    // Only payloads that parsed are cached.
    std::filesystem::create_directories(options_.cacheDir, ec);
    const json entry = {{"url", url}, {"provider", toString(provider)},
                        {"retrievedAt", formatTimestamp(result.retrievedAt)}, {"status", response.status},
                        {"body", response.body}};
    corpus::writeFileAtomically(cachePath, entry.dump(2) + "\n");
    return result;
}

FetchResult IndexingClient::fetchDblp(std::string_view query, int limit, FetchMode mode)
{
    if (query.empty())
        throw Error(ErrorKind::Parameter, "dblp query must be nonempty");
    if (limit < 1 || limit > 1000)
        throw Error(ErrorKind::Parameter, "dblp limit must be in [1, 1000]");
    return fetch(Provider::Dblp, dblpUrl(query, limit), mode);
}

FetchResult IndexingClient::fetchSemanticScholar(std::string_view authorId, int limit, FetchMode mode)
{
    if (authorId.empty())
        throw Error(ErrorKind::Parameter, "semanticScholar author id must be nonempty");
    if (limit < 1 || limit > 1000)
        throw Error(ErrorKind::Parameter, "semanticScholar limit must be in [1, 1000]");
    return fetch(Provider::SemanticScholar, semanticScholarUrl(authorId, limit), mode);
}

corpus::Reviewer IndexingClient::hydrateReviewer(const corpus::Reviewer& reviewer, std::span<const Provider> order,
                                                 int limit, FetchMode mode)
{
    const auto& ids = reviewer.externalIds;
    if (ids.empty())
        throw Error(ErrorKind::Configuration, "reviewer '" + reviewer.id + "' has no external ids");

    corpus::Reviewer out = reviewer;
    std::set<std::string> titles;
    std::set<std::string> pubIds;
    for (const auto& d : out.publications) {
        titles.insert(text::toLower(d.title));
        pubIds.insert(d.id);
    }

    bool fetchedAny = false;
    for (const auto provider : order) {
        FetchResult result;
        try {
            if (provider == Provider::Dblp && ids.dblpQuery)
                result = fetchDblp(*ids.dblpQuery, limit, mode);
            else if (provider == Provider::SemanticScholar && ids.semanticScholarAuthorId)
                result = fetchSemanticScholar(*ids.semanticScholarAuthorId, limit, mode);
            else
                continue;
        } catch (const Error& e) {
            throw Error(e.kind(), "reviewer '" + reviewer.id + "': " + e.what(), e.httpStatus());
        }
        fetchedAny = true;
        for (auto& doc : result.documents) {
            if (!titles.insert(text::toLower(doc.title)).second)
                continue;
            auto id = doc.id;
            for (int n = 2; !pubIds.insert(id).second; ++n)
                id = doc.id + "#" + std::to_string(n);
            doc.id = std::move(id);
            out.publications.push_back(std::move(doc));
        }
    }
    if (!fetchedAny)
        throw Error(ErrorKind::Configuration,
                    "reviewer '" + reviewer.id + "' has no external id for the requested provider(s)");
    return out;
}

}  // namespace pccloud::indexing
