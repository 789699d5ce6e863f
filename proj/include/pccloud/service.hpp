#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "pccloud/analysis.hpp"
#include "pccloud/corpus.hpp"
#include "pccloud/layout.hpp"
#include "pccloud/text.hpp"

namespace httplib {
class Server;
}

namespace pccloud::service {

/// Which collection a cloud is drawn from: "submissions", "pc" or
/// "reviewer:<id>".
struct CloudScope {
    enum class Kind { Submissions, Pc, Reviewer };
    Kind kind = Kind::Submissions;
    std::string reviewerId;

    /// Throws Error(Parameter) for anything else.
    static CloudScope parse(std::string_view text);
};

/// Weights behind a cloud scope. Unknown reviewer -> Error(NotFound).
text::TermWeights scopeWeights(const corpus::Conference& conference, const CloudScope& scope,
                               const text::StopwordList& stopwords, double titleBoost);

/// Overrides accepted by both the cloud endpoint and `pccloud cloud`.
struct CloudOverrides {
    std::optional<int> maxWords;
    std::optional<int> width;
    std::optional<int> height;
    std::optional<std::uint64_t> seed;
};

/// Applies overrides and validates the result (Error(Parameter) on failure).
layout::CloudConfig applyOverrides(layout::CloudConfig base, const CloudOverrides& overrides);

struct ServiceConfig {
    std::filesystem::path corpusDir;
    layout::CloudConfig cloudDefaults;
    analysis::AnalysisOptions analysis;
    std::optional<std::filesystem::path> stopwordPath;  // bundled list when unset
    std::string corsOrigin = "*";
};

/// HTTP facade over one corpus directory. Reads run concurrently against an
/// immutable snapshot; mutations are serialized, persisted, then published.
class Service {
public:
    /// Loads and validates the corpus; throws like corpus::loadCorpus.
    explicit Service(ServiceConfig config);
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// False when the address cannot be bound (e.g. port in use).
    bool bind(const std::string& host, int port);
    /// Binds an ephemeral port and returns it, or -1.
    int bindToAnyPort(const std::string& host);
    /// Serves until stop(); returns false if the accept loop failed.
    bool run();
    void stop();
    void waitUntilReady() const;

    std::shared_ptr<const corpus::Conference> snapshot() const;

private:
    void registerRoutes();
    void publish(std::shared_ptr<const corpus::Conference> next);

    ServiceConfig config_;
    text::StopwordList stopwords_;
    std::unique_ptr<httplib::Server> server_;

    mutable std::mutex snapshotMutex_;
    std::shared_ptr<const corpus::Conference> conference_;
    std::mutex writerMutex_;
};

}  // namespace pccloud::service
