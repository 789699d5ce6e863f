#include "pccloud/service.hpp"

#include <charconv>

#include <httplib.h>

#include "pccloud/error.hpp"

namespace pccloud::service {

using nlohmann::json;

namespace {

template <typename T>
std::optional<T> parseNumber(std::string_view s)
{
    T value{};
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, value);
    if (s.empty() || ec != std::errc() || ptr != end)
        return std::nullopt;
    return value;
}

template <typename T>
std::optional<T> queryNumber(const httplib::Request& req, const char* key)
{
    if (!req.has_param(key))
        return std::nullopt;
    const auto raw = req.get_param_value(key);
    auto value = parseNumber<T>(raw);
    if (!value)
        throw Error(ErrorKind::Parameter, std::string("query parameter '") + key + "' is not a valid number: '" + raw + "'");
    return value;
}

int statusFor(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::Parameter:
    case ErrorKind::Parse: return 400;
    case ErrorKind::NotFound: return 404;
    case ErrorKind::Validation: return 422;
    default: return 500;
    }
}

void sendError(httplib::Response& res, int status, std::string_view code, const std::string& detail)
{
    res.status = status;
    res.set_content(json{{"error", code}, {"detail", detail}}.dump(), "application/json");
}

void sendError(httplib::Response& res, const Error& e)
{
    sendError(res, statusFor(e.kind()), toString(e.kind()), e.what());
}

void sendJson(httplib::Response& res, const json& body)
{
    res.status = 200;
    res.set_content(body.dump(), "application/json");
}

// Runs a handler body, mapping library errors onto {error, detail} replies.
template <typename Fn>
httplib::Server::Handler guarded(Fn fn)
{
    return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
        try {
            fn(req, res);
        } catch (const Error& e) {
            sendError(res, e);
        } catch (const std::exception& e) {
            sendError(res, 500, "internal", e.what());
        }
    };
}

}  // namespace

CloudScope CloudScope::parse(std::string_view text)
{
    if (text == "submissions")
        return {Kind::Submissions, {}};
    if (text == "pc")
        return {Kind::Pc, {}};
    constexpr std::string_view prefix = "reviewer:";
    if (text.starts_with(prefix) && text.size() > prefix.size())
        return {Kind::Reviewer, std::string(text.substr(prefix.size()))};
    throw Error(ErrorKind::Parameter, "scope must be submissions, pc or reviewer:<id>, got '" + std::string(text) + "'");
}

text::TermWeights scopeWeights(const corpus::Conference& conference, const CloudScope& scope,
                               const text::StopwordList& stopwords, double titleBoost)
{
    switch (scope.kind) {
    case CloudScope::Kind::Submissions: return analysis::submissionsWeights(conference, stopwords, titleBoost);
    case CloudScope::Kind::Pc: return analysis::pcWeights(conference, stopwords, titleBoost);
    case CloudScope::Kind::Reviewer: break;
    }
    const auto* reviewer = conference.findReviewer(scope.reviewerId);
    if (!reviewer)
        throw Error(ErrorKind::NotFound, "unknown reviewer '" + scope.reviewerId + "'");
    return analysis::reviewerWeights(*reviewer, stopwords, titleBoost);
}

layout::CloudConfig applyOverrides(layout::CloudConfig base, const CloudOverrides& o)
{
    if (o.maxWords)
        base.maxWords = *o.maxWords;
    if (o.width)
        base.width = *o.width;
    if (o.height)
        base.height = *o.height;
    if (o.seed)
        base.seed = *o.seed;
    layout::validate(base);
    return base;
}

Service::Service(ServiceConfig config)
    : config_(std::move(config)),
      stopwords_(config_.stopwordPath ? text::StopwordList::load(*config_.stopwordPath) : text::StopwordList::bundled()),
      server_(std::make_unique<httplib::Server>()),
      conference_(std::make_shared<const corpus::Conference>(corpus::loadCorpus(config_.corpusDir)))
{
    layout::validate(config_.cloudDefaults);
    // httplib's default also sets SO_REUSEPORT, which lets a second server
    // share a port that is already in use.
    server_->set_socket_options([](int sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    registerRoutes();
}

Service::~Service()
{
    stop();
}

std::shared_ptr<const corpus::Conference> Service::snapshot() const
{
    std::lock_guard lock(snapshotMutex_);
    return conference_;
}

void Service::publish(std::shared_ptr<const corpus::Conference> next)
{
    std::lock_guard lock(snapshotMutex_);
    conference_ = std::move(next);
}

bool Service::bind(const std::string& host, int port)
{
    return server_->bind_to_port(host, port);
}

int Service::bindToAnyPort(const std::string& host)
{
    return server_->bind_to_any_port(host);
}

bool Service::run()
{
    return server_->listen_after_bind();
}

void Service::stop()
{
    if (server_)
        server_->stop();
}

void Service::waitUntilReady() const
{
    server_->wait_until_ready();
}

void Service::registerRoutes()
{
    auto& srv = *server_;

    srv.set_post_routing_handler([this](const httplib::Request&, httplib::Response& res) {
        if (!config_.corsOrigin.empty())
            res.set_header("Access-Control-Allow-Origin", config_.corsOrigin);
    });
    srv.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
        res.status = 204;
        res.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
    });

    srv.Get("/api/papers", guarded([this](const httplib::Request&, httplib::Response& res) {
        auto body = json::array();
        for (const auto& p : snapshot()->papers)
            body.push_back(corpus::toJson(p));
        sendJson(res, body);
    }));

    srv.Get("/api/reviewers", guarded([this](const httplib::Request&, httplib::Response& res) {
        auto body = json::array();
        for (const auto& r : snapshot()->reviewers)
            body.push_back(corpus::toJson(r));
        sendJson(res, body);
    }));

    srv.Get("/api/assignments", guarded([this](const httplib::Request&, httplib::Response& res) {
        sendJson(res, corpus::toJson(snapshot()->assignments));
    }));

    auto serveCloud = [this](const CloudScope& scope, const httplib::Request& req, httplib::Response& res) {
        CloudOverrides o;
        o.maxWords = queryNumber<int>(req, "maxWords");
        o.width = queryNumber<int>(req, "width");
        o.height = queryNumber<int>(req, "height");
        o.seed = queryNumber<std::uint64_t>(req, "seed");
        const auto cfg = applyOverrides(config_.cloudDefaults, o);
        const auto conference = snapshot();
        const auto weights = scopeWeights(*conference, scope, stopwords_, config_.analysis.titleBoost);
        res.status = 200;
        res.set_content(layout::renderSvg(layout::placeWords(weights, cfg)), "image/svg+xml");
    };

    srv.Get("/api/clouds/submissions.svg", guarded([serveCloud](const httplib::Request& req, httplib::Response& res) {
        serveCloud({CloudScope::Kind::Submissions, {}}, req, res);
    }));
    srv.Get("/api/clouds/pc.svg", guarded([serveCloud](const httplib::Request& req, httplib::Response& res) {
        serveCloud({CloudScope::Kind::Pc, {}}, req, res);
    }));
    srv.Get(R"(/api/clouds/reviewer/(.+)\.svg)",
            guarded([serveCloud](const httplib::Request& req, httplib::Response& res) {
                serveCloud({CloudScope::Kind::Reviewer, req.matches[1].str()}, req, res);
            }));

    srv.Get("/api/gap-report", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const double minShare = queryNumber<double>(req, "minShare").value_or(config_.analysis.minShare);
        const double ratio = queryNumber<double>(req, "ratio").value_or(config_.analysis.ratio);
        const double boost = config_.analysis.titleBoost;
        const auto conference = snapshot();
        const auto report =
            analysis::coverageGapReport(analysis::normalize(analysis::submissionsWeights(*conference, stopwords_, boost)),
                                        analysis::normalize(analysis::pcWeights(*conference, stopwords_, boost)),
                                        minShare, ratio);
        sendJson(res, analysis::toJson(report));
    }));

    srv.Get(R"(/api/papers/([^/]+)/suggestions)", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const auto k = queryNumber<int>(req, "k").value_or(10);
        if (k < 0)
            throw Error(ErrorKind::Parameter, "k must be nonnegative");
        const auto paperId = req.matches[1].str();
        const auto conference = snapshot();
        const auto ranked = analysis::suggestReviewers(*conference, paperId, static_cast<std::size_t>(k), stopwords_,
                                                       config_.analysis.titleBoost);
        sendJson(res, analysis::suggestionsJson(*conference, paperId, ranked));
    }));

    srv.Post("/api/assignments", guarded([this](const httplib::Request& req, httplib::Response& res) {
        json body;
        try {
            body = json::parse(req.body);
        } catch (const json::parse_error& e) {
            throw Error(ErrorKind::Parse, std::string("request body is not JSON: ") + e.what());
        }
        corpus::Assignment assignment;
        try {
            assignment = corpus::assignmentFromJson(body);
        } catch (const Error& e) {
            // Shape problems are client errors; dangling references are 422.
            throw Error(ErrorKind::Parameter, e.what());
        }

        std::lock_guard writer(writerMutex_);
        const auto current = snapshot();
        auto next = std::make_shared<const corpus::Conference>(corpus::upsertAssignment(*current, assignment));
        try {
            corpus::saveAssignments(*next, config_.corpusDir);
        } catch (const Error& e) {
            sendError(res, 500, "persistence", e.what());
            return;
        }
        publish(next);
        sendJson(res, corpus::toJson(assignment));
    }));

    srv.Delete(R"(/api/assignments/([^/]+)/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const auto paperId = req.matches[1].str();
        const auto reviewerId = req.matches[2].str();

        std::lock_guard writer(writerMutex_);
        const auto current = snapshot();
        auto removed = corpus::removeAssignment(*current, paperId, reviewerId);
        if (!removed.found) {
            sendError(res, 404, "notFound", "no assignment ('" + paperId + "', '" + reviewerId + "')");
            return;
        }
        auto next = std::make_shared<const corpus::Conference>(std::move(removed.conference));
        try {
            corpus::saveAssignments(*next, config_.corpusDir);
        } catch (const Error& e) {
            sendError(res, 500, "persistence", e.what());
            return;
        }
        publish(next);
        sendJson(res, json{{"paperId", paperId}, {"reviewerId", reviewerId}, {"removed", true}});
    }));
}

}  // namespace pccloud::service
