#include "pccloud/cli.hpp"

#include <csignal>
#include <iostream>
#include <optional>
#include <thread>

#include <pthread.h>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "pccloud/analysis.hpp"
#include "pccloud/corpus.hpp"
#include "pccloud/indexing.hpp"
#include "pccloud/layout.hpp"
#include "pccloud/service.hpp"

namespace pccloud::cli {

namespace {

struct CommonOptions {
    std::string corpus = ".";
    std::string stopwords;
    double titleBoost = 1.0;

    text::StopwordList loadStopwords() const
    {
        return stopwords.empty() ? text::StopwordList::bundled() : text::StopwordList::load(stopwords);
    }
};

struct CloudFlags {
    std::optional<int> maxWords;
    std::optional<int> width;
    std::optional<int> height;
    std::optional<std::uint64_t> seed;

    service::CloudOverrides overrides() const { return {maxWords, width, height, seed}; }
};

void addCommon(CLI::App* cmd, CommonOptions& o)
{
    cmd->add_option("--corpus", o.corpus, "Corpus directory")->capture_default_str();
    cmd->add_option("--stopwords", o.stopwords, "Stopword file (default: bundled English list)");
    cmd->add_option("--title-boost", o.titleBoost, "Weight of a title occurrence")->capture_default_str();
}

void addCloudFlags(CLI::App* cmd, CloudFlags& f)
{
    cmd->add_option("--max-words", f.maxWords, "Maximum number of words in a cloud");
    cmd->add_option("--width", f.width, "Canvas width in px");
    cmd->add_option("--height", f.height, "Canvas height in px");
    cmd->add_option("--seed", f.seed, "Spiral start-angle seed (0 = none)");
}

void printWarnings(const std::vector<std::string>& warnings, std::ostream& err)
{
    for (const auto& w : warnings)
        err << "warning: " << w << '\n';
}

int runIngest(const CommonOptions& common, std::ostream& out, std::ostream& err)
{
    const auto loaded = corpus::loadCorpusWithWarnings(common.corpus);
    const auto& c = loaded.conference;
    out << "conference: " << c.name << '\n'
        << "topics: " << c.topics.size() << '\n'
        << "papers: " << c.papers.size() << '\n'
        << "reviewers: " << c.reviewers.size() << '\n'
        << "assignments: " << c.assignments.size() << '\n';
    printWarnings(loaded.warnings, err);
    return 0;
}

int runCloud(const CommonOptions& common, const std::string& scopeText, const std::string& outPath,
             const CloudFlags& flags, std::ostream& out, std::ostream& err)
{
    const auto scope = service::CloudScope::parse(scopeText);
    const auto cfg = service::applyOverrides(layout::CloudConfig{}, flags.overrides());
    const auto conference = corpus::loadCorpus(common.corpus);
    const auto weights = service::scopeWeights(conference, scope, common.loadStopwords(), common.titleBoost);
    const auto cloud = layout::placeWords(weights, cfg);
    corpus::writeFileAtomically(outPath, layout::renderSvg(cloud));

    if (cloud.placed.empty())
        err << "warning: cloud for scope '" << scopeText << "' is empty\n";
    if (!cloud.skipped.empty())
        err << "warning: " << cloud.skipped.size() << " word(s) did not fit on the canvas and were skipped\n";
    out << "wrote " << outPath << " (" << cloud.placed.size() << " words)\n";
    return 0;
}

int runGapReport(const CommonOptions& common, const std::string& format, double minShare, double ratio,
                 std::ostream& out)
{
    const auto conference = corpus::loadCorpus(common.corpus);
    const auto stopwords = common.loadStopwords();
    const auto report = analysis::coverageGapReport(
        analysis::normalize(analysis::submissionsWeights(conference, stopwords, common.titleBoost)),
        analysis::normalize(analysis::pcWeights(conference, stopwords, common.titleBoost)), minShare, ratio);

    if (format == "json") {
        out << analysis::toJson(report).dump(2) << '\n';
        return 0;
    }
    out << fmt::format("{:<24} {:>8} {:>8} {:>8}  {}\n", "term", "sub%", "pc%", "ratio", "flag");
    for (const auto& e : report)
        out << fmt::format("{:<24} {:>8.2f} {:>8.2f} {:>8.3f}  {}\n", e.term, 100.0 * e.subShare, 100.0 * e.pcShare,
                           e.ratio, e.flagged ? "GAP" : "");
    return 0;
}

int runSuggest(const CommonOptions& common, const std::string& paperId, int k, const std::string& format,
               std::ostream& out)
{
    if (k < 0)
        throw Error(ErrorKind::Parameter, "-k must be nonnegative");
    const auto conference = corpus::loadCorpus(common.corpus);
    const auto ranked = analysis::suggestReviewers(conference, paperId, static_cast<std::size_t>(k),
                                                   common.loadStopwords(), common.titleBoost);
    const auto body = analysis::suggestionsJson(conference, paperId, ranked);
    if (format == "json") {
        out << body.dump(2) << '\n';
        return 0;
    }
    out << fmt::format("{:>4}  {:<16} {:>8}  {}\n", "rank", "reviewer", "score", "assigned");
    int rank = 1;
    for (const auto& s : body)
        out << fmt::format("{:>4}  {:<16} {:>8.6f}  {}\n", rank++, s["reviewerId"].get<std::string>(),
                           s["score"].get<double>(), s["assigned"].get<bool>() ? "yes" : "");
    return 0;
}

std::vector<indexing::Provider> providersFor(const std::string& source)
{
    using indexing::Provider;
    if (source == "dblp")
        return {Provider::Dblp};
    if (source == "semanticscholar")
        return {Provider::SemanticScholar};
    return {Provider::Dblp, Provider::SemanticScholar};
}

bool hasIdFor(const corpus::Reviewer& r, const std::vector<indexing::Provider>& providers)
{
    for (auto p : providers) {
        if (p == indexing::Provider::Dblp && r.externalIds.dblpQuery)
            return true;
        if (p == indexing::Provider::SemanticScholar && r.externalIds.semanticScholarAuthorId)
            return true;
    }
    return false;
}

int runFetchPubs(const CommonOptions& common, const std::string& reviewerId, bool all, const std::string& source,
                 bool offline, int limit, std::ostream& out, std::ostream& err)
{
    if (all == !reviewerId.empty())
        throw Error(ErrorKind::Parameter, "pass exactly one of --reviewer or --all");

    auto conference = corpus::loadCorpus(common.corpus);
    const auto providers = providersFor(source);
    const auto mode = offline ? indexing::FetchMode::Offline : indexing::FetchMode::Online;

    indexing::ClientOptions options;
    options.cacheDir = indexing::resolveCacheDir(std::filesystem::path(common.corpus) / ".pubcache");
    indexing::IndexingClient client(offline ? nullptr : indexing::makeHttpsGateway(), options);

    if (!all && !conference.findReviewer(reviewerId))
        throw Error(ErrorKind::NotFound, "unknown reviewer '" + reviewerId + "'");

    for (auto& reviewer : conference.reviewers) {
        if (!all && reviewer.id != reviewerId)
            continue;
        if (all && !hasIdFor(reviewer, providers)) {
            err << "warning: reviewer '" << reviewer.id << "' has no id for source '" << source << "', skipped\n";
            continue;
        }
        const auto before = reviewer.publications.size();
        reviewer = client.hydrateReviewer(reviewer, providers, limit, mode);
        out << reviewer.id << ": " << reviewer.publications.size() << " publications (+"
            << reviewer.publications.size() - before << " fetched)\n";
    }
    corpus::validate(conference);
    corpus::saveReviewers(conference, common.corpus);
    return 0;
}

std::pair<std::string, int> parseAddr(const std::string& addr)
{
    const auto colon = addr.rfind(':');
    if (colon == std::string::npos)
        throw Error(ErrorKind::Parameter, "--addr must be host:port");
    const auto port = std::stoi(addr.substr(colon + 1));
    if (port < 0 || port > 65535)
        throw Error(ErrorKind::Parameter, "port out of range");
    return {addr.substr(0, colon), port};
}

int runServe(const CommonOptions& common, const std::string& addr, const std::string& corsOrigin,
             const CloudFlags& flags, double minShare, double ratio, std::ostream& out, std::ostream& err)
{
    auto [host, port] = [&] {
        try {
            return parseAddr(addr);
        } catch (const std::logic_error&) {
            throw Error(ErrorKind::Parameter, "invalid --addr '" + addr + "'");
        }
    }();

    service::ServiceConfig config;
    config.corpusDir = common.corpus;
    config.cloudDefaults = service::applyOverrides(layout::CloudConfig{}, flags.overrides());
    config.analysis = {common.titleBoost, minShare, ratio};
    if (!common.stopwords.empty())
        config.stopwordPath = common.stopwords;
    config.corsOrigin = corsOrigin;
    service::Service svc(std::move(config));

    if (!svc.bind(host, port)) {
        err << "error: cannot bind " << addr << '\n';
        return 2;
    }

    // A dedicated thread waits for SIGINT/SIGTERM and stops the server;
    // SIGUSR1 wakes it if the server exits on its own.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    sigaddset(&signals, SIGUSR1);
    sigset_t previous;
    pthread_sigmask(SIG_BLOCK, &signals, &previous);
    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        svc.stop();
    });

    out << "serving " << addr << '\n' << std::flush;
    const bool ok = svc.run();
    pthread_kill(waiter.native_handle(), SIGUSR1);
    waiter.join();
    pthread_sigmask(SIG_SETMASK, &previous, nullptr);
    return ok ? 0 : 2;
}

}  // namespace

int exitCodeFor(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::Io: return 2;
    case ErrorKind::CacheMiss:
    case ErrorKind::Provider:
    case ErrorKind::RateLimited:
    case ErrorKind::Network: return 3;
    default: return 1;
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Word clouds, coverage gaps and reviewer suggestions for programme committee chairs", "pccloud"};
    app.require_subcommand(1);

    CommonOptions common;
    CloudFlags cloudFlags;
    std::string scope = "submissions";
    std::string outPath;
    std::string format = "table";
    double minShare = analysis::AnalysisOptions{}.minShare;
    double ratio = analysis::AnalysisOptions{}.ratio;
    std::string paperId;
    int k = 10;
    std::string reviewerId;
    bool all = false;
    std::string source = "any";
    bool offline = false;
    int limit = 100;
    std::string addr = "127.0.0.1:8080";
    std::string corsOrigin = "*";

    auto* ingest = app.add_subcommand("ingest", "Validate a corpus and print its statistics");
    addCommon(ingest, common);

    auto* cloud = app.add_subcommand("cloud", "Render a word cloud as SVG");
    addCommon(cloud, common);
    addCloudFlags(cloud, cloudFlags);
    cloud->add_option("--scope", scope, "submissions, pc or reviewer:<id>")->capture_default_str();
    cloud->add_option("--out", outPath, "Output SVG file")->required();

    auto* gap = app.add_subcommand("gap-report", "Compare submission topics against PC competence");
    addCommon(gap, common);
    gap->add_option("--format", format, "table or json")
        ->check(CLI::IsMember({"table", "json"}))
        ->capture_default_str();
    gap->add_option("--min-share", minShare, "Smallest submission share reported")->capture_default_str();
    gap->add_option("--ratio", ratio, "Flag terms whose pc/sub share ratio is below this")->capture_default_str();

    auto* suggest = app.add_subcommand("suggest", "Rank reviewers for a paper");
    addCommon(suggest, common);
    suggest->add_option("--paper", paperId, "Paper id")->required();
    suggest->add_option("-k", k, "Number of suggestions")->capture_default_str();
    suggest->add_option("--format", format, "table or json")
        ->check(CLI::IsMember({"table", "json"}))
        ->capture_default_str();

    auto* fetch = app.add_subcommand("fetch-pubs", "Fetch reviewers' publications from DBLP / Semantic Scholar");
    addCommon(fetch, common);
    fetch->add_option("--reviewer", reviewerId, "Reviewer id");
    fetch->add_flag("--all", all, "Every reviewer with a matching external id");
    fetch->add_option("--source", source, "dblp, semanticscholar or any")
        ->check(CLI::IsMember({"dblp", "semanticscholar", "any"}))
        ->capture_default_str();
    fetch->add_flag("--offline", offline, "Use the response cache only");
    fetch->add_option("--limit", limit, "Maximum publications per provider")
        ->check(CLI::Range(1, 1000))
        ->capture_default_str();

    auto* serve = app.add_subcommand("serve", "Run the HTTP API");
    addCommon(serve, common);
    addCloudFlags(serve, cloudFlags);
    serve->add_option("--addr", addr, "host:port to bind")->capture_default_str();
    serve->add_option("--cors-origin", corsOrigin, "Access-Control-Allow-Origin value")->capture_default_str();
    serve->add_option("--min-share", minShare, "Default gap-report min share")->capture_default_str();
    serve->add_option("--ratio", ratio, "Default gap-report ratio threshold")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*ingest)
            return runIngest(common, out, err);
        if (*cloud)
            return runCloud(common, scope, outPath, cloudFlags, out, err);
        if (*gap)
            return runGapReport(common, format, minShare, ratio, out);
        if (*suggest)
            return runSuggest(common, paperId, k, format, out);
        if (*fetch)
            return runFetchPubs(common, reviewerId, all, source, offline, limit, out, err);
        if (*serve)
            return runServe(common, addr, corsOrigin, cloudFlags, minShare, ratio, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exitCodeFor(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace pccloud::cli
