// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Runs offline; the CLI binary path comes from PCCLOUD_CLI_PATH.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <regex>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>

#include "pccloud/analysis.hpp"
#include "pccloud/corpus.hpp"
#include "pccloud/error.hpp"
#include "pccloud/indexing.hpp"
#include "pccloud/layout.hpp"
#include "pccloud/service.hpp"
#include "pccloud/text.hpp"
#include "support/synth.hpp"
#include "support/temp_dir.hpp"

using namespace pccloud;
using nlohmann::json;
namespace t = pccloud::testkit;

namespace {

struct Failure {
    std::string detail;
};

void require(bool ok, const std::string& detail)
{
    if (!ok)
        throw Failure{detail};
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string xmlUnescape(std::string s)
{
    static const std::pair<const char*, const char*> entities[] = {
        {"&lt;", "<"}, {"&gt;", ">"}, {"&quot;", "\""}, {"&apos;", "'"}, {"&amp;", "&"}};
    for (const auto& [from, to] : entities)
        for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += std::strlen(to))
            s.replace(pos, std::strlen(from), to);
    return s;
}

struct SvgWord {
    std::string term;
    double fontSize;
};

std::vector<SvgWord> svgWords(const std::string& svg)
{
    static const std::regex text(R"re(<text [^>]*font-size="([0-9.]+)"[^>]*data-term="([^"]*)")re");
    std::vector<SvgWord> out;
    for (std::sregex_iterator it(svg.begin(), svg.end(), text), end; it != end; ++it)
        out.push_back({xmlUnescape((*it)[2]), std::stod((*it)[1])});
    return out;
}

/// Stopwords read straight from the shipped data file.
std::set<std::string> shippedStopwords()
{
    std::ifstream in(PCCLOUD_STOPWORD_FILE);
    std::set<std::string> out;
    for (std::string line; std::getline(in, line);)
        if (!line.empty() && line[0] != '#')
            out.insert(line);
    return out;
}

corpus::Paper paper(const std::string& id, std::string title, std::string abstract)
{
    return {id, std::move(title), std::move(abstract), {}, {"Author " + id}};
}

void writeCorpus(const corpus::Conference& c, const std::filesystem::path& dir)
{
    std::ofstream(dir / "conference.json") << json{{"name", c.name}, {"topics", c.topics}}.dump(2);
    json papers = json::array();
    for (const auto& p : c.papers)
        papers.push_back(corpus::toJson(p));
    std::ofstream(dir / "papers.json") << papers.dump(2);
    corpus::saveReviewers(c, dir);
    corpus::saveAssignments(c, dir);
}

// -- criteria ---------------------------------------------------------------

void pipelineOracle()
{
    t::SynthGenerator gen(20240611);
    std::vector<t::SynthDocument> docs;
    std::vector<text::RawDocument> raw;
    for (int i = 0; i < 100; ++i) {
        docs.push_back(gen.document("d" + std::to_string(i), text::DocumentSource::Submission));
        raw.push_back(docs.back().doc);
    }
    const auto actual = text::buildCorpusWeights(raw, t::stopList(), 1.0);
    const auto expected = t::recount(docs, t::stopSet(), 1.0);
    std::size_t mismatches = 0;
    for (const auto& [term, w] : expected) {
        const auto it = actual.find(term);
        if (it == actual.end() || it->second != w)
            ++mismatches;
    }
    for (const auto& [term, w] : actual)
        if (!expected.count(term))
            ++mismatches;
    require(mismatches == 0, fmt::format("{} mismatching terms", mismatches));
}

void stopwordExclusion()
{
    const auto stop = shippedStopwords();
    require(stop.size() > 100, "stopword file not found or too small");
    std::vector<std::string> list(stop.begin(), stop.end());

    corpus::Conference c;
    c.name = "Stopword corpus";
    std::mt19937 rng(7);
    const std::vector<std::string> content = {"ledger", "consensus", "compiler", "semantic", "ontology", "cluster"};
    for (int i = 0; i < 20; ++i) {
        std::shuffle(list.begin(), list.end(), rng);
        std::string abstract;
        for (std::size_t j = 0; j < list.size(); ++j) {
            // Mixed case so lowercasing is exercised too.
            std::string w = list[j];
            if (j % 3 == 0 && !w.empty())
                w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
            abstract += w + (j % 7 == 0 ? ", " + content[(i + j) % content.size()] + " " : " ");
        }
        c.papers.push_back(paper("p" + std::to_string(i), "The " + content[i % content.size()] + " of it", abstract));
    }
    layout::CloudConfig cfg;
    cfg.width = 1600;
    cfg.height = 1200;
    cfg.maxWords = 1000;
    const auto weights = analysis::submissionsWeights(c, text::StopwordList::bundled(), 1.0);
    const auto words = svgWords(layout::renderSvg(layout::placeWords(weights, cfg)));
    require(!words.empty(), "cloud is empty");
    for (const auto& w : words)
        require(!stop.count(w.term), "stopword '" + w.term + "' drawn in cloud");
    for (const auto& [term, weight] : weights)
        require(!stop.count(term), "stopword '" + term + "' kept in weights");
}

corpus::Conference blockchainConference()
{
    corpus::Conference c;
    c.name = "Synthetic 40";
    c.topics = {"Blockchain"};
    std::mt19937 rng(40);
    const std::vector<std::string> vocab = {"security", "cloud",   "learning", "network", "privacy", "graph",
                                            "compiler", "sensor",  "database", "mobile",  "energy",  "vision",
                                            "protocol", "storage", "testing",  "quantum"};
    std::bernoulli_distribution coin(0.35);
    for (int i = 0; i < 40; ++i) {
        std::vector<std::string> words;
        if (i % 4 != 3)  // 30 of 40
            words.push_back(i % 2 ? "Blockchain" : "blockchain");
        for (const auto& v : vocab)
            if (coin(rng))
                words.push_back(v);
        std::shuffle(words.begin(), words.end(), rng);
        std::string title = "On";
        std::string abstract = "We";
        for (std::size_t j = 0; j < words.size(); ++j)
            (j % 3 == 0 ? title : abstract) += " of the " + words[j];
        c.papers.push_back(paper("p" + std::to_string(i), title + ".", abstract + "."));
    }
    corpus::Reviewer r;
    r.id = "r1";
    r.name = "Synthetic Reviewer";
    c.reviewers.push_back(r);
    return c;
}

void topTermVisibility()
{
    const auto c = blockchainConference();

    // Oracle: whitespace/punctuation split and a set lookup, counted here.
    const auto stop = shippedStopwords();
    std::map<std::string, int> counts;
    for (const auto& p : c.papers)
        for (const auto* field : {&p.title, &p.abstract}) {
            std::string word;
            for (char ch : *field + " ") {
                if (std::isalpha(static_cast<unsigned char>(ch))) {
                    word += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
                } else {
                    if (word.size() >= 2 && !stop.count(word))
                        ++counts[word];
                    word.clear();
                }
            }
        }
    std::string oracleTop;
    int best = -1;
    int runnerUp = -1;
    for (const auto& [term, n] : counts) {
        if (n > best) {
            runnerUp = best;
            best = n;
            oracleTop = term;
        } else if (n > runnerUp) {
            runnerUp = n;
        }
    }
    require(oracleTop == "blockchain" && best > runnerUp,
            fmt::format("fixture: oracle top is '{}' ({} vs {})", oracleTop, best, runnerUp));

    const auto svg = layout::renderSvg(layout::placeWords(
        service::scopeWeights(c, service::CloudScope::parse("submissions"), text::StopwordList::bundled(), 1.0),
        layout::CloudConfig{}));
    const auto words = svgWords(svg);
    require(!words.empty(), "cloud is empty");
    double topSize = -1;
    double otherMax = -1;
    for (const auto& w : words) {
        if (w.term == oracleTop)
            topSize = std::max(topSize, w.fontSize);
        else
            otherMax = std::max(otherMax, w.fontSize);
    }
    require(topSize > otherMax, fmt::format("blockchain font {} vs next {}", topSize, otherMax));
}

std::vector<layout::CloudLayout> randomLayouts(std::size_t n, std::uint32_t seed)
{
    std::mt19937 rng(seed);
    auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    auto uint = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    std::vector<layout::CloudLayout> out;
    for (std::size_t i = 0; i < n; ++i) {
        layout::CloudConfig cfg;
        cfg.width = uint(120, 1400);
        cfg.height = uint(80, 900);
        cfg.minFontSize = uni(4, 20);
        cfg.maxFontSize = cfg.minFontSize + uni(0, 70);
        cfg.padding = uni(0, 8);
        cfg.spiralStep = uni(0.5, 10);
        cfg.angleStep = uni(0.03, 0.6);
        cfg.maxWords = uint(1, 150);
        cfg.seed = rng();
        out.push_back(layout::placeWords(t::randomWeights(rng, static_cast<std::size_t>(uint(1, 150))), cfg));
    }
    return out;
}

void layoutSoundness()
{
    std::size_t overlaps = 0;
    std::size_t outside = 0;
    std::size_t placed = 0;
    for (const auto& cloud : randomLayouts(200, 99)) {
        const auto report = t::bruteForceOverlaps(cloud);
        overlaps += report.overlaps;
        outside += report.outside;
        placed += cloud.placed.size();
    }
    require(placed > 0, "nothing placed");
    require(overlaps == 0 && outside == 0, fmt::format("{} overlaps, {} outside canvas", overlaps, outside));
}

void determinism()
{
    t::TempDir dir;
    writeCorpus(blockchainConference(), dir.path());
    std::vector<std::string> outputs;
    for (const auto* name : {"first.svg", "second.svg"}) {
        const auto out = dir / name;
        const auto cmd = fmt::format("\"{}\" cloud --corpus \"{}\" --scope submissions --seed 1234 --out \"{}\" >/dev/null",
                                     PCCLOUD_CLI_PATH, dir.path().string(), out.string());
        require(std::system(cmd.c_str()) == 0, "cli run failed: " + cmd);
        outputs.push_back(slurp(out));
    }
    require(!outputs[0].empty() && outputs[0].find("<text") != std::string::npos, "empty output");
    require(outputs[0] == outputs[1], "outputs differ between runs");
}

void monotoneSizing()
{
    const auto layouts = randomLayouts(60, 1234);
    std::mt19937 rng(5);
    std::size_t sampled = 0;
    std::size_t inversions = 0;
    while (sampled < 1000) {
        const auto& cloud = layouts[std::uniform_int_distribution<std::size_t>(0, layouts.size() - 1)(rng)];
        if (cloud.placed.size() < 2)
            continue;
        std::uniform_int_distribution<std::size_t> idx(0, cloud.placed.size() - 1);
        const auto& a = cloud.placed[idx(rng)];
        const auto& b = cloud.placed[idx(rng)];
        ++sampled;
        if ((a.weight > b.weight && a.fontSize < b.fontSize) || (a.weight == b.weight && a.fontSize != b.fontSize))
            ++inversions;
    }
    require(inversions == 0, fmt::format("{} inversions in {} pairs", inversions, sampled));
}

void gapDetection()
{
    corpus::Conference c;
    c.name = "Gap";
    const std::vector<std::string> topicA = {"qubit", "entanglement", "decoherence"};
    const std::vector<std::string> topicB = {"register", "allocation", "vectorization"};
    for (int i = 0; i < 10; ++i)
        c.papers.push_back(paper("a" + std::to_string(i), "Qubit entanglement", "Decoherence in qubit arrays."));
    for (int i = 0; i < 2; ++i)
        c.papers.push_back(paper("b" + std::to_string(i), "Register allocation", "Vectorization after allocation."));
    for (int r = 0; r < 2; ++r) {
        corpus::Reviewer rev;
        rev.id = "r" + std::to_string(r);
        rev.name = "Reviewer " + rev.id;
        for (int k = 0; k < 5; ++k)
            rev.publications.push_back({"pub" + std::to_string(k), "Register allocation and vectorization",
                                        "Fast register allocation.", text::DocumentSource::Publication});
        c.reviewers.push_back(rev);
    }
    const analysis::AnalysisOptions defaults;
    require(defaults.minShare == 0.01 && defaults.ratio == 0.5, "unexpected defaults");
    const auto& stop = text::StopwordList::bundled();
    const auto report = analysis::coverageGapReport(analysis::normalize(analysis::submissionsWeights(c, stop, 1.0)),
                                                    analysis::normalize(analysis::pcWeights(c, stop, 1.0)),
                                                    defaults.minShare, defaults.ratio);
    std::map<std::string, bool> flagged;
    for (const auto& e : report)
        flagged[e.term] = e.flagged;
    for (const auto& term : topicA)
        require(flagged.count(term) && flagged[term], "topic A term '" + term + "' not flagged");
    for (const auto& term : topicB)
        require(flagged.count(term) && !flagged[term], "topic B term '" + term + "' flagged or missing");
}

void matchScoreProperties()
{
    std::mt19937 rng(31);
    std::size_t asym = 0;
    std::size_t outOfRange = 0;
    for (int i = 0; i < 2000; ++i) {
        auto a = t::randomWeights(rng, 1 + rng() % 40);
        auto b = t::randomWeights(rng, 1 + rng() % 40);
        // Force some overlap.
        for (const auto& [term, w] : a)
            if (rng() % 3 == 0)
                b[term] = w * 0.5 + 1;
        const double ab = analysis::matchScore(a, b);
        const double ba = analysis::matchScore(b, a);
        if (std::abs(ab - ba) > 1e-12)
            ++asym;
        if (!(ab >= 0.0 && ab <= 1.0))
            ++outOfRange;
    }
    require(asym == 0 && outOfRange == 0, fmt::format("{} asymmetric, {} out of range", asym, outOfRange));

    // Order invariance under per-reviewer scaling, on weights directly...
    std::uniform_real_distribution<double> scale(1e-3, 1e3);
    for (int trial = 0; trial < 50; ++trial) {
        const auto paperW = t::randomWeights(rng, 30);
        std::vector<text::TermWeights> reviewers;
        for (int r = 0; r < 12; ++r) {
            auto w = t::randomWeights(rng, 30);
            for (const auto& [term, x] : paperW)
                if (rng() % 4 == 0)
                    w[term] = x + r;
            reviewers.push_back(w);
        }
        auto order = [&](const std::vector<text::TermWeights>& rs) {
            std::vector<std::pair<double, int>> scored;
            for (int r = 0; r < static_cast<int>(rs.size()); ++r)
                scored.emplace_back(-analysis::matchScore(paperW, rs[r]), r);
            std::sort(scored.begin(), scored.end());
            std::vector<int> ids;
            for (const auto& s : scored)
                ids.push_back(s.second);
            return ids;
        };
        auto scaled = reviewers;
        for (auto& w : scaled) {
            const double c = scale(rng);
            for (auto& [term, x] : w)
                x *= c;
        }
        require(order(reviewers) == order(scaled), fmt::format("order changed in trial {}", trial));
    }

    // ...and end to end, by repeating each reviewer's publication list.
    t::SynthGenerator gen(77);
    corpus::Conference c;
    c.name = "Scaling";
    c.papers.push_back(paper("p1", gen.render(gen.words(8)), gen.render(gen.words(60))));
    for (int r = 0; r < 8; ++r) {
        corpus::Reviewer rev;
        rev.id = "r" + std::to_string(r);
        rev.name = rev.id;
        for (int k = 0; k < 3; ++k)
            rev.publications.push_back(gen.document(rev.id + "-" + std::to_string(k), text::DocumentSource::Publication).doc);
        c.reviewers.push_back(rev);
    }
    auto ids = [](const std::vector<analysis::Suggestion>& s) {
        std::vector<std::string> out;
        for (const auto& x : s)
            out.push_back(x.reviewerId);
        return out;
    };
    const auto& stop = text::StopwordList::bundled();
    const auto base = ids(analysis::suggestReviewers(c, "p1", 8, stop, 1.0));
    auto repeated = c;
    for (std::size_t r = 0; r < repeated.reviewers.size(); ++r) {
        auto& pubs = repeated.reviewers[r].publications;
        const auto once = pubs;
        for (std::size_t k = 0; k < r % 4; ++k)
            pubs.insert(pubs.end(), once.begin(), once.end());
    }
    require(base == ids(analysis::suggestReviewers(repeated, "p1", 8, stop, 1.0)), "suggestion order changed");
}

class CountingGateway : public indexing::HttpGateway {
public:
    std::map<std::string, indexing::HttpResponse> routes;
    int calls = 0;
    indexing::HttpResponse get(const std::string& url) override
    {
        ++calls;
        const auto it = routes.find(url);
        return it == routes.end() ? indexing::HttpResponse{404, "{}"} : it->second;
    }
};

void clients()
{
    const auto fixture = [](const std::string& name) {
        return slurp(std::filesystem::path(PCCLOUD_FIXTURE_DIR) / "providers" / name);
    };
    t::TempDir cache;
    indexing::ClientOptions options;
    options.cacheDir = cache.path();
    std::vector<std::chrono::milliseconds> sleeps;
    options.sleep = [&](std::chrono::milliseconds d) { sleeps.push_back(d); };

    auto gateway = std::make_shared<CountingGateway>();
    gateway->routes[indexing::dblpUrl("Ivan Petrov", 50)] = {200, fixture("dblp_3hits.json")};
    gateway->routes[indexing::semanticScholarUrl("1741101", 50)] = {200, fixture("s2_2papers.json")};
    indexing::IndexingClient online(gateway, options);

    const auto dblp = online.fetchDblp("Ivan Petrov", 50, indexing::FetchMode::Online);
    require(dblp.documents.size() == 3, fmt::format("dblp: {} documents", dblp.documents.size()));
    require(dblp.documents[0].title == "Word Clouds for Conference Management Systems." &&
                dblp.documents[1].title == "Automatic Assignment of Reviewers to Papers." &&
                dblp.documents[2].title == "Register Allocation with Graph Colouring.",
            "dblp titles differ");
    const auto s2 = online.fetchSemanticScholar("1741101", 50, indexing::FetchMode::Online);
    require(s2.documents.size() == 2, fmt::format("s2: {} documents", s2.documents.size()));
    require(s2.documents[0].title == "Construction of the Literature Graph in Semantic Scholar" &&
                s2.documents[1].title == "Citation Recommendation for Reviewers" && s2.documents[1].abstract.empty(),
            "s2 titles differ");

    // Offline: warm entries are served and a cold one fails, all without a call.
    auto forbidden = std::make_shared<CountingGateway>();
    indexing::IndexingClient offline(forbidden, options);
    require(offline.fetchDblp("Ivan Petrov", 50, indexing::FetchMode::Offline).documents == dblp.documents,
            "offline dblp differs");
    require(offline.fetchSemanticScholar("1741101", 50, indexing::FetchMode::Offline).fromCache, "not from cache");
    try {
        offline.fetchDblp("Nobody Cached", 50, indexing::FetchMode::Offline);
        require(false, "cold offline fetch succeeded");
    } catch (const Error& e) {
        require(e.kind() == ErrorKind::CacheMiss, "cold offline fetch: " + std::string(e.what()));
    }
    require(forbidden->calls == 0, fmt::format("offline made {} calls", forbidden->calls));

    // 429 on every attempt.
    auto limited = std::make_shared<CountingGateway>();
    limited->routes[indexing::dblpUrl("Busy", 10)] = {429, R"({"error":"Too Many Requests"})"};
    sleeps.clear();
    indexing::IndexingClient busy(limited, options);
    try {
        busy.fetchDblp("Busy", 10, indexing::FetchMode::Online);
        require(false, "429 fetch succeeded");
    } catch (const Error& e) {
        require(e.kind() == ErrorKind::RateLimited, "429 gave " + std::string(toString(e.kind())));
    }
    require(limited->calls == 4, fmt::format("{} attempts", limited->calls));
}

void serviceRoundTrip()
{
    t::TempDir dir(std::filesystem::path(PCCLOUD_FIXTURE_DIR) / "corpus_basic");
    service::ServiceConfig config;
    config.corpusDir = dir.path();
    service::Service svc(config);
    const int port = svc.bindToAnyPort("127.0.0.1");
    require(port > 0, "bind failed");
    std::thread server([&] { svc.run(); });
    svc.waitUntilReady();
    struct Stop {
        service::Service& svc;
        std::thread& th;
        ~Stop()
        {
            svc.stop();
            th.join();
        }
    } stop{svc, server};

    httplib::Client client("127.0.0.1", port);
    const auto disk = [&] { return json::parse(slurp(dir / "assignments.json")); };
    const auto view = [&] {
        auto res = client.Get("/api/assignments");
        require(res && res->status == 200, "GET /api/assignments failed");
        return json::parse(res->body);
    };
    const json record = {{"paperId", "p3"}, {"reviewerId", "r1"}, {"status", "proposed"}, {"origin", "manual"}};
    const auto before = view();

    auto posted = client.Post("/api/assignments", record.dump(), "application/json");
    require(posted && posted->status == 200, "POST failed");
    const auto after = view();
    require(std::find(after.begin(), after.end(), record) != after.end(), "GET lacks the new assignment");
    require(disk() == after, "disk differs from API view after POST");

    auto removed = client.Delete("/api/assignments/p3/r1");
    require(removed && removed->status == 200, "DELETE failed");
    require(view() == before, "DELETE did not restore the API view");
    require(disk() == before, "DELETE did not restore assignments.json");
}

}  // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<void()>>> criteria = {
        {"pipeline oracle equivalence (100 documents)", pipelineOracle},
        {"stopword exclusion", stopwordExclusion},
        {"top-term visibility (blockchain in 30 of 40)", topTermVisibility},
        {"layout soundness (200 random cases)", layoutSoundness},
        {"determinism across two CLI runs", determinism},
        {"monotone sizing (1000 pairs)", monotoneSizing},
        {"gap detection at default thresholds", gapDetection},
        {"matchScore symmetry, range, order invariance", matchScoreProperties},
        {"indexing clients (fixtures, offline, 429)", clients},
        {"service assignment round-trip", serviceRoundTrip},
    };
    int failures = 0;
    const auto start = std::chrono::steady_clock::now();
    for (const auto& [name, check] : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        std::string detail;
        try {
            check();
        } catch (const Failure& f) {
            detail = f.detail;
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
        if (detail.empty())
            std::cout << fmt::format("PASS  {} ({} ms)\n", name, ms.count());
        else
            std::cout << fmt::format("FAIL  {} ({} ms): {}\n", name, ms.count(), detail);
        failures += !detail.empty();
    }
    const auto total = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    std::cout << fmt::format("{} of {} criteria passed in {} ms\n", criteria.size() - failures, criteria.size(),
                             total.count());
    return failures == 0 ? 0 : 1;
}
