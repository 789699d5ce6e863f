#include "pccloud/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "pccloud/error.hpp"

namespace pccloud::analysis {

text::TermWeights submissionsWeights(const corpus::Conference& conference, const text::StopwordList& stopwords,
                                     double titleBoost)
{
    return text::buildCorpusWeights(corpus::submissionDocuments(conference), stopwords, titleBoost);
}

text::TermWeights reviewerWeights(const corpus::Reviewer& reviewer, const text::StopwordList& stopwords,
                                  double titleBoost)
{
    return text::buildCorpusWeights(reviewer.publications, stopwords, titleBoost);
}

text::TermWeights pcWeights(const corpus::Conference& conference, const text::StopwordList& stopwords,
                            double titleBoost)
{
    text::TermWeights total;
    for (const auto& r : conference.reviewers)
        for (const auto& [term, w] : reviewerWeights(r, stopwords, titleBoost))
            total[term] += w;
    return total;
}

text::TermWeights paperWeights(const corpus::Paper& paper, const text::StopwordList& stopwords, double titleBoost)
{
    return text::buildCorpusWeights({corpus::submissionDocument(paper)}, stopwords, titleBoost);
}

TermDistribution normalize(const text::TermWeights& weights)
{
    double sum = 0.0;
    for (const auto& [term, w] : weights)
        sum += w;
    TermDistribution shares;
    if (!(sum > 0.0))
        return shares;
    for (const auto& [term, w] : weights)
        shares.emplace(term, w / sum);
    return shares;
}

std::vector<GapEntry> coverageGapReport(const TermDistribution& sub, const TermDistribution& pc, double minShare,
                                        double ratio)
{
    if (!(minShare > 0.0 && minShare <= 1.0))
        throw Error(ErrorKind::Parameter, "min share must be in (0, 1]");
    if (!(ratio >= 0.0) || std::isinf(ratio))
        throw Error(ErrorKind::Parameter, "ratio threshold must be a finite nonnegative number");

    std::vector<GapEntry> report;
    for (const auto& [term, subShare] : sub) {
        if (subShare < minShare || !(subShare > 0.0))
            continue;
        const auto it = pc.find(term);
        const double pcShare = it == pc.end() ? 0.0 : it->second;
        const double r = pcShare / subShare;
        report.push_back({term, subShare, pcShare, r, r < ratio});
    }
    std::sort(report.begin(), report.end(), [](const GapEntry& a, const GapEntry& b) {
        if (a.subShare != b.subShare)
            return a.subShare > b.subShare;
        return a.term < b.term;
    });
    return report;
}

double matchScore(const text::TermWeights& paper, const text::TermWeights& reviewer)
{
    // Both maps are key-ordered, so the dot product accumulates in the same
    // order whichever argument comes first.
    double dot = 0.0;
    auto a = paper.begin();
    auto b = reviewer.begin();
    while (a != paper.end() && b != reviewer.end()) {
        if (a->first < b->first) {
            ++a;
        } else if (b->first < a->first) {
            ++b;
        } else {
            dot += a->second * b->second;
            ++a;
            ++b;
        }
    }
    auto norm = [](const text::TermWeights& v) {
        double s = 0.0;
        for (const auto& [term, w] : v)
            s += w * w;
        return std::sqrt(s);
    };
    const double denom = norm(paper) * norm(reviewer);
    if (!(denom > 0.0))
        return 0.0;
    return std::clamp(dot / denom, 0.0, 1.0);
}

std::vector<Suggestion> suggestReviewers(const corpus::Conference& conference, std::string_view paperId,
                                         std::size_t k, const text::StopwordList& stopwords, double titleBoost)
{
    const auto* paper = conference.findPaper(paperId);
    if (!paper)
        throw Error(ErrorKind::NotFound, "unknown paper '" + std::string(paperId) + "'");

    const auto target = paperWeights(*paper, stopwords, titleBoost);
    std::vector<Suggestion> ranked;
    ranked.reserve(conference.reviewers.size());
    for (const auto& r : conference.reviewers)
        ranked.push_back({r.id, matchScore(target, reviewerWeights(r, stopwords, titleBoost))});

    std::sort(ranked.begin(), ranked.end(), [](const Suggestion& a, const Suggestion& b) {
        if (a.score != b.score)
            return a.score > b.score;
        return a.reviewerId < b.reviewerId;
    });
    ranked.resize(std::min(k, ranked.size()));
    return ranked;
}

nlohmann::json toJson(const std::vector<GapEntry>& report)
{
    auto out = nlohmann::json::array();
    for (const auto& e : report)
        out.push_back({{"term", e.term}, {"subShare", e.subShare}, {"pcShare", e.pcShare}, {"ratio", e.ratio},
                       {"flagged", e.flagged}});
    return out;
}

double roundTo6(double value)
{
    return std::round(value * 1e6) / 1e6;
}

nlohmann::json suggestionsJson(const corpus::Conference& conference, std::string_view paperId,
                               const std::vector<Suggestion>& suggestions)
{
    auto out = nlohmann::json::array();
    for (const auto& s : suggestions)
        out.push_back({{"reviewerId", s.reviewerId}, {"score", roundTo6(s.score)},
                       {"assigned", conference.findAssignment(paperId, s.reviewerId) != nullptr}});
    return out;
}

}  // namespace pccloud::analysis
