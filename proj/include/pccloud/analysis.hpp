#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pccloud/corpus.hpp"
#include "pccloud/text.hpp"

namespace pccloud::analysis {

/// Parameters shared by every aggregation; mirrors the CLI flags and the
/// service query parameters.
struct AnalysisOptions {
    double titleBoost = 1.0;
    double minShare = 0.01;   // τs: smallest submission share reported
    double ratio = 0.5;       // ρ: flag when pcShare / subShare falls below this
};

/// term -> share of total weight; sums to 1 or is empty.
using TermDistribution = text::TermWeights;

struct GapEntry {
    std::string term;
    double subShare = 0.0;
    double pcShare = 0.0;
    double ratio = 0.0;
    bool flagged = false;
};

struct Suggestion {
    std::string reviewerId;
    double score = 0.0;
};

text::TermWeights submissionsWeights(const corpus::Conference& conference, const text::StopwordList& stopwords,
                                     double titleBoost);
text::TermWeights reviewerWeights(const corpus::Reviewer& reviewer, const text::StopwordList& stopwords,
                                  double titleBoost);
/// Term-wise sum of reviewerWeights over the whole committee.
text::TermWeights pcWeights(const corpus::Conference& conference, const text::StopwordList& stopwords,
                            double titleBoost);
text::TermWeights paperWeights(const corpus::Paper& paper, const text::StopwordList& stopwords, double titleBoost);

TermDistribution normalize(const text::TermWeights& weights);

/// One entry per term with subShare >= minShare, heaviest first. Throws
/// Error(Parameter) unless minShare in (0, 1] and ratio >= 0.
std::vector<GapEntry> coverageGapReport(const TermDistribution& sub, const TermDistribution& pc, double minShare,
                                        double ratio);

/// Cosine similarity of two term-weight vectors; 0 when either is empty.
double matchScore(const text::TermWeights& paper, const text::TermWeights& reviewer);

/// Every reviewer scored against the paper, best first (ties by id), cut to
/// k. Throws Error(NotFound) for an unknown paper id.
std::vector<Suggestion> suggestReviewers(const corpus::Conference& conference, std::string_view paperId,
                                         std::size_t k, const text::StopwordList& stopwords, double titleBoost);

nlohmann::json toJson(const std::vector<GapEntry>& report);

/// [{reviewerId, score, assigned}] with scores rounded to 6 decimals.
nlohmann::json suggestionsJson(const corpus::Conference& conference, std::string_view paperId,
                               const std::vector<Suggestion>& suggestions);

double roundTo6(double value);

}  // namespace pccloud::analysis
